import json

import numpy as np
import pytest

from commons_mrac import (
    AdaptiveInspection,
    FixedInspection,
    GameParams,
    Phase,
    Schedule,
    ScenarioConfig,
    get_preset,
    load_config,
    save_config,
)
from commons_mrac.cli import (
    CSV_HEADER,
    main,
    read_trajectory_csv,
    write_trajectory_csv,
)

from conftest import run_preset, sample_params


def _random_config(rng) -> ScenarioConfig:
    params = sample_params(rng)
    t1 = float(rng.randint(1, 50))
    t2 = t1 + float(rng.randint(1, 50))
    phases = [
        Phase(0.0, t1, FixedInspection(rng.uniform(0, 1))),
        Phase(t1, t2, FixedInspection(rng.uniform(0, 1))),
    ]
    if rng.rand() < 0.5:
        phases.append(Phase(t2, t2 + 10.0, AdaptiveInspection(10 ** rng.uniform(-6, 0))))
    return ScenarioConfig(
        name=f"random-{rng.randint(1e6)}",
        params=params,
        schedule=Schedule(tuple(phases)),
        x0=rng.uniform(0, 1),
        y0=rng.uniform(0, params.r_max),
        xm0=rng.uniform(0, 1),
        ym0=rng.uniform(0, params.r_max),
        p_hat0=rng.uniform(0, 1),
        step=0.01,
        stride=int(rng.randint(1, 100)),
        epsilon=rng.uniform(1e-6, 0.9),
        error_bound=rng.uniform(0.1, 5.0),
        clamp_p=bool(rng.rand() < 0.5),
    )


class TestConfigRoundTrip:
    @pytest.mark.parametrize("name", ["example1", "example2", "example3"])
    def test_presets(self, name, tmp_path):
        cfg = get_preset(name)
        assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg
        path = tmp_path / "cfg.json"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_randomized(self, tmp_path):
        rng = np.random.RandomState(50)
        for i in range(25):
            cfg = _random_config(rng)
            path = tmp_path / f"c{i}.json"
            save_config(cfg, path)
            assert load_config(path) == cfg

    def test_missing_field_reported(self, tmp_path):
        cfg = get_preset("example1").to_dict()
        del cfg["initial"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        with pytest.raises(ValueError, match="missing"):
            load_config(path)

    def test_invalid_json_reported(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="JSON"):
            load_config(path)


class TestTrajectoryCsv:
    def test_header_and_roundtrip(self, tmp_path):
        cfg, traj = run_preset("example1", stride=500)
        path = str(tmp_path / "t.csv")
        write_trajectory_csv(traj, path)
        with open(path) as fh:
            assert fh.readline().strip() == ",".join(CSV_HEADER)
        data = read_trajectory_csv(path)
        # 17 significant digits round-trip doubles exactly
        assert np.array_equal(data["t"], traj.t)
        assert np.array_equal(data["x"], traj.x)
        assert np.array_equal(data["V"], traj.v_lyap)
        assert np.array_equal(data["phase"], traj.phase_index)

    def test_byte_identical_across_runs(self, tmp_path):
        paths = []
        for i in range(2):
            cfg, traj = run_preset("example2", stride=1000)
            p = tmp_path / f"run{i}.csv"
            write_trajectory_csv(traj, str(p))
            paths.append(p.read_bytes())
        assert paths[0] == paths[1]

    def test_malformed_rows_named(self, tmp_path):
        good = tmp_path / "good.csv"
        good.write_text(",".join(CSV_HEADER) + "\n" + ",".join(["1"] * 10) + "\n")
        read_trajectory_csv(str(good))

        short = tmp_path / "short.csv"
        short.write_text(",".join(CSV_HEADER) + "\n1,2,3\n")
        with pytest.raises(ValueError, match="row 2"):
            read_trajectory_csv(str(short))

        alpha = tmp_path / "alpha.csv"
        alpha.write_text(",".join(CSV_HEADER) + "\n" + ",".join(["x"] * 10) + "\n")
        with pytest.raises(ValueError, match="row 2"):
            read_trajectory_csv(str(alpha))

    def test_header_only_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text(",".join(CSV_HEADER) + "\n")
        with pytest.raises(ValueError, match="no data rows"):
            read_trajectory_csv(str(p))


class TestCliSimulate:
    def test_preset_run_writes_csv_and_summary(self, tmp_path, capsys):
        out = str(tmp_path / "traj.csv")
        rc = main(["simulate", "--preset", "example1", "--stride", "200", "--out", out])
        assert rc == 0
        captured = capsys.readouterr().out
        assert "scenario: example1" in captured
        assert "desired outcome" in captured
        assert "p_hat range" in captured
        data = read_trajectory_csv(out)
        assert data["t"][0] == 0.0

    def test_config_file_run(self, tmp_path):
        cfgpath = tmp_path / "cfg.json"
        save_config(get_preset("example1"), cfgpath)
        out = str(tmp_path / "traj.csv")
        rc = main(["simulate", "--config", str(cfgpath), "--stride", "500", "--out", out])
        assert rc == 0

    def test_missing_scenario_is_usage_error(self, capsys):
        rc = main(["simulate"])
        assert rc == 1
        assert "preset" in capsys.readouterr().err

    def test_unknown_preset_exits_one(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--preset", "nope"])
        assert exc.value.code == 1

    def test_bad_step_is_numerical_failure(self, tmp_path, capsys):
        out = str(tmp_path / "t.csv")
        rc = main(["simulate", "--preset", "example1", "--step", "0.007",
                   "--out", out])
        assert rc == 2
        assert "does not divide" in capsys.readouterr().err

    def test_unwritable_path_exits_one(self, capsys):
        rc = main(["simulate", "--preset", "example1", "--stride", "1000",
                   "--out", "/nonexistent-dir/t.csv"])
        assert rc == 1


class TestCliRoa:
    def test_report_contents(self, capsys):
        rc = main(["roa", "--preset", "example1"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "Q = [[" in out
        assert "lambda_min(Q)" in out
        assert "k1" in out and "K =" in out
        assert "m =" in out and "c =" in out

    def test_unusable_estimate_is_informative_not_fatal(self, capsys):
        rc = main(["roa", "--preset", "example1", "--epsilon", "0.5"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "unusable" in out
        assert "not admissible" in out

    def test_unstable_reference_exits_two(self, tmp_path, capsys):
        cfg = get_preset("example1")
        from dataclasses import replace

        bad = replace(cfg, params=GameParams(r=0.4, alpha=0.5, beta=0.5,
                                             n_players=100, r_max=100.0,
                                             b_max=0.5, p_star=0.09))
        path = tmp_path / "bad.json"
        save_config(bad, path)
        rc = main(["roa", "--config", str(path)])
        assert rc == 2
        assert "r > e_c and p* > p_upper" in capsys.readouterr().err


class TestCliSweepAndPlot:
    def test_single_cell_sweep_matches_classifier(self, tmp_path, capsys):
        from commons_mrac import classify_regime

        out = tmp_path / "map.csv"
        rc = main(["sweep", "--r-min", "0.9", "--r-max", "0.9", "--r-count", "1",
                   "--pbeta-min", "0.1", "--pbeta-max", "0.1", "--pbeta-count", "1",
                   "--horizon", "2000", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "r,p_beta,label"
        r, pb, label = lines[1].split(",")
        params = get_preset("example1").params
        from dataclasses import replace

        expected = classify_regime(replace(params, r=0.9), 0.2, horizon=2000.0)
        assert label == expected.value

    def test_sweep_csv_deterministic_and_svg_written(self, tmp_path):
        args = ["sweep", "--r-min", "0.55", "--r-max", "0.95", "--r-count", "3",
                "--pbeta-min", "0.02", "--pbeta-max", "0.12", "--pbeta-count", "3",
                "--horizon", "1000"]
        out1, out2 = tmp_path / "m1.csv", tmp_path / "m2.csv"
        svg1 = tmp_path / "m1.svg"
        assert main(args + ["--out", str(out1), "--svg", str(svg1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert svg1.read_text().startswith("<svg")

    def test_plot_outputs_and_idempotence(self, tmp_path):
        csv_path = str(tmp_path / "traj.csv")
        assert main(["simulate", "--preset", "example1", "--stride", "200",
                     "--out", csv_path]) == 0
        prefix = str(tmp_path / "charts")
        assert main(["plot", "--in", csv_path, "--out", prefix]) == 0
        first = {}
        for suffix in ("_states.svg", "_errors.svg", "_inspection.svg"):
            first[suffix] = (tmp_path / f"charts{suffix}").read_bytes()
            assert first[suffix].startswith(b"<svg")
        assert main(["plot", "--in", csv_path, "--out", prefix]) == 0
        for suffix, content in first.items():
            assert (tmp_path / f"charts{suffix}").read_bytes() == content

    def test_plot_inspection_data_stays_in_unit_interval(self, tmp_path):
        csv_path = str(tmp_path / "traj.csv")
        assert main(["simulate", "--preset", "example1", "--stride", "100",
                     "--out", csv_path]) == 0
        data = read_trajectory_csv(csv_path)
        assert data["p_hat"].min() >= 0.0
        assert data["p_hat"].max() <= 1.0

    def test_plot_rejects_header_only_csv(self, tmp_path, capsys):
        p = tmp_path / "empty.csv"
        p.write_text(",".join(CSV_HEADER) + "\n")
        rc = main(["plot", "--in", str(p), "--out", str(tmp_path / "x")])
        assert rc == 1
        assert "no data rows" in capsys.readouterr().err


class TestCliExportConfig:
    def test_export_round_trips(self, tmp_path):
        out = tmp_path / "example2.json"
        assert main(["export-config", "--preset", "example2", "--out", str(out)]) == 0
        assert load_config(out) == get_preset("example2")
