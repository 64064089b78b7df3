"""Scenario configuration and its on-disk JSON form.

The file format is a single JSON document (see docs/config_format.md for the
schema).  Floats survive a save/load round trip bit-exactly: json emits the
shortest representation that parses back to the same double.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .game import GameParams
from .simulate import AdaptiveInspection, FixedInspection, Phase, Schedule

__all__ = ["ScenarioConfig", "load_config", "save_config"]


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one simulation run."""

    name: str
    params: GameParams
    schedule: Schedule
    x0: float
    y0: float
    xm0: float
    ym0: float
    p_hat0: float
    step: float = 0.01
    stride: int = 10
    epsilon: float = 0.1
    error_bound: float = 1.0
    clamp_p: bool = False

    @property
    def horizon(self) -> float:
        return self.schedule.t_end

    def to_dict(self) -> dict:
        phases = []
        for ph in self.schedule.phases:
            entry: dict = {"t_start": ph.t_start, "t_end": ph.t_end}
            if isinstance(ph.mode, FixedInspection):
                entry["mode"] = "fixed"
                entry["p_hat"] = ph.mode.p_hat
            else:
                entry["mode"] = "adaptive"
                entry["adapt_rate"] = ph.mode.adapt_rate
            phases.append(entry)
        p = self.params
        return {
            "name": self.name,
            "params": {
                "r": p.r,
                "alpha": p.alpha,
                "beta": p.beta,
                "n_players": p.n_players,
                "r_max": p.r_max,
                "b_max": p.b_max,
                "p_star": p.p_star,
            },
            "initial": {
                "x": self.x0,
                "y": self.y0,
                "x_m": self.xm0,
                "y_m": self.ym0,
                "p_hat": self.p_hat0,
            },
            "schedule": phases,
            "integrator": {"step": self.step, "stride": self.stride},
            "controller": {
                "epsilon": self.epsilon,
                "error_bound": self.error_bound,
                "clamp_p": self.clamp_p,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        try:
            params = GameParams(**data["params"])
            phases = []
            for entry in data["schedule"]:
                if entry["mode"] == "fixed":
                    mode = FixedInspection(p_hat=entry["p_hat"])
                elif entry["mode"] == "adaptive":
                    mode = AdaptiveInspection(adapt_rate=entry["adapt_rate"])
                else:
                    raise ValueError(f"unknown phase mode {entry['mode']!r}")
                phases.append(Phase(entry["t_start"], entry["t_end"], mode))
            init = data["initial"]
            integ = data.get("integrator", {})
            ctrl = data.get("controller", {})
            return cls(
                name=data.get("name", "scenario"),
                params=params,
                schedule=Schedule(tuple(phases)),
                x0=init["x"],
                y0=init["y"],
                xm0=init["x_m"],
                ym0=init["y_m"],
                p_hat0=init["p_hat"],
                step=integ.get("step", 0.01),
                stride=integ.get("stride", 10),
                epsilon=ctrl.get("epsilon", 0.1),
                error_bound=ctrl.get("error_bound", 1.0),
                clamp_p=ctrl.get("clamp_p", False),
            )
        except KeyError as exc:
            raise ValueError(f"config is missing required field {exc}") from exc


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n")


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc}") from exc
    return ScenarioConfig.from_dict(data)
