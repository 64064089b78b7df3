"""Built-in scenarios: three inspection-dropout-and-recovery protocols.

Each preset runs the reference at the preset inspection intensity from t=0
while the plant goes through three phases: inspection at the preset value,
an unannounced drop to a lower intensity, then adaptive recovery.  Initial
conditions start both systems close to the target equilibrium so the first
phase settles well inside the convergence tolerance before the drop; the
model itself never prescribes starting points, and mid-box starts need far
longer than the first phase to settle through the slow strategy mode.

The adaptation rates are tuned per scenario.  The third scenario drops
inspection so far that cooperation collapses to numerical extinction
(x ~ 1e-13 by the time adaptation starts); because the learning signal is
proportional to x(1-x), recovery needs a large rate combined with the [0, 1]
projection of the intensity, and the recovered intensity saturates at 1.
"""

from __future__ import annotations

from .config import ScenarioConfig
from .game import GameParams
from .simulate import AdaptiveInspection, FixedInspection, Phase, Schedule

__all__ = ["example1", "example2", "example3", "PRESETS", "get_preset"]


def example1() -> ScenarioConfig:
    """Moderately growing pool (e_c < r < e_d): inspection drops from 0.09
    to 0.07 at t=1000, adaptation recovers from t=3000."""
    params = GameParams(r=0.6, alpha=0.5, beta=0.5, n_players=100,
                        r_max=100.0, b_max=0.5, p_star=0.09)
    schedule = Schedule((
        Phase(0.0, 1000.0, FixedInspection(0.09)),
        Phase(1000.0, 3000.0, FixedInspection(0.07)),
        Phase(3000.0, 5000.0, AdaptiveInspection(adapt_rate=1e-5)),
    ))
    return ScenarioConfig(
        name="example1", params=params, schedule=schedule,
        x0=0.99, y0=17.0, xm0=0.99, ym0=17.0, p_hat0=0.09,
        epsilon=1e-5,
    )


def example2() -> ScenarioConfig:
    """Fast growing pool (r > e_d): inspection drops from 0.2 to 0.17 at
    t=1000, adaptation recovers from t=4000."""
    params = GameParams(r=0.8, alpha=0.5, beta=0.5, n_players=100,
                        r_max=100.0, b_max=0.5, p_star=0.2)
    schedule = Schedule((
        Phase(0.0, 1000.0, FixedInspection(0.2)),
        Phase(1000.0, 4000.0, FixedInspection(0.17)),
        Phase(4000.0, 6000.0, AdaptiveInspection(adapt_rate=1e-4)),
    ))
    return ScenarioConfig(
        name="example2", params=params, schedule=schedule,
        x0=0.99, y0=37.0, xm0=0.99, ym0=37.0, p_hat0=0.2,
        epsilon=1e-5,
    )


def example3() -> ScenarioConfig:
    """Fast growing pool with a near-total inspection collapse (0.2 to
    0.002 at t=1000): cooperators die out and the stock falls toward the
    all-defector level before adaptation starts at t=3000."""
    params = GameParams(r=0.8, alpha=0.5, beta=0.5, n_players=100,
                        r_max=100.0, b_max=0.5, p_star=0.2)
    schedule = Schedule((
        Phase(0.0, 1000.0, FixedInspection(0.2)),
        Phase(1000.0, 3000.0, FixedInspection(0.002)),
        Phase(3000.0, 5000.0, AdaptiveInspection(adapt_rate=1e5)),
    ))
    return ScenarioConfig(
        name="example3", params=params, schedule=schedule,
        x0=0.99, y0=37.0, xm0=0.99, ym0=37.0, p_hat0=0.2,
        epsilon=1e-5, clamp_p=True,
    )


PRESETS = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
}


def get_preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
