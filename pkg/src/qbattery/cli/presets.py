"""Named figure presets.

Time axes: the non-Markovian figures use lambda*tau (lam = 1), the single-cell
figures Omega*tau (Omega = 1) and the two-cell figures l*tau (l = 1).

Grid choices, since the figures do not state their sampling:

* fig2a: lambda*tau in [0, 0.05], 1001 points, i.e. about 125 points per
  kernel oscillation at R/lambda = 500;
* fig2b, fig2c, fig3a and the fig3b main panel: [0, 2] or [0, 20] with 1001
  points (step 0.002 around the first R/lambda = 30 trough);
* fig3b inset: the long-time limit on [0, 50] with 10001 points (step
  0.005), about 40 points per kernel oscillation at R/lambda = 30, so the
  first peak is resolved as well;
* fig4: Omega*tau in [0, 10]; fig5: l*tau in [0, 20]; 1001 points each.
"""

from __future__ import annotations

import math

from ..errors import ValidationError
from .config import OUTPUTS, RunConfig

SQ2 = 1.0 / math.sqrt(2.0)
SQ3 = math.sqrt(3.0) / 2.0

PRESET_NAMES = ("fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b")

# (label, Gamma, Omega, gamma_c) in units of l, in legend order
FIG5_CURVES = (
    ("lossless", 0.0, 0.0, 0.0),
    ("intermediate", 1.0, 1.0, 1.0),
    ("separated", 0.1, 0.0, 0.0),
    ("G0.1_O0.01", 0.1, 0.01, 0.09),
    ("G0.1_O0.5", 0.1, 0.5, 0.09),
    ("G5_O0.5", 5.0, 0.5, 4.5),
    ("G5_O25", 5.0, 25.0, 4.5),
)

# (label, c1, alpha_minus) in legend order
FIG3B_CURVES = (
    ("c0.866_a0.866", SQ3, SQ3),
    ("c0.707_a0.707", SQ2, SQ2),
    ("c0.707_a0.92", SQ2, 0.92),
    ("c0.866_a0.5", SQ3, 0.5),
    ("c0.707_a0.2", SQ2, 0.2),
)


def _nonmarkov(label, ratio, t_max, initial=None, c1=SQ2, n=1001) -> RunConfig:
    return RunConfig(
        scenario="nonmarkov",
        label=label,
        parameters={"lam": 1.0, "ratio": ratio, "c1": c1,
                    "initial": initial or {"nu01": 1, "nu02": 0}},
        t_min=0.0,
        t_max=t_max,
        n_points=n,
        outputs=list(OUTPUTS),
    )


def _fig4(initial: dict) -> list[RunConfig]:
    out = []
    for g in (0.5, 0.1, 0.01):
        out.append(RunConfig(
            scenario="markov_single_cell",
            label=f"Gamma{g:g}",
            parameters={"Omega": 1.0, "Gamma": g, "gamma_c": 0.9 * g, "l1": 0.0, "l2": 0.0,
                        "omega0": 1.0, "omegaL": 1.0, "initial": initial},
            t_min=0.0, t_max=10.0, n_points=1001, outputs=list(OUTPUTS),
        ))
    return out


def _fig5(initial: dict) -> list[RunConfig]:
    return [
        RunConfig(
            scenario="markov_two_cell",
            label=label,
            parameters={"Omega": omega, "Gamma": gamma, "gamma_c": gc, "l1": 1.0, "l2": 1.0,
                        "omega0": 1.0, "omegaL": 1.0, "initial": initial},
            t_min=0.0, t_max=20.0, n_points=1001, outputs=list(OUTPUTS),
        )
        for label, gamma, omega, gc in FIG5_CURVES
    ]


def preset(name: str) -> list[RunConfig]:
    """RunConfigs (one per curve) reproducing the named figure."""
    if name == "fig2a":
        return [_nonmarkov("R500", 500.0, 0.05)]
    if name == "fig2b":
        return [_nonmarkov("R30", 30.0, 2.0)]
    if name == "fig2c":
        return [_nonmarkov("R0.3", 0.3, 20.0)]
    if name == "fig3a":
        return [_nonmarkov("R30", 30.0, 2.0), _nonmarkov("R0.3", 0.3, 2.0)]
    if name == "fig3b":
        main = [_nonmarkov(lab, 30.0, 2.0, {"alpha_minus": a}, c1=c) for lab, c, a in FIG3B_CURVES]
        inset = [_nonmarkov(f"inset_{lab}", 30.0, 50.0, {"alpha_minus": a}, c1=c, n=10001)
                 for lab, c, a in FIG3B_CURVES]
        return main + inset
    if name == "fig4a":
        return _fig4({"basis": 2})
    if name == "fig4b":
        return _fig4({"c1": SQ3, "alpha_minus": SQ3})
    if name == "fig5a":
        return _fig5({"basis": 4})
    if name == "fig5b":
        return _fig5({"c1": SQ2, "alpha_minus": 1.0})
    raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


AXES = {
    "fig2": ("λτ", "|ΔE|/ω0", ("dEA_abs", "dEB")),
    "fig3": ("λτ", "W/W_max", ("ergotropy_norm",)),
    "fig4": ("Ωτ", "W/W_max", ("ergotropy_norm",)),
    "fig5": ("lτ", "W/W_max", ("ergotropy_norm",)),
}


def axes_for(name: str) -> tuple[str, str, tuple[str, ...]]:
    if name not in PRESET_NAMES:
        raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return AXES[name[:4]]
