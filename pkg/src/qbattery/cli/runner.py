"""Turn a RunConfig into a table of numbers, and tables into files."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..energetics import ergotropy_single_cell, ergotropy_two_cell_batch, ergotropy_two_level
from ..errors import ValidationError
from ..markov import MarkovParams, basis_state, build_generator, evolve_series, single_excitation_state
from ..nonmarkov import CouplingSplit, LorentzianBath, evolve_amplitudes, subradiant_initial_amplitudes
from ..qcore import HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL
from .config import SCHEMA_VERSION, RunConfig, parse_complex, set_path

TOLERANCES = {
    "hermiticity": HERMITICITY_TOL,
    "trace": TRACE_TOL,
    "positivity": POSITIVITY_TOL,
}


@dataclass
class NonMarkovModel:
    bath: LorentzianBath
    split: CouplingSplit
    initial: tuple[complex, complex]
    omega0: float


@dataclass
class MarkovModel:
    params: MarkovParams
    rho0: np.ndarray
    step: float | None
    two_cell: bool


@dataclass
class Table:
    columns: list[str]
    rows: np.ndarray
    step: float | None = None


def _float(params: dict, key: str, default=None) -> float:
    v = params.get(key, default)
    if v is None:
        raise ValidationError(f"parameter {key!r} is required")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"parameter {key!r} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ValidationError(f"parameter {key!r} must be finite")
    return float(v)


def _nonmarkov_initial(init, split: CouplingSplit) -> tuple[complex, complex]:
    if not isinstance(init, dict):
        raise ValidationError("initial must be an object")
    if "alpha_minus" in init:
        return subradiant_initial_amplitudes(split, _float(init, "alpha_minus"))
    if "nu01" in init and "nu02" in init:
        nu01, nu02 = parse_complex(init["nu01"]), parse_complex(init["nu02"])
        if abs(abs(nu01) ** 2 + abs(nu02) ** 2 - 1.0) > 1e-12:
            raise ValidationError("initial amplitudes must satisfy |nu01|^2 + |nu02|^2 = 1")
        return nu01, nu02
    raise ValidationError("nonmarkov initial needs {nu01, nu02} or {alpha_minus}")


def _markov_initial(init) -> np.ndarray:
    if not isinstance(init, dict):
        raise ValidationError("initial must be an object")
    if "basis" in init:
        idx = init["basis"]
        if isinstance(idx, bool) or not isinstance(idx, int):
            raise ValidationError(f"basis index must be an integer 1..4, got {idx!r}")
        return basis_state(idx).matrix
    if "alpha_minus" in init:
        return single_excitation_state(_float(init, "c1"), _float(init, "alpha_minus")).matrix
    raise ValidationError("markov initial needs {basis} or {c1, alpha_minus}")


def build_model(cfg: RunConfig) -> NonMarkovModel | MarkovModel:
    p = cfg.parameters
    if not isinstance(p, dict):
        raise ValidationError("parameters must be an object")
    if cfg.scenario == "nonmarkov":
        bath = LorentzianBath.from_ratio(_float(p, "ratio"), _float(p, "lam", 1.0))
        split = CouplingSplit.from_c1(_float(p, "c1"))
        init = _nonmarkov_initial(p.get("initial", {"nu01": 1, "nu02": 0}), split)
        return NonMarkovModel(bath, split, init, _float(p, "omega0", 1.0))
    tau = p.get("tau")
    params = MarkovParams(
        Omega=_float(p, "Omega", 0.0),
        Gamma=_float(p, "Gamma", 0.0),
        gamma_c=_float(p, "gamma_c", 0.0),
        l1=_float(p, "l1", 0.0),
        l2=_float(p, "l2", 0.0),
        omega0=_float(p, "omega0", 1.0),
        omegaL=_float(p, "omegaL", 1.0),
        tau=None if tau is None else _float(p, "tau"),
    )
    step = p.get("step")
    if step is not None:
        step = _float(p, "step")
        if step <= 0:
            raise ValidationError("step must be positive")
    rho0 = _markov_initial(p.get("initial", {"basis": 2}))
    return MarkovModel(params, rho0, step, cfg.scenario == "markov_two_cell")


def compute(cfg: RunConfig) -> Table:
    model = build_model(cfg)
    t = cfg.times()
    if isinstance(model, NonMarkovModel):
        return _compute_nonmarkov(cfg, model, t)
    return _compute_markov(cfg, model, t)


def _compute_nonmarkov(cfg: RunConfig, m: NonMarkovModel, t: np.ndarray) -> Table:
    st = evolve_amplitudes(m.split, m.initial, m.bath, t)
    p1, p2 = st.p_charger, st.p_battery
    p1_0, p2_0 = abs(m.initial[0]) ** 2, abs(m.initial[1]) ** 2
    cols: dict[str, np.ndarray] = {"tau": t}
    if "dEA" in cfg.outputs:
        cols["dEA_abs"] = m.omega0 * np.abs(p1 - p1_0)
    if "dEB" in cfg.outputs:
        cols["dEB"] = m.omega0 * (p2 - p2_0)
    if "ergotropy" in cfg.outputs:
        w = ergotropy_two_level(np.clip(p2, 0.0, 1.0), m.omega0)
        cols["ergotropy"] = w
        cols["ergotropy_norm"] = w / m.omega0
    if "populations" in cfg.outputs:
        cols["p_charger"] = p1
        cols["p_battery"] = p2
    return Table(list(cols), np.column_stack(list(cols.values())))


def _compute_markov(cfg: RunConfig, m: MarkovModel, t: np.ndarray) -> Table:
    gen = build_generator(m.params)
    step = m.step if m.step is not None else gen.default_step()
    states = evolve_series(gen, m.rho0, t, step)
    w0 = m.params.omega0
    pops = np.real(np.diagonal(states, axis1=1, axis2=2))
    pops0 = np.real(np.diagonal(m.rho0))
    cols: dict[str, np.ndarray] = {"tau": t}
    if "dEA" in cfg.outputs:
        cols["dEA_abs"] = w0 * np.abs((pops[:, 0] + pops[:, 1]) - (pops0[0] + pops0[1]))
    if "dEB" in cfg.outputs:
        cols["dEB"] = w0 * ((pops[:, 0] + pops[:, 2]) - (pops0[0] + pops0[2]))
    if "ergotropy" in cfg.outputs:
        if m.two_cell:
            w = ergotropy_two_cell_batch(states, w0)
            w_max = 2.0 * w0
        else:
            w = np.array([ergotropy_single_cell(r, w0) for r in states])
            w_max = w0
        cols["ergotropy"] = w
        cols["ergotropy_norm"] = w / w_max
    if "populations" in cfg.outputs:
        for i in range(4):
            cols[f"rho{i + 1}{i + 1}"] = pops[:, i]
        cols["battery_coherence"] = np.abs(states[:, 0, 1] + states[:, 2, 3])
    return Table(list(cols), np.column_stack(list(cols.values())), step)


# --- files ----------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".12g")


def csv_text(columns: list[str], rows: np.ndarray) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_csv(path: Path, table: Table) -> None:
    _atomic_write(path, csv_text(table.columns, table.rows))


def manifest(name: str, configs: list[RunConfig], tables: list[Table], files: list[str]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "preset": name,
        "tolerances": dict(TOLERANCES),
        "curves": [
            {
                "label": c.label,
                "csv": f,
                "config": c.to_dict(),
                "integrator": {"method": "rk4-fixed" if t.step is not None else "closed-form",
                               "step": t.step},
                "rows": int(t.rows.shape[0]),
            }
            for c, t, f in zip(configs, tables, files)
        ],
    }


def run_configs(name: str, configs: list[RunConfig], outdir: str | Path) -> dict:
    """Compute every curve, then write CSVs and ``manifest.json`` into ``outdir``."""
    outdir = Path(outdir)
    labels = [c.label for c in configs]
    if len(set(labels)) != len(labels):
        raise ValidationError(f"curve labels must be unique, got {labels}")
    tables = [compute(c) for c in configs]
    files = [f"{c.label}.csv" for c in configs]
    for f, t in zip(files, tables):
        write_csv(outdir / f, t)
    man = manifest(name, configs, tables, files)
    _atomic_write(outdir / "manifest.json", json.dumps(man, indent=2, sort_keys=True) + "\n")
    return man


def configs_from_document(doc: dict) -> tuple[str, list[RunConfig]]:
    """Accept either a single RunConfig document or a manifest."""
    if isinstance(doc, dict) and "curves" in doc:
        cfgs = [RunConfig.from_dict(c["config"]) for c in doc["curves"]]
        return str(doc.get("preset", "run")), cfgs
    cfg = RunConfig.from_dict(doc)
    return cfg.label, [cfg]


def run_sweep(base: dict, path: str, values: list, out_csv: str | Path) -> Table:
    """One row per (sweep value, grid point). Nothing is written if any value fails."""
    if not values:
        raise ValidationError("sweep values list is empty")
    configs = []
    errors = []
    for i, v in enumerate(values):
        try:
            configs.append(RunConfig.from_dict(set_path(base, path, v)))
        except ValidationError as exc:
            errors.append(f"value #{i} ({v!r}): {exc}")
    if errors:
        raise ValidationError("invalid sweep values:\n  " + "\n  ".join(errors))
    tables = [compute(c) for c in configs]
    columns = ["sweep_value"] + tables[0].columns
    blocks = [
        np.column_stack([np.full(t.rows.shape[0], float(v)), t.rows])
        for v, t in zip(values, tables)
    ]
    table = Table(columns, np.vstack(blocks), tables[0].step)
    write_csv(Path(out_csv), table)
    return table
