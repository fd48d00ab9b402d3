"""Named, reproducible experiments driven by JSON configs.

Every runner writes its outputs plus ``manifest.json`` into the output
directory and returns the report dict.  Nothing time- or host-dependent is
written, so equal configs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .conditional import (
    POSITIVITY_FLOOR,
    PROBABILITY_FLOOR,
    GridJoint,
    WitnessFamily,
    certify_unphysical,
    displaced_number,
    fock_projector,
    negativity_summary,
    remote_conditioned_state,
)
from .fock import FockMixtureState, thermal_cutoff
from .gaussian import (
    HEISENBERG_TOL,
    GaussianState,
    attenuate,
    gaussian_steerable,
    make_product,
    make_tmsv,
    optimal_number_witness,
    schur_complement,
)
from .io import dump_json, load_field, save_field
from .phase_space import ModeLayout, PhaseGrid, sample_field
from .steering import CHAIN_TOL, REID_TOL, ChainViolation, homodyne_grid, reid_product, verify_variance_chain

__all__ = [
    "ConfigError",
    "ScenarioFailure",
    "ScenarioConfig",
    "build_state",
    "run_gaussian_steering_sweep",
    "run_counterexample_certificates",
    "run_remote_negativity",
    "run_chain_audit",
    "run_field_dump",
    "SCENARIOS",
]


class ConfigError(ValueError):
    """The scenario configuration is unreadable or out of range."""


class ScenarioFailure(AssertionError):
    """A scenario's built-in check did not hold."""


@dataclass
class ScenarioConfig:
    scenario: str
    state: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    witness_family: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    scan: dict = field(default_factory=dict)
    herald: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    out_dir: str = "out"
    seed: int = 0

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data, base=path.parent)

    @classmethod
    def from_dict(cls, data: dict, base=None) -> "ScenarioConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "scenario" not in data:
            raise ConfigError("config needs a 'scenario' entry")
        cfg = cls(**data)
        if base is not None and cfg.state.get("kind") == "field":
            p = Path(cfg.state.get("path", ""))
            if not p.is_absolute():
                cfg.state = {**cfg.state, "path": str(Path(base) / p)}
        return cfg

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def build_state(spec: dict):
    """State from a config entry.

    Kinds: ``tmsv`` (``r``, optional ``eta`` and ``party``), ``gaussian``
    (the JSON form of :class:`GaussianState`), ``product`` (``var_a``,
    ``var_b`` isotropic variances), ``fock_mixture`` (``t`` and optional
    ``cutoff``, or explicit ``weights``) and ``field`` (``path`` stem of a
    4D field file).
    """
    kind = spec.get("kind")
    try:
        if kind == "tmsv":
            r = float(spec.get("r", 0.5))
            state = make_tmsv(r)
            if "eta" in spec:
                state = attenuate(state, float(spec["eta"]), spec.get("party", "bob"))
            return state
        if kind == "gaussian":
            return GaussianState.from_dict(spec)
        if kind == "product":
            va, vb = float(spec.get("var_a", 1.0)), float(spec.get("var_b", 1.0))
            return make_product(va * np.eye(2), vb * np.eye(2))
        if kind == "fock_mixture":
            if "weights" in spec:
                return FockMixtureState.from_dict(spec)
            t = float(spec.get("t", 1.0))
            if not t > 0:
                raise ConfigError("thermal parameter t must be positive")
            return FockMixtureState.thermal(t, spec.get("cutoff"))
        if kind == "field":
            stem = Path(spec["path"])
            if not stem.with_suffix(".json").is_file():
                raise ConfigError(f"field header {stem.with_suffix('.json')} does not exist")
            return GridJoint(load_field(stem), ModeLayout(1, 1))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid state spec {spec}: {exc}") from exc
    raise ConfigError(f"unknown state kind {kind!r}")


def _herald(spec: dict):
    kind = spec.get("kind", "fock")
    if kind == "fock":
        m = int(spec.get("m", 1))
        if m < 0:
            raise ConfigError("herald photon number must be >= 0")
        return fock_projector(m, spec.get("displacement"))
    if kind == "number":
        return displaced_number(spec.get("f", [1.0, 0.0]), spec.get("displacement"))
    raise ConfigError(f"unknown herald kind {kind!r}")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _manifest(cfg: ScenarioConfig, out: Path, outputs: list, grid: dict, status: str) -> None:
    dump_json(
        {
            "scenario": cfg.scenario,
            # the output location is not part of the experiment
            "config": {k: v for k, v in cfg.to_dict().items() if k != "out_dir"},
            "library_version": __version__,
            "grid": grid,
            "tolerances": {
                "heisenberg": HEISENBERG_TOL,
                "reid": REID_TOL,
                "chain": CHAIN_TOL,
                "positivity_floor": POSITIVITY_FLOOR,
                "probability_floor": PROBABILITY_FLOOR,
            },
            "outputs": sorted(str(Path(p).name) for p in outputs),
            "status": status,
        },
        out / "manifest.json",
    )


def _out(cfg: ScenarioConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(cfg, out, outputs, grid, report, failures):
    status = "FAIL" if failures else "PASS"
    report["status"] = status
    report["failures"] = failures
    dump_json(report, out / "report.json")
    outputs = list(outputs) + [out / "report.json"]
    _manifest(cfg, out, outputs, grid, status)
    if failures:
        raise ScenarioFailure("; ".join(failures))
    return report


def run_gaussian_steering_sweep(cfg: ScenarioConfig) -> dict:
    """Sweep TMSV squeezing ``r`` or a loss ``eta`` and tabulate the Gaussian
    steering defect, optimal number witness, certification and Reid product."""
    sw = cfg.sweep or {"param": "r", "values": [0.0, 0.25, 0.5, 1.0]}
    param = sw.get("param", "r")
    if param not in ("r", "eta"):
        raise ConfigError("sweep param must be 'r' or 'eta'")
    if "values" in sw:
        values = [float(v) for v in sw["values"]]
    else:
        n = int(sw.get("n_points", 20))
        lo, hi = sw.get("range", [0.0, 1.0])
        values = np.linspace(float(lo), float(hi), n).tolist()
    if param == "eta" and any(not 0 <= v <= 1 for v in values):
        raise ConfigError("transmissivities must lie in [0, 1]")
    if param == "r" and any(not np.isfinite(v) or v < 0 for v in values):
        raise ConfigError("squeezing values must be finite and nonnegative")
    grid = {"n": int(cfg.grid.get("n", 48)), "half_width": cfg.grid.get("half_width")}
    family = WitnessFamily.from_dict(cfg.witness_family) if cfg.witness_family else WitnessFamily()
    rows = []
    for v in values:
        if param == "r":
            state = make_tmsv(v)
        else:
            state = attenuate(make_tmsv(float(sw.get("r", 0.7))), v, sw.get("party", "alice"))
        flag, defect = gaussian_steerable(state)
        _, wvalue = optimal_number_witness(schur_complement(state))
        cert = certify_unphysical(state, state.mean_a, family)
        hg = homodyne_grid(state, n=grid["n"], half_width=grid["half_width"])
        prod, reid = reid_product(state, hg=hg)
        rows.append([v, defect, wvalue, prod, flag, cert is not None, reid])
    out = _out(cfg)
    header = [param, "heisenberg_defect", "optimal_witness_value", "reid_product",
              "steer_flag", "certificate_found", "reid_flag"]
    _write_csv(out / "sweep.csv", header, rows)

    failures = []
    flags = np.array([[r[4], r[5], r[6]] for r in rows], dtype=bool)
    if not (np.all(flags[:, 0] == flags[:, 1]) and np.all(flags[:, 0] == flags[:, 2])):
        failures.append("steering flag, certificate and Reid flag disagree")
    if param == "r":
        d = np.array([r[1] for r in rows])
        order = np.argsort(values)
        if np.any(np.diff(d[order]) > 1e-12):
            failures.append("Heisenberg defect is not monotone in r")
    flips = [values[i] for i in range(1, len(rows)) if rows[i][4] != rows[i - 1][4]]
    bracket = None
    if flips:
        i = next(i for i in range(1, len(rows)) if rows[i][4] != rows[i - 1][4])
        bracket = [values[i - 1], values[i]]
    report = {"param": param, "n_rows": len(rows), "flip_bracket": bracket, "n_flips": len(flips)}
    return _finish(cfg, out, [out / "sweep.csv"], grid, report, failures)


def run_counterexample_certificates(cfg: ScenarioConfig) -> dict:
    """Certify the Fock-pair mixture at every point of an ``x_A`` grid and
    check that Reid's criterion does not fire."""
    spec = cfg.state or {"kind": "fock_mixture", "t": 1.0}
    family = WitnessFamily.from_dict(cfg.witness_family) if cfg.witness_family else WitnessFamily()
    if spec.get("kind") == "fock_mixture" and "weights" not in spec and "cutoff" not in spec:
        # far points need levels up to the family's reach, beyond the tail-mass default
        t = float(spec.get("t", 1.0))
        if t > 0:
            spec = {**spec, "cutoff": max(thermal_cutoff(t), family.max_fock)}
    state = build_state(spec)
    if not isinstance(state, FockMixtureState):
        raise ConfigError("counterexample scenario needs a fock_mixture state")
    scan = {"half_width": 4.0, "n": 21, "random_points": 0, **cfg.scan}
    if int(scan["n"]) < 1 or float(scan["half_width"]) <= 0:
        raise ConfigError("scan needs n >= 1 and a positive half_width")
    axis = np.linspace(-float(scan["half_width"]), float(scan["half_width"]), int(scan["n"]))
    pts = [(q, p) for q in axis for p in axis]
    rng = np.random.default_rng(cfg.seed)
    k = int(scan["random_points"])
    if k:
        extra = rng.uniform(-float(scan["half_width"]), float(scan["half_width"]), size=(k, 2))
        pts.extend(map(tuple, extra))
    rows, missed = [], 0
    for q, p in pts:
        cert = certify_unphysical(state, np.array([q, p]), family)
        if cert is None:
            missed += 1
            rows.append([q, p, None, None, None, None])
        else:
            m = cert.witness.m if cert.witness.kind == "fock" else None
            rows.append([q, p, cert.witness.label(), m, cert.value, cert.error_bound])
    out = _out(cfg)
    _write_csv(out / "certificates.csv", ["q_a", "p_a", "witness", "m", "value", "error_bound"], rows)

    grid = {"n": int(cfg.grid.get("n", 48)), "half_width": cfg.grid.get("half_width")}
    hg = homodyne_grid(state, n=grid["n"], half_width=grid["half_width"])
    chain = verify_variance_chain(state, hg=hg)
    origin = certify_unphysical(state, np.zeros(2), family)
    coverage = 1.0 - missed / len(pts)
    report = {
        "state": state.to_dict() | {"tail_mass": state.tail_mass},
        "separable": True,
        "n_points": len(pts),
        "certified": len(pts) - missed,
        "coverage": coverage,
        "max_certificate_m": max((r[3] for r in rows if r[3] is not None), default=None),
        "origin_certificate": None if origin is None else origin.to_dict(),
        "reid": chain.to_dict(),
    }
    failures = []
    if missed:
        failures.append(f"{missed} of {len(pts)} points lack a certificate")
    if chain.flag:
        failures.append("Reid's criterion fired on a separable state")
    return _finish(cfg, out, [out / "certificates.csv"], grid, report, failures)


def _alice_grid(cfg, state) -> PhaseGrid:
    n = int(cfg.grid.get("n", 64))
    L = cfg.grid.get("half_width")
    L = float(L) if L is not None else 6.0 * state.max_std()
    # half-step shift puts the origin on a grid node
    h = 2 * L / n
    return PhaseGrid(L, n, 2, (h / 2, h / 2))


def run_remote_negativity(cfg: ScenarioConfig) -> dict:
    """Herald Alice on Bob's outcome operator and export her Wigner function."""
    spec = cfg.state or {"kind": "fock_mixture", "t": 1.0}
    state = build_state(spec)
    witness = _herald(cfg.herald or {"kind": "fock", "m": 1})
    grid_a = None if isinstance(state, GridJoint) else _alice_grid(cfg, state)
    res = remote_conditioned_state(state, witness, grid_a=grid_a, method=cfg.output.get("method", "grid"))
    out = _out(cfg)
    fmt = cfg.output.get("field_format", "csv")
    files = save_field(res.field, out / "alice_field", fmt=fmt)
    summary = negativity_summary(res.field)
    g = res.field.grid
    report = {
        "success_probability": res.success_probability,
        "herald": witness.to_dict(),
        **summary,
        "normalization": float(np.sum(res.field.values) * g.cell_volume),
    }
    grid = {"n": g.n, "half_width": g.half_width, "center": list(g.center)}
    return _finish(cfg, out, files, grid, report, [])


def run_chain_audit(cfg: ScenarioConfig) -> dict:
    """Homodyne conditional variances versus averaged conditional-Wigner variances."""
    state = build_state(cfg.state or {"kind": "tmsv", "r": 0.5})
    grid = {"n": int(cfg.grid.get("n", 48)), "half_width": cfg.grid.get("half_width")}
    g = cfg.output.get("g")
    f = cfg.output.get("f")
    out = _out(cfg)
    failures = []
    try:
        hg = homodyne_grid(state, g, f, n=grid["n"], half_width=grid["half_width"])
        chain = verify_variance_chain(state, g, f, hg=hg)
        report = chain.to_dict()
        report["chain_holds"] = True
        if chain.var_c_q * chain.var_c_p < 1.0 - REID_TOL and chain.witness_point is None:
            failures.append("Var_c product below one but no witness point found")
    except ChainViolation as exc:
        report = {"chain_holds": False, "error": str(exc)}
        failures.append(str(exc))
    return _finish(cfg, out, [], grid, report, failures)


def run_field_dump(cfg: ScenarioConfig) -> dict:
    """Sample a state's joint, Alice or Bob Wigner function onto a grid file."""
    state = build_state(cfg.state or {"kind": "tmsv", "r": 0.5})
    which = cfg.output.get("which", "alice")
    if isinstance(state, GridJoint):
        raise ConfigError("field-dump needs an analytic state")
    if which == "joint":
        n = int(cfg.grid.get("n", 32))
        L = float(cfg.grid.get("half_width") or 6.0 * state.max_std())
        g = PhaseGrid(L, n, 4)
        fld = sample_field(state, g, 2)
    elif which in ("alice", "bob"):
        g = _alice_grid(cfg, state)
        fn = state.alice_wigner if which == "alice" else state.bob_wigner
        fld = sample_field(fn, g, 1)
    else:
        raise ConfigError("output.which must be alice, bob or joint")
    out = _out(cfg)
    files = save_field(fld, out / f"{which}_field", fmt=cfg.output.get("field_format", "csv"),
                       layout=ModeLayout(1, 1) if which == "joint" else None)
    report = {"which": which, **negativity_summary(fld), "integral": float(np.sum(fld.values) * g.cell_volume)}
    return _finish(cfg, out, files, {"n": g.n, "half_width": g.half_width, "center": list(g.center)}, report, [])


SCENARIOS = {
    "steer-sweep": run_gaussian_steering_sweep,
    "counterexample": run_counterexample_certificates,
    "remote-negativity": run_remote_negativity,
    "chain-audit": run_chain_audit,
    "field-dump": run_field_dump,
}
