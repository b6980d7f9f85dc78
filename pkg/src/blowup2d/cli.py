"""Experiment runner: configuration, orchestration, manifests, tables.

Subcommands
-----------
``verify``
    Analytic-identity suites (stationary residual, eigenpairs, projector
    calibration, ellipse mass, 1-D integral table, Hardy/Sobolev trace
    ratios).  Writes ``scorecard.json``; exit status 0 iff every suite
    passes at its recorded tolerance.
``simulate``
    Physical-space blow-up run from four-soliton data: field dumps, the
    crossing-surface table and report, soliton-loosing timelines on the
    fitted surface, and ansatz residuals at a probe point.
``shoot``
    Seed search for the trapped trajectory.  Reduced model by default;
    ``--pde`` switches to the solver-driven variant, ``--scan`` emits the
    exit-side map over 41 seeds plus decimated trajectories for fans.
``timeline``
    Soliton-loosing timelines on the model surface T(x) = -x1, without a
    solver run.
``surface``
    Crossing-surface analysis from a saved freeze-time dump (``field``
    config key) or from a synthetic model surface.

Every run directory receives ``manifest.json`` recording the command, the
full configuration, the derived constants, package versions, wall time
and the list of files written.  All tabular outputs are CSV (UTF-8,
header row, '.' decimal) and are byte-identical across reruns with the
same configuration and seed; binary dumps use the sidecar format of
:func:`blowup2d.funcspace.save_field`.

Configuration files are flat ``KEY = value`` text: one pair per line,
``#`` starts a comment, unknown keys are rejected before any compute.
Values on the command line (``--out``, ``--seed``, ``--threads``)
override the file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import pathlib
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from types import SimpleNamespace

import numpy as np
import scipy

from . import __version__
from .constants import derive_constants
from .dynamics import (
    Forcing, exit_time, flow_phi, pde_exit_time, pde_shoot, seed_interval,
    shoot, trap_norm,
)
from .errors import DomainError, NumericsError
from .funcspace import (
    DiskGrid, integral_table, load_field, save_field, table_regime,
    write_csv,
)
from .similarity import (
    TIMELINE_HEADER, residual_1, residual_2, residual_4, timeline_rows,
)
from .solitons import ellipse_mass, ellipse_mass_closed
from .spectral import (
    EigenSet, linearized_apply, project, stationary_residual,
)
from .surface import (
    POINT_HEADER, bisectrix_derivatives, classify, fit_flatness, from_model,
    from_run, lipschitz_check, margin_report, point_table, pyramid_check,
)
from .wavesolver import build_initial_data, evolve, extract_w


# -- configuration -----------------------------------------------------------

DEFAULTS = {
    # model constants
    "p": 3.0, "cbar": 1.0, "delta": 1.0,
    # shooting / data construction
    "s0": 3.0, "nu0": -0.0712, "bracket": "", "horizon": 0.0, "tol": 0.0,
    "forcing": "constant", "amp_nu": 0.0, "amp_xi": 0.0, "amp_q": 0.0,
    "period": 50.0,
    # similarity-disk grid
    "n_r": 48, "n_theta": 96,
    # physical solver
    "N": 256, "L": 2.0, "cfl": 0.45, "u_max": 1e6, "t_end": 0.1,
    # surface analysis
    "x_max": 0.5, "field": "", "model": "pyramid",
    # timelines
    "a_values": "1.2,2.0,5.0",
    # bookkeeping
    "out": "runs", "seed": 0,
}

_INT_KEYS = frozenset({"n_r", "n_theta", "N", "seed"})
_STR_KEYS = frozenset({"bracket", "forcing", "field", "model", "a_values",
                       "out"})


def read_config(path):
    """Parse a flat ``KEY = value`` file into a full config dict.

    Missing keys take their defaults; unknown keys, repeated keys and
    unparseable values raise :class:`DomainError` (nothing is computed
    from a config that does not validate).
    """
    cfg = dict(DEFAULTS)
    seen = set()
    text = pathlib.Path(path).read_text(encoding="utf-8")
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{ln}: expected KEY = value, got "
                              f"{raw.strip()!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in DEFAULTS:
            raise DomainError(f"{path}:{ln}: unknown config key {key!r}")
        if key in seen:
            raise DomainError(f"{path}:{ln}: repeated config key {key!r}")
        seen.add(key)
        try:
            if key in _STR_KEYS:
                cfg[key] = val
            elif key in _INT_KEYS:
                cfg[key] = int(val)
            else:
                cfg[key] = float(val)
        except ValueError as exc:
            raise DomainError(f"{path}:{ln}: bad value for {key!r}: {exc}")
    return cfg


def _parse_floats(text, key):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise DomainError(f"config key {key!r}: {exc}")


def check_config(cfg):
    """Validate every field against module preconditions; return Constants.

    The whole config is checked regardless of which command runs, so a
    malformed file fails identically everywhere, before any compute.
    """
    c = derive_constants(cfg["p"], cfg["cbar"], cfg["delta"])
    if cfg["s0"] <= 0.0:
        raise DomainError(f"s0 must be positive, got {cfg['s0']}")
    if cfg["horizon"] != 0.0 and cfg["horizon"] <= cfg["s0"]:
        raise DomainError("horizon must exceed s0 (or be 0 for the "
                          f"per-command default), got {cfg['horizon']}")
    if cfg["tol"] < 0.0:
        raise DomainError(f"tol must be nonnegative, got {cfg['tol']}")
    # nu0/bracket membership in the seed interval is p- and s0-dependent
    # and is enforced by the consuming modules; only the shape is checked
    br = _parse_floats(cfg["bracket"], "bracket")
    if br and (len(br) != 2 or not br[0] < br[1]):
        raise DomainError(f"bracket must be 'lo,hi' with lo < hi, got "
                          f"{cfg['bracket']!r}")
    if cfg["n_r"] < 8 or cfg["n_theta"] < 8 or cfg["n_theta"] % 4:
        raise DomainError("disk grid needs n_r >= 8 and n_theta >= 8, a "
                          f"multiple of 4; got {cfg['n_r']} x {cfg['n_theta']}")
    if cfg["N"] < 16 or cfg["N"] % 2:
        raise DomainError(f"physical grid N must be even and >= 16, got "
                          f"{cfg['N']}")
    if cfg["L"] <= 0.0:
        raise DomainError(f"half-width L must be positive, got {cfg['L']}")
    if not 0.0 < cfg["cfl"] < 1.0:
        raise DomainError(f"CFL number must lie in (0, 1), got {cfg['cfl']}")
    if cfg["u_max"] <= 0.0:
        raise DomainError(f"u_max must be positive, got {cfg['u_max']}")
    if not -1.0 < cfg["t_end"]:
        raise DomainError(f"t_end must exceed the start time -1, got "
                          f"{cfg['t_end']}")
    if cfg["x_max"] <= 0.0:
        raise DomainError(f"x_max must be positive, got {cfg['x_max']}")
    a_vals = _parse_floats(cfg["a_values"], "a_values")
    if not a_vals or any(a <= 1.0 for a in a_vals):
        raise DomainError(f"a_values must be a nonempty list of thresholds "
                          f"> 1, got {cfg['a_values']!r}")
    if cfg["model"] not in ("pyramid", "cone"):
        raise DomainError(f"model must be 'pyramid' or 'cone', got "
                          f"{cfg['model']!r}")
    # constructing the forcing validates kind and period
    _forcing(cfg)
    return c


def _forcing(cfg):
    return Forcing(cfg["forcing"], cfg["amp_nu"], cfg["amp_xi"],
                   cfg["amp_q"], cfg["period"], cfg["seed"])


def _bracket(cfg, c):
    br = _parse_floats(cfg["bracket"], "bracket")
    return (br[0], br[1]) if br else seed_interval(cfg["s0"], c)


# -- manifests and serialisation ---------------------------------------------

def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if obj == math.inf:
        return "inf"
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def _write_json(path, payload):
    pathlib.Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True,
                   default=_json_default) + "\n", encoding="utf-8")


def write_manifest(outdir, command, cfg, c, files, walltime_s):
    """Record everything needed to reproduce the run in manifest.json."""
    _write_json(outdir / "manifest.json", {
        "command": command,
        "config": dict(cfg),
        "constants": dataclasses.asdict(c),
        "versions": {"python": platform.python_version(),
                     "numpy": np.__version__,
                     "scipy": scipy.__version__,
                     "blowup2d": __version__},
        "walltime_s": round(float(walltime_s), 3),
        "files": sorted(files),
    })


# -- verify ------------------------------------------------------------------

def _suite_stationary(grid, c):
    d_vals = (0.0, -0.3, -0.6, -0.9)
    worst = max(stationary_residual(grid, (d, 0.0)) for d in d_vals)
    return worst, 1e-4, {"d_values": list(d_vals)}


_D_SET = ((0.0, 0.0), (-0.5, 0.0), (0.4, -0.55))


def _suite_eigen(grid, c):
    worst = 0.0
    for D in _D_SET:
        es = EigenSet.build(grid, D)
        for lam, f in zip(es.eigenvalues, es.pairs):
            r1, r2 = linearized_apply(grid, D, f)
            res = grid.h_norm((r1 - lam * f[0], r2 - lam * f[1]))
            worst = max(worst, res / grid.h_norm(f))
    return worst, 1e-5, {"boosts": [list(D) for D in _D_SET]}


def _suite_projector(grid, c):
    worst = 0.0
    for D in _D_SET:
        es = EigenSet.build(grid, D)
        for j, f in enumerate(es.pairs):
            pj = project(grid, D, f)
            worst = max(worst, max(abs(pj[k] - (1.0 if k == j else 0.0))
                                   for k in range(3)))
    return worst, 1e-8, {"boosts": [list(D) for D in _D_SET]}


def _suite_ellipse(grid, c):
    closed = ellipse_mass_closed(c.p)
    worst = max(abs(ellipse_mass(d, c.p) - closed) / abs(closed)
                for d in (-0.2, -0.6, -0.9))
    return worst, 1e-8, {"closed_form": closed}


def _suite_table(grid, c):
    regimes_ok = (table_regime(1.0, 0.5) == "finite"
                  and table_regime(0.25, 1.25) == "log"
                  and table_regime(0.5, 2.0) == "power")
    cases = (
        (integral_table(1.0, 0.0, 0.0), 4.0 / 3.0),
        (integral_table(0.5, 2.0, -0.9), 1.587274112 / 0.1 ** 0.5),
        (integral_table(1.0, 2.0, -0.99), 1.482996481 * abs(math.log(0.01))),
    )
    worst = max(abs(got - want) / abs(want) for got, want in cases)
    if not regimes_ok:
        worst = math.inf
    return worst, 1e-8, {"regimes_ok": regimes_ok}


def _suite_hardy(grid, c, seed):
    # the trace ratio of a smooth field grows like alpha**-0.5 toward the
    # p -> 5 boundary (constant field: sqrt(1 + 1/alpha) exactly in the
    # continuum), so the bound tracks alpha instead of being a constant
    bound = 2.0 * math.sqrt(1.0 + 1.0 / grid.alpha)
    rng = np.random.default_rng(seed)
    fields = [np.ones((grid.n_r, grid.n_theta))]
    for _ in range(5):
        co = rng.standard_normal(4)
        fields.append(co[0] + co[1] * grid.y1 + co[2] * grid.y2 ** 2
                      + co[3] * np.sin(grid.y1 * grid.y2))
    worst = worst2 = 0.0
    for f in fields:
        r1, r2 = grid.hardy_sobolev_ratios(f)
        worst = max(worst, r1)
        worst2 = max(worst2, r2)
    if worst2 > 2.0:
        worst = math.inf  # fold the (never observed) Sobolev failure in
    return worst, bound, {"sobolev_worst": worst2, "n_fields": len(fields)}


def cmd_verify(cfg, outdir):
    """Run the analytic-identity suites and write the scorecard."""
    t_start = time.perf_counter()
    c = check_config(cfg)
    grid = DiskGrid(cfg["n_r"], cfg["n_theta"], cfg["p"])
    near_boundary = c.alpha < 0.05
    suites = []
    for name, fn in (("stationary", _suite_stationary),
                     ("eigen", _suite_eigen),
                     ("projector", _suite_projector),
                     ("ellipse_mass", _suite_ellipse),
                     ("integral_table", _suite_table)):
        worst, tol, detail = fn(grid, c)
        suites.append({"name": name, "passed": bool(worst <= tol),
                       "worst": float(worst), "tolerance": float(tol),
                       "detail": detail})
    worst, tol, detail = _suite_hardy(grid, c, cfg["seed"])
    suites.append({"name": "hardy_sobolev", "passed": bool(worst <= tol),
                   "worst": float(worst), "tolerance": float(tol),
                   "detail": detail})
    all_passed = all(s["passed"] for s in suites)
    for s in suites:
        print(f"{s['name']:<15} {'pass' if s['passed'] else 'FAIL':<5} "
              f"worst {s['worst']:.3e}  tol {s['tolerance']:.3e}")
    for s in suites:
        if not s["passed"]:
            print(f"verify: suite {s['name']!r} failed "
                  f"(worst {s['worst']:.3e} > tol {s['tolerance']:.3e})",
                  file=sys.stderr)
    note = ("weight exponent alpha < 0.05: near-boundary regime, the "
            "trace-ratio bound scales like alpha**-0.5"
            if near_boundary else "standard regime")
    _write_json(outdir / "scorecard.json", {
        "suites": suites, "all_passed": all_passed,
        "grid": {"n_r": cfg["n_r"], "n_theta": cfg["n_theta"]},
        "regime": {"alpha": c.alpha, "near_boundary": near_boundary,
                   "note": note},
    })
    write_manifest(outdir, "verify", cfg, c, ["scorecard.json"],
                   time.perf_counter() - t_start)
    return 0 if all_passed else 1


# -- timelines ---------------------------------------------------------------

def _timeline_points(A, c):
    """Wedge points admissible for threshold A, three decades deep.

    Admissibility needs |log x1|**gamma > C0 * A, so the abscissas are
    placed at fixed multiples of the marginal depth; the ratio x2/x1
    sweeps the wedge from the axis to the bisectrix.  Shallow rows for
    thresholds near 1 may honestly record chronology_ok = 0: the ordering
    of the clocks needs depth beyond bare admissibility there.
    """
    l_min = (c.C0 * A) ** (1.0 / c.gamma)
    pts = []
    for mult in (2.0, 3.0, 5.0):
        x1 = math.exp(-mult * l_min)
        for ratio in (0.0, 0.5, 1.0):
            pts.append((x1, ratio * x1))
    return pts


def _timeline_table(cfg, c, surface=None):
    rows = []
    for A in _parse_floats(cfg["a_values"], "a_values"):
        rows.extend(timeline_rows(_timeline_points(A, c), A, c,
                                  surface=surface))
    return rows


def cmd_timeline(cfg, outdir):
    """Timeline table on the model surface T(x) = -x1."""
    t_start = time.perf_counter()
    c = check_config(cfg)
    rows = _timeline_table(cfg, c)
    write_csv(outdir / "timeline.csv", TIMELINE_HEADER, rows)
    n_ok = sum(r[-1] for r in rows)
    print(f"timeline: {len(rows)} rows, chronology holds at {n_ok}")
    write_manifest(outdir, "timeline", cfg, c, ["timeline.csv"],
                   time.perf_counter() - t_start)
    return 0


# -- surface analysis --------------------------------------------------------

def _fit_window(h):
    """Apex fit window, pushed outward on grids too coarse for [.05, .2]."""
    return (max(0.05, 3.5 * h), max(0.2, 14.0 * h))


def _nearest_node(S, pt):
    i = int(np.argmin(np.abs(S.x - pt[0])))
    j = int(np.argmin(np.abs(S.x - pt[1])))
    return float(S.x[i]), float(S.x[j])


def surface_report(S, c):
    """JSON-ready analysis bundle for a populated SurfaceField."""
    rep = {"t_origin": float(S.t_origin), "h": float(S.h),
           "n": int(len(S.x)), "x_max": float(S.x[-1])}
    for attr in ("t0_fit", "slope_fit", "fit_rms", "n_filled", "n_unfilled"):
        if hasattr(S, attr):
            rep[attr] = getattr(S, attr)
    rep["lipschitz"] = lipschitz_check(S)
    pyr = pyramid_check(S, eps=0.25)
    rep["pyramid"] = {k: pyr[k] for k in
                      ("eps", "r_inner", "r_outer", "n_points",
                       "lower_fraction", "upper_fraction", "pass_fraction")}
    try:
        c0_hat, resid = fit_flatness(S, c)
        rep["flatness"] = {"C0_hat": float(c0_hat),
                           "fit_residual": float(resid)}
    except DomainError as exc:
        rep["flatness"] = {"error": str(exc)}
    # 8 h matches the classify default; the span cap keeps coarse grids
    # from excluding every pair
    sep = min(8.0 * S.h, 0.25 * float(S.x[-1] - S.x[0]))
    rep["margins"] = {
        "origin": margin_report(S, _nearest_node(S, (0.0, 0.0)),
                                min_sep=sep),
        "face": margin_report(S, _nearest_node(S, (0.3, 0.1)), min_sep=sep),
    }
    labels = S.classification[S.classification != ""]
    names, counts = np.unique(labels, return_counts=True)
    rep["classification_counts"] = dict(zip(names.tolist(),
                                            counts.tolist()))
    try:
        bpt = _nearest_node(S, (0.25, 0.25))
        # 5 h keeps the one-sided stencils clear of the refilled band
        left, right = bisectrix_derivatives(S, bpt, (1.0, 0.0),
                                            step=5.0 * S.h)
        rep["bisectrix"] = {"x0": list(bpt), "left": float(left),
                            "right": float(right),
                            "kink": float(abs(left - right))}
    except DomainError as exc:
        rep["bisectrix"] = {"error": str(exc)}
    return rep


def _load_freeze(path):
    """Rebuild the solver duck-type from a freeze_t dump and its sidecar."""
    arr, side = load_field(path)
    meta = side.get("meta", {})
    if meta.get("kind") != "freeze_t":
        raise DomainError(f"{path}: not a freeze-time dump "
                          f"(kind = {meta.get('kind')!r})")
    N = arr.shape[0]
    L = float(meta["L"])
    h = 2.0 * L / N
    x = -L + (np.arange(N) + 0.5) * h
    return SimpleNamespace(freeze_t=arr, x=x, h=h, N=N)


_MODELS = {
    "pyramid": lambda x1, x2: -np.maximum(np.abs(x1), np.abs(x2)),
    "cone": lambda x1, x2: -np.hypot(x1, x2),
}


def _build_surface(cfg):
    if cfg["field"]:
        path = pathlib.Path(cfg["field"])
        if not path.exists():
            raise DomainError(f"field dump not found: {path}")
        f = _load_freeze(path)
        return from_run(f, x_max=cfg["x_max"], fit_window=_fit_window(f.h)), \
            f"run:{path.name}"
    return from_model(_MODELS[cfg["model"]], n=51, x_max=cfg["x_max"]), \
        f"model:{cfg['model']}"


def _emit_surface(S, c, outdir):
    classify(S)
    write_csv(outdir / "surface.csv", POINT_HEADER, point_table(S))
    _write_json(outdir / "surface_report.json", surface_report(S, c))
    return ["surface.csv", "surface_report.json"]


def cmd_surface(cfg, outdir):
    """Analyse a crossing surface from a dump or a synthetic model."""
    t_start = time.perf_counter()
    c = check_config(cfg)
    S, source = _build_surface(cfg)
    files = _emit_surface(S, c, outdir)
    print(f"surface ({source}): {int(np.isfinite(S.T).sum())} points, "
          f"apex t0 = {S.t_origin:.6g}")
    write_manifest(outdir, "surface", cfg, c, files,
                   time.perf_counter() - t_start)
    return 0


# -- simulate ----------------------------------------------------------------

_N_SNAPSHOTS = 45
_PROBE = (0.1, 0.05)
_PROBE_CLOCKS = np.arange(0.75, 3.01, 0.25)


def cmd_simulate(cfg, outdir):
    """Full physical-space run: fields, surface, timelines, residuals."""
    t_start = time.perf_counter()
    c = check_config(cfg)
    f = build_initial_data(cfg["s0"], cfg["nu0"], cfg["N"], p=cfg["p"],
                           cbar=cfg["cbar"], L=cfg["L"], cfl=cfg["cfl"],
                           U_max=cfg["u_max"])
    snaps = np.linspace(-1.0, cfg["t_end"], _N_SNAPSHOTS)
    evolve(f, cfg["t_end"], snap_times=snaps)
    print(f"simulate: evolved to t = {f.t:.4g} in {f.steps} steps, "
          f"{int(f.mask.sum())}/{f.N * f.N} cells frozen")

    files = ["u_final.bin", "u_final.bin.json",
             "freeze_t.bin", "freeze_t.bin.json"]
    save_field(outdir / "u_final.bin", f.u,
               meta={"kind": "u", "t": f.t, "L": cfg["L"], "N": cfg["N"]})
    save_field(outdir / "freeze_t.bin", f.freeze_t,
               meta={"kind": "freeze_t", "L": cfg["L"], "N": cfg["N"],
                     "t_end": cfg["t_end"], "u_detect": f.u_detect})

    S = from_run(f, x_max=cfg["x_max"], fit_window=_fit_window(f.h))
    files += _emit_surface(S, c, outdir)
    print(f"simulate: surface apex t0 = {S.t_origin:.6g}, face slope "
          f"{S.slope_fit:.4g}")

    # timelines against the fitted pyramid (valid below grid resolution,
    # where the admissible points for large thresholds A live)
    slope = S.slope_fit
    rows = _timeline_table(cfg, c,
                           surface=lambda pt: slope * float(max(pt)))
    write_csv(outdir / "timeline.csv", TIMELINE_HEADER, rows)
    files.append("timeline.csv")

    # ansatz residuals along s at the probe point, measured-surface time
    grid = DiskGrid(cfg["n_r"], cfg["n_theta"], cfg["p"])
    t_probe = float(S.value(_PROBE))
    dt_probe = t_probe - S.t_origin
    res_rows = []
    for s in _PROBE_CLOCKS:
        try:
            wx = extract_w(f, _PROBE, t_probe, float(s), grid)
            res_rows.append((float(s),
                             residual_1(grid, wx, _PROBE, dt_probe, s, c),
                             residual_2(grid, wx, _PROBE, dt_probe, s, c),
                             residual_4(grid, wx, _PROBE, dt_probe, s, c)))
        except (DomainError, NumericsError):
            continue
    write_csv(outdir / "residuals.csv",
              ("s", "residual_1", "residual_2", "residual_4"), res_rows)
    files.append("residuals.csv")

    write_manifest(outdir, "simulate", cfg, c, files,
                   time.perf_counter() - t_start)
    return 0


# -- shoot -------------------------------------------------------------------

_TRAJ_HEADER = ("s", "qnorm", "xi", "nu", "trap_norm", "phi")
_SCAN_HEADER = ("nu0", "exit_time", "side", "phi_exit", "truncated")
_FAN_HEADER = ("nu0", "s", "phi")
_N_SCAN_SEEDS = 41
_FAN_POINTS = 201


def _traj_rows(traj, c):
    return [(st.s, st.qnorm, st.xi, st.nu, trap_norm(st, c),
             flow_phi(st, c)) for st in traj]


def _decimate(seq, keep=_FAN_POINTS):
    if len(seq) <= keep:
        return list(seq)
    idx = np.unique(np.linspace(0, len(seq) - 1, keep).round().astype(int))
    return [seq[i] for i in idx]


def _scan_one(task):
    """Worker for the seed scan (module level so pools can pickle it)."""
    nu0, cfg, pde = task
    c = derive_constants(cfg["p"], cfg["cbar"], cfg["delta"])
    horizon = _horizon(cfg, pde)
    if pde:
        res = pde_exit_time(nu0, cfg["s0"], horizon, n_grid=cfg["N"], c=c,
                            solver_kwargs={"cfl": cfg["cfl"],
                                           "U_max": cfg["u_max"]})
    else:
        res = exit_time(nu0, cfg["s0"], horizon, _forcing(cfg), c)
    last = res.trajectory[-1]
    phi = flow_phi(last, c)
    side = 0.0 if res.exit_time == math.inf else math.copysign(1.0, phi)
    fan = [(nu0, st.s, flow_phi(st, c))
           for st in _decimate(res.trajectory)]
    return ((nu0, res.exit_time, side, phi, int(res.truncated)), fan)


def _horizon(cfg, pde):
    if cfg["horizon"]:
        return cfg["horizon"]
    return cfg["s0"] + 2.0 if pde else 100.0 * cfg["s0"]


def cmd_shoot(cfg, outdir, pde=False, scan=False, threads=1):
    """Seed search (reduced or PDE-driven), or the 41-seed exit map."""
    t_start = time.perf_counter()
    c = check_config(cfg)
    lo, hi = _bracket(cfg, c)
    horizon = _horizon(cfg, pde)
    files = []

    if scan:
        tasks = [(float(nu0), cfg, pde)
                 for nu0 in np.linspace(lo, hi, _N_SCAN_SEEDS)]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(_scan_one, tasks))
        else:
            results = [_scan_one(t) for t in tasks]
        rows = [r for r, _ in results]
        fan = [row for _, f in results for row in f]
        write_csv(outdir / "scan.csv", _SCAN_HEADER, rows)
        write_csv(outdir / "fan.csv", _FAN_HEADER, fan)
        files += ["scan.csv", "fan.csv"]
        n_left = sum(1 for r in rows if r[2] < 0)
        n_surv = sum(1 for r in rows if r[2] == 0)
        print(f"shoot --scan: {len(rows)} seeds, {n_left} exit left, "
              f"{len(rows) - n_left - n_surv} exit right, {n_surv} survive")
    else:
        if pde:
            res = pde_shoot(cfg["s0"], (lo, hi), horizon,
                            tol=cfg["tol"] or None, n_grid=cfg["N"], c=c,
                            solver_kwargs={"cfl": cfg["cfl"],
                                           "U_max": cfg["u_max"]})
        else:
            custom = bool(_parse_floats(cfg["bracket"], "bracket"))
            res = shoot(cfg["s0"], horizon, _forcing(cfg),
                        cfg["tol"] or 1e-6 * (hi - lo), c,
                        bracket=(lo, hi) if custom else None)
        write_csv(outdir / "trajectory.csv", _TRAJ_HEADER,
                  _traj_rows(res.trajectory, c))
        survived = res.exit_time == math.inf
        _write_json(outdir / "shoot_result.json", {
            "nu0": res.nu0,
            "exit_time": None if survived else res.exit_time,
            "survived": survived,
            "truncated": res.truncated,
            "bisection_iterations": res.bisection_iterations,
            "horizon": horizon,
            "bracket": [lo, hi],
            "mode": "pde" if pde else "reduced",
        })
        files += ["trajectory.csv", "shoot_result.json"]
        state = "survives to horizon" if survived else \
            f"exits at s = {res.exit_time:.6g}"
        print(f"shoot: nu0 = {res.nu0:.8g} {state} "
              f"({res.bisection_iterations} bisections)")

    write_manifest(outdir, "shoot", cfg, c, files,
                   time.perf_counter() - t_start)
    return 0


# -- entry point -------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="flat KEY = value configuration file")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (created if missing; "
                             "overrides the config)")
    common.add_argument("--threads", metavar="K", type=int, default=1,
                        help="worker pool size for per-seed scans")
    common.add_argument("--seed", metavar="N", type=int,
                        help="random seed (overrides the config)")
    parser = argparse.ArgumentParser(
        prog="blowup2d",
        description="Four-soliton blow-up laboratory: verification suites, "
                    "physical-space runs, shooting and surface analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common],
                   help="analytic-identity suites -> scorecard.json")
    sub.add_parser("simulate", parents=[common],
                   help="physical-space run -> fields, surface, timelines")
    sp = sub.add_parser("shoot", parents=[common],
                        help="seed search for the trapped trajectory")
    sp.add_argument("--pde", action="store_true",
                    help="drive the search with the physical solver "
                         "instead of the reduced model")
    sp.add_argument("--scan", action="store_true",
                    help="emit the exit-side map over 41 seeds")
    sub.add_parser("timeline", parents=[common],
                   help="soliton-loosing timelines on the model surface")
    sub.add_parser("surface", parents=[common],
                   help="crossing-surface analysis from a dump or model")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = read_config(args.config) if args.config else dict(DEFAULTS)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.out is not None:
            cfg["out"] = args.out
        if args.threads < 1:
            raise DomainError(f"--threads must be >= 1, got {args.threads}")
        outdir = pathlib.Path(cfg["out"])
        outdir.mkdir(parents=True, exist_ok=True)
        if args.command == "verify":
            return cmd_verify(cfg, outdir)
        if args.command == "simulate":
            return cmd_simulate(cfg, outdir)
        if args.command == "shoot":
            return cmd_shoot(cfg, outdir, pde=args.pde, scan=args.scan,
                             threads=args.threads)
        if args.command == "timeline":
            return cmd_timeline(cfg, outdir)
        return cmd_surface(cfg, outdir)
    except (DomainError, NumericsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
