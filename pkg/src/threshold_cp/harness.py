"""Multi-replica parameter scans and their analysis.

A scan runs ``replicas`` independent trajectories for every ``(n, p)`` cell,
writes one CSV row per trajectory plus a ``key=value`` manifest, and can be
replayed byte-for-byte from that manifest.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import __version__
from ._rng import derive_seed, make_rng
from .dynamics import OccupancyState, ProcessParams, longest_run_in, plateau_density, run
from .graph_gen import GraphConfig, sample_simple_regular


class InsufficientData(ValueError):
    pass


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class ScanConfig:
    r: int
    n_list: tuple
    p_grid: tuple
    replicas: int = 10
    t_max: int = 5000
    stop_below: float | None = 0.05
    init: str = "full"
    master_seed: int = 0
    out_dir: str = "scan_out"
    theta: int = 2
    burn_in: float = 0.5
    quenched: bool = False
    max_attempts: int = 10**6

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        if not self.n_list or not self.p_grid:
            raise ValueError("n_list and p_grid must be non-empty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ValueError("every p must lie in [0, 1]")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        for n in self.n_list:
            GraphConfig(n, self.r)
        if not 1 <= self.theta <= self.r:
            raise ValueError("theta must lie in 1..r")
        parse_init(self.init)

    def to_text(self):
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
            elif v is None:
                v = "none"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()


_MANIFEST_ONLY = {"cfg_hash", "code_version", "rows", "results_sha256", "results_file"}


def parse_config(text):
    """Parse ``key=value`` lines; ``#`` starts a comment, lists are comma-separated."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        raw[k] = v
    known = {f.name: f for f in fields(ScanConfig)}
    kwargs = {}
    for k, v in raw.items():
        if k in _MANIFEST_ONLY:
            continue
        if k not in known:
            raise ValueError(f"unknown config key {k!r}")
        kwargs[k] = _convert(k, v)
    missing = [k for k in ("r", "n_list", "p_grid") if k not in kwargs]
    if missing:
        raise ValueError(f"missing config keys: {', '.join(missing)}")
    return ScanConfig(**kwargs)


def _convert(key, v):
    if key == "n_list":
        return tuple(int(x) for x in v.split(",") if x.strip())
    if key == "p_grid":
        return tuple(float(x) for x in v.split(",") if x.strip())
    if key in ("r", "replicas", "t_max", "master_seed", "theta", "max_attempts"):
        return int(v)
    if key in ("burn_in",):
        return float(v)
    if key == "stop_below":
        return None if v.lower() == "none" else float(v)
    if key == "quenched":
        return v.lower() in ("1", "true", "yes")
    return v


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def parse_init(text):
    """``full`` | ``random:<density>`` | ``file:<path>`` -> (kind, arg)."""
    if text == "full":
        return "full", None
    if text.startswith("random:"):
        d = float(text.split(":", 1)[1])
        if not 0.0 <= d <= 1.0:
            raise ValueError(f"initial density {d} outside [0, 1]")
        return "random", d
    if text.startswith("file:"):
        return "file", text.split(":", 1)[1]
    raise ValueError(f"bad initial condition {text!r}")


def read_vertex_file(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0]
            out.extend(int(tok) for tok in line.replace(",", " ").split())
    return out


def initial_state(text, n, rng):
    kind, arg = parse_init(text)
    if kind == "full":
        return OccupancyState.full(n)
    if kind == "random":
        return OccupancyState.random(n, arg, rng)
    verts = read_vertex_file(arg)
    if verts and (min(verts) < 0 or max(verts) >= n):
        raise ValueError(f"initial vertex file {arg} has vertices outside 0..{n - 1}")
    return OccupancyState.from_vertices(n, verts)


# ---------------------------------------------------------------- results


@dataclass
class CellResult:
    n: int
    p: float
    replica_id: int
    graph_seed: int
    process_seed: int = 0
    extinction_time: int | None = None
    plateau_density: float | None = None
    survived: bool = False
    first_below: int | None = None
    final_density: float | None = None
    min_density: float | None = None  # over t >= 1
    low_run: int | None = None  # longest post-burn-in run with 0 < density < stop_below
    steps_run: int | None = None
    error: str = ""


RESULT_COLUMNS = tuple(f.name for f in fields(CellResult))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results(results, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for res in results:
            w.writerow([_fmt(getattr(res, c)) for c in RESULT_COLUMNS])


def read_results(path):
    types = {
        "n": int, "replica_id": int, "graph_seed": int, "process_seed": int,
        "extinction_time": int, "first_below": int, "low_run": int, "steps_run": int,
        "p": float, "plateau_density": float, "final_density": float, "min_density": float,
    }
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for k, v in row.items():
                if k == "survived":
                    kw[k] = v == "1"
                elif k == "error":
                    kw[k] = v
                elif k in types:
                    kw[k] = types[k](v) if v != "" else None
            out.append(CellResult(**kw))
    return out


# ---------------------------------------------------------------- scan


def _p_key(p):
    return int(round(p * 10**9))


def _seeds(cfg, n, p, rep):
    if cfg.quenched:
        return (
            derive_seed(cfg.master_seed, n, 0, 0, 0),
            derive_seed(cfg.master_seed, n, rep, 1),
            derive_seed(cfg.master_seed, n, rep, 2),
        )
    k = _p_key(p)
    return (
        derive_seed(cfg.master_seed, n, k, rep, 0),
        derive_seed(cfg.master_seed, n, k, rep, 1),
        derive_seed(cfg.master_seed, n, k, rep, 2),
    )


@lru_cache(maxsize=8)
def _cached_graph(n, r, seed, max_attempts):
    return sample_simple_regular(GraphConfig(n, r, seed=seed, max_attempts=max_attempts))


def run_replica(cfg, n, p, rep):
    """One trajectory of one cell; never raises (errors become an error row)."""
    graph_seed, proc_seed, init_seed = _seeds(cfg, n, p, rep)
    res = CellResult(n=n, p=p, replica_id=rep, graph_seed=graph_seed, process_seed=proc_seed)
    try:
        if cfg.quenched:
            g = _cached_graph(n, cfg.r, graph_seed, cfg.max_attempts)
        else:
            g = sample_simple_regular(GraphConfig(n, cfg.r, seed=graph_seed, max_attempts=cfg.max_attempts))
        init = initial_state(cfg.init, n, make_rng(init_seed))
        params = ProcessParams(
            p=p, theta=cfg.theta, seed=proc_seed, t_max=cfg.t_max,
            stop_below=cfg.stop_below, halt_below=False,
        )
        rec = run(g, init, params)
    except Exception as exc:  # noqa: BLE001 - one bad replica must not sink the scan
        res.error = f"{type(exc).__name__}: {exc}".replace("\n", " ").replace(",", ";")
        return res
    d = rec.densities
    res.first_below = rec.first_below
    res.steps_run = rec.steps_run
    res.final_density = float(d[-1])
    res.min_density = float(d[1:].min()) if d.size > 1 else float(d[0])
    if rec.extinct:
        res.extinction_time = rec.extinction_time
        res.survived = False
    else:
        res.plateau_density = plateau_density(rec, cfg.burn_in).value
        floor = cfg.stop_below if cfg.stop_below is not None else 0.0
        res.survived = bool(rec.reached_t_max and d[-1] > floor)
    start = int(math.ceil(cfg.burn_in * (d.size - 1)))
    hi = cfg.stop_below if cfg.stop_below is not None else 0.0
    res.low_run = longest_run_in(d[start:], 0.0, hi)
    return res


def _run_task(args):
    return run_replica(*args)


@dataclass
class ScanOutput:
    results: list
    results_path: str
    manifest_path: str
    manifest: dict = field(default_factory=dict)


def run_scan(cfg, workers=1, out_dir=None):
    """Run every cell, write ``results.csv`` and ``manifest.txt`` in ``out_dir``.

    Rows are sorted by ``(n, p, replica_id)`` so the CSV does not depend on
    scheduling.
    """
    out_dir = out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    tasks = [(cfg, n, p, rep) for n in cfg.n_list for p in cfg.p_grid for rep in range(cfg.replicas)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [run_replica(*t) for t in tasks]
    n_pos = {n: i for i, n in enumerate(cfg.n_list)}
    p_pos = {p: i for i, p in enumerate(cfg.p_grid)}
    results.sort(key=lambda r: (n_pos[r.n], p_pos[r.p], r.replica_id))

    results_path = os.path.join(out_dir, "results.csv")
    write_results(results, results_path)
    with open(results_path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "cfg_hash": cfg.digest(),
        "code_version": __version__,
        "rows": str(len(results)),
        "results_file": "results.csv",
        "results_sha256": digest,
    }
    manifest_path = os.path.join(out_dir, "manifest.txt")
    with open(manifest_path, "w") as fh:
        fh.write("# threshold-cp scan manifest\n")
        fh.write(cfg.to_text())
        fh.writelines(f"{k}={v}\n" for k, v in manifest.items())
    return ScanOutput(results, results_path, manifest_path, manifest)


def rerun_from_manifest(manifest_path, out_dir, workers=1):
    """Replay a scan from its manifest into ``out_dir``."""
    return run_scan(load_config(manifest_path), workers=workers, out_dir=out_dir)


# ---------------------------------------------------------------- analysis


def _valid(results):
    return [r for r in results if not r.error]


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    residuals: np.ndarray
    slope_stderr: float
    log_n: np.ndarray
    medians: np.ndarray


def fit_line(log_n, values):
    """Least squares ``values ~ slope * log_n + intercept`` with slope standard error."""
    x = np.asarray(log_n, dtype=float)
    y = np.asarray(values, dtype=float)
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = x.size - 2
    if dof > 0:
        s2 = float(resid @ resid) / dof
        sxx = float(((x - x.mean()) ** 2).sum())
        se = math.sqrt(s2 / sxx) if sxx > 0 else float("inf")
    else:
        se = float("nan")
    return float(coef[0]), float(coef[1]), resid, se


def fit_extinction_slope(results, p, min_extinct=0.9, min_sizes=3):
    """Regress the median extinction time on ``log n`` at a fixed ``p``.

    Only sizes where at least ``min_extinct`` of replicas died are used.
    """
    by_n = {}
    for r in _valid(results):
        if math.isclose(r.p, p, rel_tol=0, abs_tol=1e-12):
            by_n.setdefault(r.n, []).append(r)
    ns, meds = [], []
    for n in sorted(by_n):
        rows = by_n[n]
        times = [r.extinction_time for r in rows if r.extinction_time is not None]
        if len(times) >= min_extinct * len(rows) and times:
            ns.append(n)
            meds.append(float(np.median(times)))
    if len(ns) < min_sizes:
        raise InsufficientData(
            f"p={p}: only {len(ns)} sizes with >= {min_extinct:.0%} extinct replicas, need {min_sizes}"
        )
    log_n = np.log(np.asarray(ns, dtype=float))
    slope, intercept, resid, se = fit_line(log_n, meds)
    return SlopeFit(slope, intercept, resid, se, log_n, np.asarray(meds))


def survival_table(results):
    """``{n: {p: (survived, total)}}``."""
    table = {}
    for r in _valid(results):
        cell = table.setdefault(r.n, {}).setdefault(r.p, [0, 0])
        cell[0] += r.survived
        cell[1] += 1
    return {n: {p: tuple(v) for p, v in sorted(row.items())} for n, row in sorted(table.items())}


class PcInterval(NamedTuple):
    n: int
    p_lo: float | None  # last mostly-dead grid point
    p_hi: float | None  # first mostly-alive grid point
    monotone: bool

    @property
    def bounded(self):
        return self.p_lo is not None and self.p_hi is not None


def pc_interval(ps, fractions, n=0):
    ps = list(ps)
    fr = list(fractions)
    alive = [f > 0.5 for f in fr]
    monotone = all(a <= b for a, b in zip(alive, alive[1:]))
    if not monotone:
        warnings.warn(f"n={n}: survival fractions are not monotone in p", stacklevel=2)
    if not any(alive):
        return PcInterval(n, ps[-1], None, monotone)
    first = alive.index(True)
    lo = ps[first - 1] if first > 0 else None
    return PcInterval(n, lo, ps[first], monotone)


def estimate_pc(results):
    """Per-size bracket of the survival boundary on the scanned p grid."""
    out = {}
    for n, row in survival_table(results).items():
        ps = sorted(row)
        out[n] = pc_interval(ps, [row[p][0] / row[p][1] for p in ps], n)
    return out


@dataclass
class GapRow:
    n: int
    p: float
    replicas: int
    extinct: int
    survived: int
    min_plateau: float | None
    max_plateau: float | None
    gap_lo: float | None
    gap_hi: float | None
    gap_defined: bool
    histogram: list  # counts of plateau densities in 10 bins over [0, 1]


GAP_COLUMNS = tuple(f.name for f in fields(GapRow))


def gap_from_plateaus(values):
    """``(gap_lo, gap_hi, defined)``: empty band above 0 up to the smallest positive plateau."""
    vals = [v for v in values if v is not None]
    pos = [v for v in vals if v > 0]
    if len(vals) < 2 or not pos:
        return None, None, False
    return 0.0, min(pos), True


def gap_report(results, bins=10):
    """Plateau-density histograms and the empty band above zero, per ``(n, p)``."""
    cells = {}
    for r in _valid(results):
        cells.setdefault((r.n, r.p), []).append(r)
    rows = []
    for (n, p), rs in sorted(cells.items()):
        plateaus = [0.0 if r.extinction_time is not None else r.plateau_density for r in rs]
        lo, hi, ok = gap_from_plateaus(plateaus)
        pos = [v for v in plateaus if v is not None and v > 0]
        hist, _ = np.histogram([v for v in plateaus if v is not None], bins=bins, range=(0.0, 1.0))
        rows.append(GapRow(
            n=n, p=p, replicas=len(rs),
            extinct=sum(r.extinction_time is not None for r in rs),
            survived=sum(r.survived for r in rs),
            min_plateau=min(pos) if pos else None,
            max_plateau=max(pos) if pos else None,
            gap_lo=lo, gap_hi=hi, gap_defined=ok,
            histogram=hist.tolist(),
        ))
    return rows


def pooled_gap_by_n(rows):
    """Smallest surviving plateau across all p, per n (the first-order signature)."""
    out = {}
    for row in rows:
        if row.min_plateau is not None:
            out[row.n] = min(out.get(row.n, 1.0), row.min_plateau)
    return out


def write_gap_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(GAP_COLUMNS)
    for row in rows:
        d = asdict(row)
        d["histogram"] = ";".join(str(c) for c in row.histogram)
        w.writerow([_fmt(d[c]) for c in GAP_COLUMNS])


def write_pc_csv(intervals, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "p_lo", "p_hi", "bounded", "monotone"])
    for n, iv in sorted(intervals.items()):
        w.writerow([n, _fmt(iv.p_lo), _fmt(iv.p_hi), _fmt(iv.bounded), _fmt(iv.monotone)])


def write_slope_csv(results, fh, p=None):
    """Fit every p (or just ``p``) with enough extinct cells."""
    from .bounds import c0_of_p

    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["p", "slope", "intercept", "slope_stderr", "sizes", "c0_plus_1"])
    ps = sorted({r.p for r in _valid(results)}) if p is None else [p]
    for q in ps:
        try:
            fit = fit_extinction_slope(results, q)
        except InsufficientData:
            if p is not None:
                raise
            continue
        ref = c0_of_p(q) + 1 if q < 1 else float("inf")
        w.writerow([_fmt(q), _fmt(fit.slope), _fmt(fit.intercept), _fmt(fit.slope_stderr),
                    fit.log_n.size, _fmt(ref)])
