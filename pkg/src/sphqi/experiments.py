"""Experiment configuration, test functions and the runs behind the CLI.

Every run writes CSV artifacts plus a ``<name>.manifest.json`` beside
each one (config echo, library and numpy/scipy versions, seeds). Runs are
reproducible from (config, seed); only ``time_s`` columns vary.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import json
import platform
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy

from . import __version__
from .baselines import FilterSpec, filtered_hyperinterpolate, hyperinterpolate
from .geometry import (PointKind, PointSet, load_points, product_quadrature, product_quadrature_size,
                       random_points, spiral_points)
from .harmonics import SpectralFunction, harmonic
from .kernels import Family, RadialProfile, make_kernel, profile_for_order
from .metrics import ErrorReport, Measure, default_rule, fit_slope, l2_error, linf_error, mmse
from .multilevel import HMode, build_schedule, multilevel_approximate
from .quasi import NoiseKind, NoiseModel, add_noise, qi_mc, qi_qmc


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


# ---------------------------------------------------------------- test functions

def franke(x) -> np.ndarray:
    """Franke's four-bump test function evaluated at unit vectors (x, y, z)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    a, b, c = 9.0 * x[:, 0], 9.0 * x[:, 1], 9.0 * x[:, 2]
    return (0.75 * np.exp(-((a - 2) ** 2 + (b - 2) ** 2 + (c - 2) ** 2) / 4.0)
            + 0.75 * np.exp(-(a + 1) ** 2 / 49.0 - (b + 1) / 10.0 - (c + 1) / 10.0)
            + 0.5 * np.exp(-((a - 7) ** 2 + (b - 3) ** 2 + (c - 5) ** 2) / 4.0)
            - 0.2 * np.exp(-((a - 4) ** 2 + (b - 7) ** 2 + (c - 5) ** 2)))


@dataclass(frozen=True)
class TestFunction:
    name: str
    func: Callable[[np.ndarray], np.ndarray]
    spectral: SpectralFunction | None = None

    __test__ = False  # keep pytest from collecting this class

    def __call__(self, x) -> np.ndarray:
        return self.func(np.atleast_2d(x))


def make_target(spec) -> TestFunction:
    """``"franke"`` or ``{"harmonic": [l, k]}`` / ``("harmonic", l, k)``."""
    if spec == "franke" or spec == {"franke": None}:
        return TestFunction("franke", franke)
    if isinstance(spec, dict) and "harmonic" in spec:
        ell, k = spec["harmonic"]
    elif isinstance(spec, (list, tuple)) and len(spec) == 3 and spec[0] == "harmonic":
        _, ell, k = spec
    else:
        raise ConfigError(f"target: unrecognised {spec!r}")
    ell, k = int(ell), int(k)
    if ell < 0 or not 1 <= k <= 2 * ell + 1:
        raise ConfigError(f"target: harmonic ({ell}, {k}) out of range")
    return TestFunction(f"Y_{ell}_{k}", harmonic(ell, k), SpectralFunction.single_mode(ell, k))


# ---------------------------------------------------------------- configuration

class Experiment(str, enum.Enum):
    CONVERGENCE = "convergence"
    MULTILEVEL = "multilevel"
    NOISE_COMPARE = "noise-compare"
    TIMING = "timing"
    APPROX = "approx"


class RhoRuleKind(str, enum.Enum):
    POW_QMC = "pow_qmc"
    POW_MC = "pow_mc"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class RhoRule:
    """rho = c_rho * N^exponent, or an explicit list aligned with n_grid.

    The exponent defaults to -1/(2d) for POW_QMC and -1/(2m) for POW_MC.
    """

    kind: RhoRuleKind = RhoRuleKind.POW_QMC
    exponent: float | None = None
    c_rho: float = 1.0
    values: tuple[float, ...] = ()

    def resolved_exponent(self, m: int, d: int = 2) -> float:
        if self.exponent is not None:
            return self.exponent
        return -1.0 / (2 * d) if self.kind is RhoRuleKind.POW_QMC else -1.0 / (2 * m)

    def rhos(self, n_grid, m: int, d: int = 2) -> list[float]:
        if self.kind is RhoRuleKind.EXPLICIT:
            return [float(v) for v in self.values]
        e = self.resolved_exponent(m, d)
        return [self.c_rho * n ** e for n in n_grid]


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: Experiment = Experiment.CONVERGENCE
    kernel: str = "gaussian"
    order: int = 2
    point_kind: PointKind = PointKind.SPIRAL
    n_grid: tuple[int, ...] = (1024, 2048, 4096, 8192, 16384)
    rho_rule: RhoRule = RhoRule()
    target: object = ("harmonic", 6, 4)
    noise_kind: NoiseKind = NoiseKind.GAUSSIAN
    noise_levels: tuple[float, ...] = ()
    seed: int = 0
    output: str = "out"
    # multilevel
    nu: float = 1.5
    h_mode: HMode = HMode.NOMINAL
    # metrics
    trials: int = 20
    eval_points: int = 5000
    linf_points: int = 10000
    l2_degree: int = 60
    measure: Measure = Measure.NORMALIZED
    # baselines / timing
    filter_a: float = 1.2
    repetitions: int = 3
    point_files: tuple[str, ...] = ()

    def __post_init__(self):
        for name, typ in (("experiment", Experiment), ("point_kind", PointKind), ("noise_kind", NoiseKind),
                          ("h_mode", HMode), ("measure", Measure)):
            try:
                object.__setattr__(self, name, typ(getattr(self, name)))
            except ValueError:
                raise ConfigError(f"{name}: invalid value {getattr(self, name)!r}") from None
        if isinstance(self.rho_rule, dict):
            object.__setattr__(self, "rho_rule", _rho_rule_from_dict(self.rho_rule))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "noise_levels", tuple(float(s) for s in self.noise_levels))
        object.__setattr__(self, "point_files", tuple(str(p) for p in self.point_files))
        self.validate()

    def validate(self) -> None:
        try:
            Family(self.kernel)
        except ValueError:
            raise ConfigError(f"kernel: unknown family {self.kernel!r}") from None
        if self.order not in (2, 4, 6):
            raise ConfigError(f"order: must be 2, 4 or 6, got {self.order}")
        if not self.n_grid:
            raise ConfigError("n_grid: must not be empty")
        if any(n < 1 for n in self.n_grid) or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError(f"n_grid: must be positive and strictly increasing, got {list(self.n_grid)}")
        rr = self.rho_rule
        if rr.kind is RhoRuleKind.EXPLICIT:
            if len(rr.values) != len(self.n_grid):
                raise ConfigError("rho_rule.values: need one rho per n_grid entry")
        else:
            if rr.exponent is not None and rr.exponent >= 0:
                raise ConfigError(f"rho_rule.exponent: must be negative, got {rr.exponent}")
            if rr.c_rho <= 0:
                raise ConfigError(f"rho_rule.c_rho: must be positive, got {rr.c_rho}")
        bad = [r for r in self.rhos() if not 0.0 < r < 1.0]
        if bad:
            raise ConfigError(f"rho_rule: every rho must lie in (0, 1), got {bad}")
        if any(s < 0 for s in self.noise_levels):
            raise ConfigError(f"noise_levels: must be >= 0, got {list(self.noise_levels)}")
        if self.nu <= 1.0:
            raise ConfigError(f"nu: must exceed 1, got {self.nu}")
        if self.trials < 1 or self.eval_points < 1 or self.linf_points < 1 or self.repetitions < 1:
            raise ConfigError("trials, eval_points, linf_points and repetitions must be >= 1")
        if self.filter_a <= 1.0:
            raise ConfigError(f"filter_a: must exceed 1, got {self.filter_a}")
        if self.point_kind in (PointKind.TDESIGN, PointKind.MAXDET, PointKind.LOADED):
            if len(self.point_files) != len(self.n_grid):
                raise ConfigError("point_files: loaded point kinds need one file per n_grid entry")
        if self.experiment is Experiment.MULTILEVEL and len(self.n_grid) < 2:
            raise ConfigError("n_grid: multilevel runs need at least two levels")
        make_target(self.target)

    def rhos(self) -> list[float]:
        return self.rho_rule.rhos(self.n_grid, self.order)

    def profile(self) -> RadialProfile:
        return profile_for_order(self.kernel, self.order)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    def paper_scale(self) -> "ExperimentConfig":
        """Trial counts and evaluation grids at the sizes used for publication runs."""
        return self.with_overrides(trials=100, eval_points=50000, linf_points=100000)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return json.loads(json.dumps(d, default=lambda o: o.value if isinstance(o, enum.Enum) else str(o)))

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def _rho_rule_from_dict(d: dict) -> RhoRule:
    try:
        kind = RhoRuleKind(d.get("kind", "pow_qmc"))
    except ValueError:
        raise ConfigError(f"rho_rule.kind: invalid value {d.get('kind')!r}") from None
    unknown = set(d) - {"kind", "exponent", "c_rho", "values"}
    if unknown:
        raise ConfigError(f"rho_rule: unknown keys {sorted(unknown)}")
    return RhoRule(kind, d.get("exponent"), float(d.get("c_rho", 1.0)), tuple(d.get("values", ())))


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return ExperimentConfig.from_dict(data)


# ---------------------------------------------------------------- helpers

def cell_seed(base: int, *keys: int) -> int:
    """Independent 32-bit seed for one (N, trial, ...) cell."""
    return int(np.random.SeedSequence([int(base), *map(int, keys)]).generate_state(1)[0])


def build_points(cfg: ExperimentConfig, i: int, seed: int | None = None) -> PointSet:
    n = cfg.n_grid[i]
    if cfg.point_kind is PointKind.RANDOM:
        return random_points(n, 2, cell_seed(cfg.seed, n) if seed is None else seed)
    if cfg.point_kind is PointKind.SPIRAL:
        return spiral_points(n)
    pts = load_points(cfg.point_files[i])
    if len(pts) != n:
        raise ConfigError(f"point_files[{i}]: holds {len(pts)} points, n_grid says {n}")
    return pts


def write_manifest(artifact: Path, cfg: ExperimentConfig | None, extra: dict | None = None) -> Path:
    artifact = Path(artifact)
    doc = {
        "artifact": artifact.name,
        "library": "sphqi",
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config": None if cfg is None else cfg.to_dict(),
        "seed": None if cfg is None else cfg.seed,
    }
    if extra:
        doc.update(extra)
    path = artifact.with_name(artifact.name + ".manifest.json")
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    return path


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def _noise(cfg: ExperimentConfig, level: float, *keys: int) -> NoiseModel | None:
    if level == 0:
        return None
    return NoiseModel(cfg.noise_kind, level, cell_seed(cfg.seed, *keys))


def _sigma_key(level: float) -> int:
    return int(round(level * 1e9))


# ---------------------------------------------------------------- runs

@dataclass
class ConvergenceResult:
    reports: list[ErrorReport]
    slope_l2: float | None
    slope_mmse: float | None
    paths: list[Path] = field(default_factory=list)

    @property
    def ns(self) -> list[int]:
        return [r.n for r in self.reports]


def run_convergence(cfg: ExperimentConfig, out: Path | None = None) -> ConvergenceResult:
    """Single-level QI at each N of the grid.

    Deterministic point sets report L2 (quadrature) and L-infinity errors;
    random point sets additionally report MMSE over ``cfg.trials`` reseeded
    site sets on ``cfg.eval_points`` random evaluation points.
    """
    f = make_target(cfg.target)
    profile = cfg.profile()
    rule = default_rule(cfg.l2_degree)
    dense = spiral_points(cfg.linf_points)
    level = cfg.noise_levels[0] if cfg.noise_levels else 0.0
    random_kind = cfg.point_kind is PointKind.RANDOM
    eval_pts = random_points(cfg.eval_points, 2, cell_seed(cfg.seed, 0xE7A1)) if random_kind else None
    reports = []
    for i, (n, rho) in enumerate(zip(cfg.n_grid, cfg.rhos())):
        t0 = time.perf_counter()
        kernel = make_kernel(profile, rho)
        if random_kind:
            def build(s, n=n, kernel=kernel):
                return qi_mc(n, cell_seed(cfg.seed, n, s), f, kernel, _noise(cfg, level, n, s, 1))
            approx = build(0)
            err_mmse = mmse(build, f, cfg.trials, eval_pts)
        else:
            sites = build_points(cfg, i)
            vals = f(sites.points)
            noise = _noise(cfg, level, n, 1)
            if noise is not None:
                vals = add_noise(vals, noise)
            approx = qi_qmc(sites, vals, kernel, noisy=noise is not None)
            err_mmse = None
        reports.append(ErrorReport(n, l2_error(approx, f, rule, cfg.measure), linf_error(approx, f, dense),
                                   err_mmse, time.perf_counter() - t0))
    ns = [r.n for r in reports]
    slope_l2 = fit_slope(ns, [r.l2 for r in reports])[0] if len(ns) > 1 else None
    slope_mmse = (fit_slope(ns, [r.mmse for r in reports])[0]
                  if random_kind and len(ns) > 1 else None)
    res = ConvergenceResult(reports, slope_l2, slope_mmse)
    if out is not None:
        out = Path(out)
        p = _write_csv(out / "convergence.csv", ErrorReport.HEADER, [r.row() for r in reports])
        slopes = []
        for name, col in (("L2err", [r.l2 for r in reports]), ("MMSE", [r.mmse for r in reports])):
            if len(ns) > 1 and all(c is not None for c in col):
                s, b = fit_slope(ns, col)
                slopes.append([name, repr(s), repr(b)])
        q = _write_csv(out / "convergence_slopes.csv", ("metric", "slope", "intercept"), slopes)
        for path in (p, q):
            write_manifest(path, cfg, {"rhos": cfg.rhos()})
        res.paths = [p, q]
    return res


@dataclass
class MultilevelRow:
    scheme: str
    sigma: float
    level: int
    n: int
    rho: float
    l2: float
    linf: float

    HEADER = ("scheme", "sigma", "level", "N", "rho", "L2err", "Linferr")

    def row(self) -> list:
        return [self.scheme, repr(self.sigma), self.level, self.n, repr(self.rho), repr(self.l2), repr(self.linf)]


def run_multilevel_compare(cfg: ExperimentConfig, out: Path | None = None) -> list[MultilevelRow]:
    """Single-level QI at each level size versus the multilevel scheme.

    Multilevel scales follow rho_j = nu sqrt(h_j); single-level runs use
    ``cfg.rho_rule``. Runs clean data (sigma = 0) plus every configured
    noise level. The same noisy measurements feed both schemes.
    """
    f = make_target(cfg.target)
    profile = cfg.profile()
    rule = default_rule(cfg.l2_degree)
    dense = spiral_points(cfg.linf_points)
    sites = [build_points(cfg, i) for i in range(len(cfg.n_grid))]
    schedule = build_schedule(sites, nu=cfg.nu, h_mode=cfg.h_mode, probe_seed=cell_seed(cfg.seed, 0xF111))
    sl_rhos = cfg.rhos()
    rows = []
    levels = (0.0,) + tuple(s for s in cfg.noise_levels if s > 0)
    for sigma in levels:
        noise = _noise(cfg, sigma, _sigma_key(sigma))
        for j, (x, rho) in enumerate(zip(sites, sl_rhos)):
            vals = f(x.points)
            if noise is not None:
                # level j measurements: the same draws the multilevel run uses
                vals = add_noise(vals, noise.with_seed(noise.seed + j))
            a = qi_qmc(x, vals, make_kernel(profile, rho), noisy=noise is not None)
            rows.append(MultilevelRow("single", sigma, j + 1, len(x), rho,
                                      l2_error(a, f, rule, cfg.measure), linf_error(a, f, dense)))
        ml = multilevel_approximate(schedule, f, profile, noise)
        for j, lv in enumerate(schedule.levels):
            g = ml.partial(j + 1)
            rows.append(MultilevelRow("multilevel", sigma, j + 1, len(lv.sites), lv.rho,
                                      l2_error(g, f, rule, cfg.measure), linf_error(g, f, dense)))
    if out is not None:
        p = _write_csv(Path(out) / "multilevel_compare.csv", MultilevelRow.HEADER, [r.row() for r in rows])
        write_manifest(p, cfg, {"multilevel_rhos": schedule.rhos.tolist(), "single_rhos": sl_rhos,
                                "h": schedule.h.tolist()})
    return rows


def run_multilevel(cfg: ExperimentConfig, out: Path | None = None) -> list[list]:
    """Multilevel run with the per-level log ``level,N,rho,L2err,Linferr``.

    Uses the first configured noise level (or clean data).
    """
    f = make_target(cfg.target)
    rule = default_rule(cfg.l2_degree)
    dense = spiral_points(cfg.linf_points)
    sites = [build_points(cfg, i) for i in range(len(cfg.n_grid))]
    schedule = build_schedule(sites, nu=cfg.nu, h_mode=cfg.h_mode, probe_seed=cell_seed(cfg.seed, 0xF111))
    sigma = cfg.noise_levels[0] if cfg.noise_levels else 0.0
    log = []

    def on_level(j, ml):
        lv = schedule.levels[j - 1]
        log.append([j, len(lv.sites), repr(lv.rho), repr(l2_error(ml, f, rule, cfg.measure)),
                    repr(linf_error(ml, f, dense))])

    multilevel_approximate(schedule, f, cfg.profile(), _noise(cfg, sigma, _sigma_key(sigma)), on_level)
    if out is not None:
        p = _write_csv(Path(out) / "multilevel_levels.csv", ("level", "N", "rho", "L2err", "Linferr"), log)
        write_manifest(p, cfg, {"h": schedule.h.tolist(), "beta_at_order": schedule.beta(cfg.order)})
    return log


def fhi_degree_for(n: int, a: float = 1.2) -> int:
    """Largest L whose filtered rule (exact to 2 max(ceil(aL)-1, L)) has <= n nodes."""
    spec = FilterSpec(a)
    if product_quadrature_size(0) > n:
        raise ConfigError(f"n_grid: N={n} is too small for any FHI rule")
    L = 0
    while product_quadrature_size(2 * spec.max_degree(L + 1)) <= n:
        L += 1
    return L


@dataclass
class CompareRow:
    method: str
    n: int
    param: float
    l2: float
    time_s: float

    HEADER = ("method", "N", "param", "L2err", "time_s")

    def row(self) -> list:
        return [self.method, self.n, repr(self.param), repr(self.l2), f"{self.time_s:.6f}"]


def run_noise_compare(cfg: ExperimentConfig, out: Path | None = None,
                      methods=("qmcqi", "mcqi", "fhi")) -> dict[str, list[CompareRow]]:
    """QMC-QI, Monte Carlo QI and filtered hyperinterpolation on noisy data.

    The noise level is the first of ``cfg.noise_levels`` (0 if none). FHI
    at grid size N uses the degree from :func:`fhi_degree_for` and its
    product rule's nodes as sample sites; ``param`` holds L for FHI and
    rho for the QI methods.
    """
    f = make_target(cfg.target)
    profile = cfg.profile()
    rule = default_rule(cfg.l2_degree)
    sigma = cfg.noise_levels[0] if cfg.noise_levels else 0.0
    mc_rule = RhoRule(RhoRuleKind.POW_MC, None, cfg.rho_rule.c_rho)
    results: dict[str, list[CompareRow]] = {m: [] for m in methods}
    for i, n in enumerate(cfg.n_grid):
        if "qmcqi" in methods:
            t0 = time.perf_counter()
            rho = cfg.rhos()[i]
            x = spiral_points(n) if cfg.point_kind in (PointKind.RANDOM, PointKind.SPIRAL) else build_points(cfg, i)
            vals = f(x.points)
            noise = _noise(cfg, sigma, n, 11)
            if noise is not None:
                vals = add_noise(vals, noise)
            a = qi_qmc(x, vals, make_kernel(profile, rho), noisy=noise is not None)
            results["qmcqi"].append(CompareRow("qmcqi", n, rho, l2_error(a, f, rule, cfg.measure),
                                               time.perf_counter() - t0))
        if "mcqi" in methods:
            t0 = time.perf_counter()
            rho = mc_rule.rhos([n], cfg.order)[0]
            a = qi_mc(n, cell_seed(cfg.seed, n, 12), f, make_kernel(profile, rho), _noise(cfg, sigma, n, 13))
            results["mcqi"].append(CompareRow("mcqi", n, rho, l2_error(a, f, rule, cfg.measure),
                                              time.perf_counter() - t0))
        if "fhi" in methods:
            t0 = time.perf_counter()
            L = fhi_degree_for(n, cfg.filter_a)
            r = product_quadrature(2 * FilterSpec(cfg.filter_a).max_degree(L))
            vals = f(r.nodes)
            noise = _noise(cfg, sigma, n, 14)
            if noise is not None:
                vals = add_noise(vals, noise)
            h = filtered_hyperinterpolate(L, r, vals, cfg.filter_a)
            results["fhi"].append(CompareRow("fhi", len(r), L, l2_error(h, f, rule, cfg.measure),
                                             time.perf_counter() - t0))
    if out is not None:
        for m, rows in results.items():
            p = _write_csv(Path(out) / f"noise_compare_{m}.csv", CompareRow.HEADER, [r.row() for r in rows])
            write_manifest(p, cfg, {"method": m, "sigma": sigma})
    return results


def run_timing(cfg: ExperimentConfig, out: Path | None = None) -> list[list]:
    """Median wall time (construction + evaluation on ``cfg.linf_points``
    spiral points) of HI, FHI and QMC-QI over ``cfg.repetitions`` runs."""
    f = make_target(cfg.target)
    profile = cfg.profile()
    grid = spiral_points(cfg.linf_points).points
    rows = []
    for i, n in enumerate(cfg.n_grid):
        rho = cfg.rhos()[i]
        L = fhi_degree_for(n, cfg.filter_a)
        hi_rule = product_quadrature(2 * L)
        fhi_rule = product_quadrature(2 * FilterSpec(cfg.filter_a).max_degree(L))
        x = spiral_points(n) if cfg.point_kind in (PointKind.RANDOM, PointKind.SPIRAL) else build_points(cfg, i)
        cases = {
            "hi": lambda: hyperinterpolate(L, hi_rule, f(hi_rule.nodes))(grid),
            "fhi": lambda: filtered_hyperinterpolate(L, fhi_rule, f(fhi_rule.nodes), cfg.filter_a)(grid),
            "qmcqi": lambda: qi_qmc(x, f(x.points), make_kernel(profile, rho))(grid),
        }
        for method, fn in cases.items():
            times = []
            for _ in range(cfg.repetitions):
                t0 = time.perf_counter()
                fn()
                times.append(time.perf_counter() - t0)
            rows.append([method, n, f"{statistics.median(times):.6f}"])
    if out is not None:
        p = _write_csv(Path(out) / "timing.csv", ("method", "N", "time_s"), rows)
        write_manifest(p, cfg)
    return rows


def run_approx(cfg: ExperimentConfig, out: Path | None = None) -> ErrorReport:
    """One QI at the last grid size: sample dump plus an error row."""
    f = make_target(cfg.target)
    i = len(cfg.n_grid) - 1
    n, rho = cfg.n_grid[i], cfg.rhos()[i]
    t0 = time.perf_counter()
    kernel = make_kernel(cfg.profile(), rho)
    level = cfg.noise_levels[0] if cfg.noise_levels else 0.0
    if cfg.point_kind is PointKind.RANDOM:
        a = qi_mc(n, cell_seed(cfg.seed, n, 0), f, kernel, _noise(cfg, level, n, 0, 1))
    else:
        x = build_points(cfg, i)
        vals = f(x.points)
        noise = _noise(cfg, level, n, 1)
        if noise is not None:
            vals = add_noise(vals, noise)
        a = qi_qmc(x, vals, kernel, noisy=noise is not None)
    rep = ErrorReport(n, l2_error(a, f, default_rule(cfg.l2_degree), cfg.measure),
                      linf_error(a, f, spiral_points(cfg.linf_points)), None, time.perf_counter() - t0)
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        a.to_csv(out / "approx_samples.csv")
        write_manifest(out / "approx_samples.csv", cfg, {"rho": rho})
        p = _write_csv(out / "approx_error.csv", ErrorReport.HEADER, [rep.row()])
        write_manifest(p, cfg, {"rho": rho})
    return rep


RUNNERS = {
    Experiment.CONVERGENCE: run_convergence,
    Experiment.MULTILEVEL: run_multilevel_compare,
    Experiment.NOISE_COMPARE: run_noise_compare,
    Experiment.TIMING: run_timing,
    Experiment.APPROX: run_approx,
}

