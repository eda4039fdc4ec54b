"""Monte Carlo simulation of the cone-supported jump process.

Jumps larger than the truncation ``delta`` form a compound Poisson process
with rate ``nu(|z| > delta)``; smaller jumps are dropped or replaced by a
Gaussian with the same covariance.  A modulated kernel ``m(x, y) J^alpha`` is
simulated by thinning a dominating stream of rate ``kappa`` times that.

Randomness comes from counter-based streams addressed by ``(seed, stream,
path)``, so results do not depend on the number of worker threads.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import _backend, _fallback
from .errors import ContractViolation, DomainError, HorizonTooShortError
from .geometry import ConeUnion, contains_many, union_contains
from .levy import (
    _check_alpha,
    _qmc_directions,
    cap_surface_measure,
    cone_arcs,
    small_jump_covariance,
    sphere_area,
    tail_mass,
)
from .rng import MAX_PATHS, PathStream, stream_key

POLICIES = ("drop", "gaussian-moment-match")
N_BATCHES = 20
MIN_KDE_PATHS = 1000
MAX_CENSORED = 0.05


def default_threads() -> int:
    """Worker count from ``CONEKERNEL_THREADS`` (default 1)."""
    raw = os.environ.get("CONEKERNEL_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise DomainError(f"CONEKERNEL_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise DomainError("CONEKERNEL_THREADS must be >= 1")
    return n


@dataclass(frozen=True)
class PathConfig:
    """Horizon, truncation, small-jump policy and random stream of a simulation."""

    horizon: float
    truncation: float
    small_jump_policy: str = "drop"
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if not float(self.horizon) > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon!r}")
        if not float(self.truncation) > 0.0:
            raise DomainError(f"truncation must be positive, got {self.truncation!r}")
        if self.small_jump_policy not in POLICIES:
            raise DomainError(f"small_jump_policy must be one of {POLICIES}")
        stream_key(int(self.seed), int(self.stream_id))
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "truncation", float(self.truncation))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream_id", int(self.stream_id))

    def replace(self, **kw) -> "PathConfig":
        d = dict(horizon=self.horizon, truncation=self.truncation,
                 small_jump_policy=self.small_jump_policy, seed=self.seed,
                 stream_id=self.stream_id)
        d.update(kw)
        return PathConfig(**d)


@dataclass(frozen=True)
class ModulatedKernel:
    """``m(x, y) = base + amplitude * sin(frequency * (x_1 + y_1))``, meant to lie in ``[1/kappa, kappa]``.

    The range is not enforced at construction; the simulator checks every
    evaluated value and raises :class:`ContractViolation` on the first one
    outside the band.
    """

    kappa: float = 1.0
    base: float = 1.0
    amplitude: float = 0.0
    frequency: float = 1.0

    def __post_init__(self):
        if not float(self.kappa) >= 1.0:
            raise DomainError(f"kappa must be >= 1, got {self.kappa!r}")
        for name in ("base", "amplitude", "frequency"):
            if not math.isfinite(float(getattr(self, name))):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "kappa", float(self.kappa))

    @classmethod
    def constant(cls, value: float, kappa: float) -> "ModulatedKernel":
        return cls(kappa=kappa, base=value, amplitude=0.0)

    def __call__(self, x, y) -> float:
        return self.base + self.amplitude * math.sin(self.frequency * (float(x[0]) + float(y[0])))

    @property
    def value_range(self) -> tuple[float, float]:
        return self.base - abs(self.amplitude), self.base + abs(self.amplitude)

    def spot_check(self, n: int = 1000, seed: int = 0, scale: float = 10.0) -> None:
        """Evaluate ``m`` on random pairs; raise :class:`ContractViolation` if out of band or asymmetric."""
        rng = np.random.default_rng(seed)
        P = rng.uniform(-scale, scale, size=(n, 2, 2))
        lo, hi = 1.0 / self.kappa, self.kappa
        for x, y in P:
            v = self(x, y)
            if v < lo * (1 - 1e-12) or v > hi * (1 + 1e-12):
                raise ContractViolation(f"m(x, y) = {v} outside [{lo}, {hi}]")
            if v != self(y, x):
                raise ContractViolation("modulation is not symmetric")


@dataclass
class PathRecord:
    """One trajectory: jump times, increments and post-jump positions."""

    path_id: int
    origin: np.ndarray
    jump_times: np.ndarray
    jumps: np.ndarray
    positions: np.ndarray
    final: np.ndarray
    horizon: float

    @property
    def n_jumps(self) -> int:
        return int(self.jump_times.size)

    def position_at(self, t: float) -> np.ndarray:
        """Right-continuous position at time ``t`` (jump part only for the Gaussian policy)."""
        k = int(np.searchsorted(self.jump_times, t, side="right"))
        return self.origin.copy() if k == 0 else self.positions[k - 1].copy()

    def check(self, V: ConeUnion, delta: float) -> None:
        """Assert increasing times and that every increment lies in ``V`` with norm above ``delta``."""
        if np.any(np.diff(self.jump_times) <= 0):
            raise ContractViolation("jump times are not strictly increasing")
        if self.n_jumps and (self.jump_times[0] <= 0 or self.jump_times[-1] > self.horizon):
            raise ContractViolation("jump times outside (0, T]")
        for z in self.jumps:
            if not np.linalg.norm(z) > delta or not union_contains(V, z):
                raise ContractViolation(f"increment {z} violates the support of the kernel")


@dataclass
class EstimatorResult:
    """Point estimates with standard errors and provenance."""

    point_estimates: np.ndarray
    standard_errors: np.ndarray
    sample_count: int
    seed: int
    stream_id: int
    extra: dict = field(default_factory=dict)

    def to_csv(self, path, labels=None) -> None:
        labels = labels if labels is not None else [str(i) for i in range(len(self.point_estimates))]
        with open(path, "w") as fh:
            fh.write("# schema: label str, estimate float, standard_error float\n")
            fh.write("label,estimate,standard_error\n")
            for lab, v, s in zip(labels, self.point_estimates, self.standard_errors):
                fh.write(f"{lab},{float(v)!r},{float(s)!r}\n")

    def summary(self) -> dict:
        return {
            "point_estimates": [float(v) for v in self.point_estimates],
            "standard_errors": [float(v) for v in self.standard_errors],
            "sample_count": int(self.sample_count),
            "seed": int(self.seed),
            "stream_id": int(self.stream_id),
        }


@dataclass(frozen=True)
class JumpSet:
    """``A = {z : r_min < |z| <= r_max, z in W}``; ``W = None`` means every direction."""

    r_min: float
    r_max: float = math.inf
    cones: ConeUnion | None = None

    def __post_init__(self):
        if not 0.0 < float(self.r_min) < float(self.r_max):
            raise DomainError("need 0 < r_min < r_max")

    def contains(self, z) -> bool:
        r = float(np.linalg.norm(z))
        if not (self.r_min < r <= self.r_max):
            return False
        return True if self.cones is None else union_contains(self.cones, z)


@dataclass
class LevySystemComparison:
    """Both sides of the jump-counting identity with standard errors."""

    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    diff_se: float
    n_paths: int
    seed: int

    @property
    def z_score(self) -> float:
        if self.diff_se == 0.0:
            return 0.0 if self.lhs == self.rhs else math.inf
        return (self.lhs - self.rhs) / self.diff_se

    def agrees(self, n_se: float = 3.0) -> bool:
        return abs(self.lhs - self.rhs) <= n_se * self.diff_se


# ----------------------------------------------------------------------------
# kernel parameters


def _model_params(V: ConeUnion, alpha: float, delta: float, config: PathConfig | None = None,
                  kernel: ModulatedKernel | None = None) -> dict:
    d = V.dimension
    caps = np.array([cap_surface_measure(c.aperture, d) for c in V.cones])
    cum = np.cumsum(caps / caps.sum())
    cum[-1] = 1.0
    axes = V.axes
    ap = V.apertures
    sinpow = np.array([math.pow(math.sin(a), float(d - 2)) for a in ap])
    kappa = 1.0 if kernel is None else kernel.kappa
    p = {
        "d": d,
        "axes": axes,
        "cosap": np.cos(ap),
        "aperture": ap,
        "sinpow": sinpow,
        "cum": cum,
        "alpha": float(alpha),
        "delta": float(delta),
        "rate": kappa * tail_mass(V, alpha, delta),
        "horizon": 1.0,
        "gauss": 0,
        "chol": np.zeros((d, d)),
        "modulated": 0 if kernel is None else 1,
        "base": 1.0 if kernel is None else kernel.base,
        "amp": 0.0 if kernel is None else kernel.amplitude,
        "freq": 1.0 if kernel is None else kernel.frequency,
        "kappa": kappa,
        "radius": math.inf,
        "rmin": 0.0,
        "rmax": math.inf,
        "waxes": np.zeros((0, d)),
        "wcos": np.zeros(0),
        "x0": np.zeros(d),
        "seed": 0,
        "stream": 0,
    }
    if config is not None:
        p["horizon"] = config.horizon
        p["seed"] = config.seed
        p["stream"] = config.stream_id
        p["k0"], p["k1"] = stream_key(config.seed, config.stream_id)
        if config.small_jump_policy == "gaussian-moment-match":
            p["gauss"] = 1
            p["chol"] = np.linalg.cholesky(small_jump_covariance(V, alpha, delta))
    _add_lists(p)
    return p


def _add_lists(p: dict) -> None:
    # plain Python copies for the scalar reference implementation
    p["axes_list"] = [list(map(float, a)) for a in np.atleast_2d(p["axes"])]
    p["aperture_list"] = [float(a) for a in p["aperture"]]
    p["cosap_list"] = [float(c) for c in p["cosap"]]
    p["sinpow_list"] = [float(s) for s in p["sinpow"]]
    p["cum_list"] = [float(c) for c in p["cum"]]
    p["chol_list"] = [list(map(float, r)) for r in np.atleast_2d(p["chol"])]
    p["waxes_list"] = [list(map(float, a)) for a in np.atleast_2d(p["waxes"]) if len(a)]
    p["wcos_list"] = [float(c) for c in p["wcos"]]
    p["x0"] = [float(v) for v in p["x0"]]


def _point(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != d:
        raise DomainError(f"expected a point in R^{d}, got {x.size} components")
    return x


def _run(p: dict, mode: int, n_paths: int, threads: int | None, first: int = 0):
    n_paths = int(n_paths)
    if n_paths < 1 or first + n_paths > MAX_PATHS:
        raise DomainError("path count must be between 1 and 2^32")
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise DomainError("threads must be >= 1")
    out, nj, status = _backend.simulate_paths(p, mode, first, n_paths, threads)
    if np.any(status == _fallback.STATUS_CONTRACT):
        raise ContractViolation("modulation value outside [1/kappa, kappa] encountered")
    if np.any(status == _fallback.STATUS_OVERFLOW):
        raise OverflowError("random draw budget of a path exhausted; lower the horizon")
    return out, nj


# ----------------------------------------------------------------------------
# sampling primitives


def sample_direction(V: ConeUnion, rng: PathStream) -> np.ndarray:
    """A direction with the normalised surface-measure law on ``V ∩ S^{d-1}``."""
    return np.array(_fallback.sample_direction(_model_params(V, 1.0, 1.0), rng))


def sample_jump(V: ConeUnion, alpha: float, delta: float, rng: PathStream) -> np.ndarray:
    """``r u`` with ``u`` from :func:`sample_direction` and ``P(r > s) = (delta / s)^alpha``."""
    a = _check_alpha(alpha)
    if not float(delta) > 0:
        raise DomainError("delta must be positive")
    return np.array(_fallback.sample_jump(_model_params(V, a, delta), rng))


def sample_jumps(V: ConeUnion, alpha: float, delta: float, n: int, seed: int = 0,
                 stream_id: int = 0, threads: int | None = None) -> np.ndarray:
    """``n`` independent jumps, the ``i``-th being the first draw of path ``i``'s stream.

    Row ``i`` equals ``sample_jump(V, alpha, delta, PathStream(seed, stream_id, i))``.
    """
    a = _check_alpha(alpha)
    cfg = PathConfig(horizon=1.0, truncation=delta, seed=seed, stream_id=stream_id)
    p = _model_params(V, a, cfg.truncation, cfg)
    p["x0"] = [0.0] * V.dimension
    out, _ = _run(p, _fallback.MODE_JUMP, n, threads)
    return out


# ----------------------------------------------------------------------------
# paths


def _record(p: dict, path_id: int, x0: np.ndarray, horizon: float) -> PathRecord:
    rec = {"times": [], "jumps": [], "positions": []}
    _, _, status = _fallback.run_path(p, _fallback.MODE_ENDPOINT, path_id, rec)
    if status == _fallback.STATUS_CONTRACT:
        raise ContractViolation("modulation value outside [1/kappa, kappa] encountered")
    d = x0.size
    return PathRecord(
        path_id=path_id,
        origin=x0.copy(),
        jump_times=np.array(rec["times"], dtype=float),
        jumps=np.array(rec["jumps"], dtype=float).reshape(-1, d),
        positions=np.array(rec["positions"], dtype=float).reshape(-1, d),
        final=np.array(rec["final"], dtype=float),
        horizon=horizon,
    )


def simulate_levy_path(x0, config: PathConfig, V: ConeUnion, alpha: float,
                       path_id: int = 0) -> PathRecord:
    """One path of the truncated Lévy process started at ``x0``."""
    a = _check_alpha(alpha)
    x0 = _point(x0, V.dimension)
    p = _model_params(V, a, config.truncation, config)
    p["x0"] = list(map(float, x0))
    return _record(p, int(path_id), x0, config.horizon)


def simulate_modulated_path(x0, config: PathConfig, V: ConeUnion, alpha: float,
                            kernel: ModulatedKernel, path_id: int = 0) -> PathRecord:
    """One path for the kernel ``m(x, y) J^alpha(x, y)`` by thinning.

    Raises
    ------
    ContractViolation
        If ``m`` leaves ``[1/kappa, kappa]`` at an evaluated pair.
    """
    a = _check_alpha(alpha)
    x0 = _point(x0, V.dimension)
    p = _model_params(V, a, config.truncation, config, kernel)
    p["x0"] = list(map(float, x0))
    return _record(p, int(path_id), x0, config.horizon)


def simulate_endpoints(x0, n_paths: int, config: PathConfig, V: ConeUnion, alpha: float,
                       kernel: ModulatedKernel | None = None, threads: int | None = None):
    """Positions at the horizon and jump counts of ``n_paths`` paths (bulk kernel)."""
    a = _check_alpha(alpha)
    p = _model_params(V, a, config.truncation, config, kernel)
    p["x0"] = list(map(float, _point(x0, V.dimension)))
    return _run(p, _fallback.MODE_ENDPOINT, n_paths, threads)


def write_path_records(records, path) -> None:
    """Stream records as ``path_id,jump_time,x1,...,xd`` (time 0 row carries the origin)."""
    records = list(records)
    d = records[0].origin.size if records else 2
    cols = ",".join(f"x{k + 1}" for k in range(d))
    with open(path, "w") as fh:
        fh.write(f"# schema: path_id int, jump_time float, {', '.join(f'x{k + 1} float' for k in range(d))}; "
                 "row at jump_time 0 is the origin, later rows are post-jump positions\n")
        fh.write(f"path_id,jump_time,{cols}\n")
        for rec in records:
            fh.write(f"{rec.path_id},0.0," + ",".join(repr(float(v)) for v in rec.origin) + "\n")
            for t, x in zip(rec.jump_times, rec.positions):
                fh.write(f"{rec.path_id},{float(t)!r}," + ",".join(repr(float(v)) for v in x) + "\n")


def read_path_records(path) -> dict[int, np.ndarray]:
    """Rows of a path CSV grouped by ``path_id`` (columns ``jump_time, x1..xd``)."""
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=2, ndmin=2)
    return {int(i): data[data[:, 0] == i, 1:] for i in np.unique(data[:, 0])}


# ----------------------------------------------------------------------------
# estimators


def _batch_se(per_path: np.ndarray) -> np.ndarray:
    """Standard error by batch means over ``N_BATCHES`` contiguous batches (columns independent)."""
    n = per_path.shape[0]
    size = n // N_BATCHES
    if size < 1:
        raise DomainError("too few samples for batch means")
    batches = per_path[: size * N_BATCHES].reshape(N_BATCHES, size, -1).mean(axis=1)
    return batches.std(axis=0, ddof=1) / math.sqrt(N_BATCHES)


def epanechnikov_kde(samples: np.ndarray, probes: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Product Epanechnikov estimate at each probe with batch-means standard errors."""
    n, d = samples.shape
    est = np.empty(len(probes))
    se = np.empty(len(probes))
    norm = (0.75 ** d) / (h ** d)
    for j, y in enumerate(probes):
        u = (samples - y[None, :]) / h
        w = np.prod(np.clip(1.0 - u * u, 0.0, None), axis=1) * norm
        est[j] = w.sum() / n
        se[j] = _batch_se(w[:, None])[0]
    return est, se


def estimate_density(t: float, x0, probes, n_paths: int, config: PathConfig, V: ConeUnion,
                     alpha: float, bandwidth: float = 1.0, kernel: ModulatedKernel | None = None,
                     threads: int | None = None) -> EstimatorResult:
    """Kernel-density estimate of the transition density at ``probes`` after time ``t``.

    The bandwidth is ``bandwidth * t^{1/alpha} * n_paths^{-1/(d+4)}``.
    """
    a = _check_alpha(alpha)
    t = float(t)
    if not 0.0 < t <= config.horizon:
        raise DomainError("need 0 < t <= horizon")
    if int(n_paths) < MIN_KDE_PATHS:
        raise DomainError(f"kernel density estimation needs at least {MIN_KDE_PATHS} paths")
    d = V.dimension
    P = np.atleast_2d(np.asarray(probes, dtype=float))
    if P.shape[1] != d:
        raise DomainError(f"probes must have {d} columns")
    ends, nj = simulate_endpoints(x0, n_paths, config.replace(horizon=t), V, a, kernel, threads)
    h = bandwidth * t ** (1.0 / a) * int(n_paths) ** (-1.0 / (d + 4))
    est, se = epanechnikov_kde(ends, P, h)
    return EstimatorResult(est, se, int(n_paths), config.seed, config.stream_id,
                           {"bandwidth": h, "mean_jumps": float(nj.mean()), "endpoints": ends})


def exit_curve(exit_times: np.ndarray, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``P(tau <= t)`` on ``times`` with binomial standard errors."""
    n = exit_times.size
    srt = np.sort(exit_times)
    p = np.searchsorted(srt, times, side="right") / n
    return p, np.sqrt(np.maximum(p * (1 - p), 1.0 / n) / n)


def estimate_exit_time(x0, r: float, n_paths: int, config: PathConfig, V: ConeUnion, alpha: float,
                       times=None, kernel: ModulatedKernel | None = None,
                       threads: int | None = None) -> EstimatorResult:
    """Mean first exit time from ``B(x0, r)`` and the curve ``t -> P(tau <= t)``.

    Raises
    ------
    HorizonTooShortError
        If 5% or more of the paths are still inside at the horizon.
    """
    a = _check_alpha(alpha)
    r = float(r)
    if not r > 10.0 * config.truncation:
        raise DomainError("exit radius must exceed 10 times the truncation")
    p = _model_params(V, a, config.truncation, config, kernel)
    p["x0"] = list(map(float, _point(x0, V.dimension)))
    p["radius"] = r
    out, nj = _run(p, _fallback.MODE_EXIT, n_paths, threads)
    tau = out[:, 0]
    censored = float(np.mean(~np.isfinite(tau)))
    if censored >= MAX_CENSORED:
        raise HorizonTooShortError(
            f"{100 * censored:.1f}% of paths did not exit by T = {config.horizon}; raise the horizon")
    if times is None:
        times = np.geomspace(config.horizon * 1e-3, config.horizon, 10)
    times = np.asarray(times, dtype=float)
    curve, curve_se = exit_curve(tau, times)
    capped = np.minimum(tau, config.horizon)
    mean = float(capped.mean())
    se = float(_batch_se(capped[:, None])[0])
    return EstimatorResult(np.array([mean]), np.array([se]), int(n_paths), config.seed,
                           config.stream_id,
                           {"censored_fraction": censored, "times": times, "curve": curve,
                            "curve_se": curve_se, "exit_times": tau})


# ----------------------------------------------------------------------------
# Levy system


def _radial_cos_integral(b: float, rmin: float, rmax: float, alpha: float) -> float:
    """``int_{rmin}^{rmax} r^{-1-alpha} cos(b r) dr``."""
    b = abs(b)
    if b * rmin < 1e-14 and math.isinf(rmax):
        return rmin ** (-alpha) / alpha
    f = lambda r: r ** (-1.0 - alpha)  # noqa: E731
    if math.isinf(rmax):
        cut = max(rmin, 4.0 * math.pi / max(b, 1e-300))
        head = 0.0
        if cut > rmin:
            head = integrate.quad(lambda r: f(r) * math.cos(b * r), rmin, cut,
                                  limit=400, epsabs=0.0, epsrel=1e-11)[0]
        tail = integrate.quad(f, cut, math.inf, weight="cos", wvar=b, limlst=200)[0]
        return head + tail
    return integrate.quad(lambda r: f(r) * math.cos(b * r), rmin, rmax, limit=400,
                          epsabs=0.0, epsrel=1e-11)[0]


def _arc_intersection(a: np.ndarray, b: np.ndarray) -> list[tuple[float, float]]:
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if hi > lo:
                out.append((lo, hi))
    return out


def jump_set_moments(A: JumpSet, V: ConeUnion, alpha: float, frequency: float,
                     tol: float = 1e-8) -> tuple[float, float]:
    """``M = nu(A)`` and ``K = int_{A ∩ V} cos(frequency * z_1) |z|^{-d-alpha} dz``.

    With these,
    ``int_A m(x, x + z) nu(dz) = base * M + amplitude * K * sin(2 frequency x_1)``
    because the odd part integrates to zero over the symmetric set.
    """
    a = _check_alpha(alpha)
    d = V.dimension
    radial_mass = (A.r_min ** (-a) - (0.0 if math.isinf(A.r_max) else A.r_max ** (-a))) / a
    if d == 2:
        arcs = cone_arcs(V)
        if A.cones is not None:
            arcs = np.array(_arc_intersection(arcs, cone_arcs(A.cones))).reshape(-1, 2)
        M = float(np.sum(arcs[:, 1] - arcs[:, 0])) * radial_mass if arcs.size else 0.0
        K = 0.0
        for lo, hi in arcs:
            K += integrate.quad(
                lambda phi: _radial_cos_integral(frequency * math.cos(phi), A.r_min, A.r_max, a),
                lo, hi, epsabs=0.0, epsrel=tol, limit=200)[0]
        return M, K
    D = _qmc_directions(d, 14, 0, 0)
    keep = contains_many(V, D)
    if A.cones is not None:
        keep &= contains_many(A.cones, D)
    w = sphere_area(d) / D.shape[0]
    M = w * float(keep.sum()) * radial_mass
    K = w * sum(_radial_cos_integral(frequency * u[0], A.r_min, A.r_max, a) for u in D[keep])
    return M, K


def levy_system_check(A: JumpSet, T: float, n_paths: int, config: PathConfig, V: ConeUnion,
                      alpha: float, kernel: ModulatedKernel | None = None, x0=None,
                      threads: int | None = None) -> LevySystemComparison:
    """Compare the mean number of jumps in ``A`` with the time-integrated kernel mass of ``A``.

    The right side is evaluated exactly along each piecewise-constant path:
    holding time times ``int_A J(X, X + z) dz``.
    """
    a = _check_alpha(alpha)
    if not A.r_min > config.truncation:
        raise DomainError("the jump set must stay at distance > truncation from 0")
    cfg = config.replace(horizon=float(T))
    x0 = np.zeros(V.dimension) if x0 is None else _point(x0, V.dimension)
    p = _model_params(V, a, cfg.truncation, cfg, kernel)
    p["x0"] = list(map(float, x0))
    p["rmin"], p["rmax"] = float(A.r_min), float(A.r_max)
    if A.cones is not None:
        p["waxes"] = A.cones.axes
        p["wcos"] = np.cos(A.cones.apertures)
    _add_lists(p)
    out, _ = _run(p, _fallback.MODE_LEVYSYS, n_paths, threads)
    freq = 1.0 if kernel is None else kernel.frequency
    M, K = jump_set_moments(A, V, a, freq)
    base = 1.0 if kernel is None else kernel.base
    amp = 0.0 if kernel is None else kernel.amplitude
    lhs_i = out[:, 0]
    rhs_i = base * M * cfg.horizon + amp * K * out[:, 1]
    n = lhs_i.size
    sd = lambda v: float(v.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0  # noqa: E731
    return LevySystemComparison(float(lhs_i.mean()), sd(lhs_i), float(rhs_i.mean()), sd(rhs_i),
                                sd(lhs_i - rhs_i), n, cfg.seed)
