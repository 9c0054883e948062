"""Monte-Carlo simulation of the drifted noncolliding particle system.

Two samplers share one plan type: an Euler-Maruyama integrator for the
interacting SDE with pairwise repulsion and the parabolic drift, and a
matrix sampler that diagonalizes a Hermitian Brownian motion added to
the diagonal initial matrix (exact in distribution, the reference for
the integrator).  An estimator turns ensembles into binned densities
comparable with the determinantal kernels.

Randomness is counter-based and keyed by (path block, step), so results
are bit-identical across runs and across any worker partition that
respects block boundaries.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .airy import airy_constants, airy_zeros
from .configs import PointConfiguration
from .errors import ArgumentError, ConvergenceError

__all__ = [
    "Ensemble",
    "SimPlan",
    "drift_coefficient",
    "estimate_correlation",
    "simulate",
]

# paths are sharded into fixed-size blocks with independent RNG streams;
# the block size is part of the output's identity and must not change
_BLOCK_PATHS = 4096
_MIN_STEP = 1e-12


def drift_coefficient(n):
    """Deterministic drift rate d1 + sum of reciprocals of the first n
    Airy zeros.

    The empty sum (n = 0) leaves the bare logarithmic-derivative
    constant d1.  The sum runs over Airy zeros regardless of the initial
    configuration being simulated; it diverges to -infinity like
    -(12/pi^2)^{1/3} n^{1/3}.
    """
    n = int(n)
    if n < 0:
        raise ArgumentError("zero count must be >= 0")
    d1 = airy_constants().d1
    if n == 0:
        return d1
    return d1 + float(np.sum(1.0 / airy_zeros(n).values))


@dataclass(frozen=True)
class SimPlan:
    """Immutable description of one simulation run.

    ``times`` are the output times, strictly increasing and positive;
    integration always starts at time zero from the atoms of
    ``initial``.  ``dt`` is the base Euler step (the matrix method
    ignores it); steps of at most (smallest initial gap)^2 / 8 keep the
    repulsion well resolved.  ``seed`` may be left unset at construction
    but is required by :func:`simulate`.
    """

    initial: PointConfiguration
    times: tuple
    paths: int
    dt: float = 1e-3
    method: str = "euler"
    seed: int = None

    def __post_init__(self):
        if not isinstance(self.initial, PointConfiguration):
            raise ArgumentError("initial must be a PointConfiguration")
        if not self.initial.is_simple:
            raise ArgumentError("initial atoms must be distinct")
        if self.initial.total_mass < 1:
            raise ArgumentError("initial configuration is empty")
        times = tuple(float(v) for v in self.times)
        if not times:
            raise ArgumentError("at least one output time is required")
        if times[0] <= 0.0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ArgumentError("times must be positive and strictly increasing")
        object.__setattr__(self, "times", times)
        if int(self.paths) < 1:
            raise ArgumentError("at least one path is required")
        object.__setattr__(self, "paths", int(self.paths))
        if not float(self.dt) > 0.0:
            raise ArgumentError("step size must be positive")
        object.__setattr__(self, "dt", float(self.dt))
        if self.method not in ("euler", "matrix"):
            raise ArgumentError("method must be 'euler' or 'matrix'")
        if self.seed is not None:
            seed = int(self.seed)
            if not 0 <= seed < 2**64:
                raise ArgumentError("seed must fit in 64 unsigned bits")
            object.__setattr__(self, "seed", seed)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Simulation output: ``samples[path, time, particle]`` positions,
    strictly ordered along the particle axis, the generating plan, and
    ``diagnostics = (collision rejections, max step shrink factor)``."""

    samples: np.ndarray
    plan: SimPlan
    diagnostics: tuple


def _segments(times, dt):
    # (absolute start, step, count) per output segment; steps divide each
    # segment exactly so output times are hit without interpolation
    out = []
    t_prev = 0.0
    for t in times:
        span = t - t_prev
        count = max(1, int(math.ceil(span / dt - 1e-9)))
        out.append((t_prev, span / count, count))
        t_prev = t
    return out


def _stream(seed, key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _pair_drift(y):
    # sum_k 1/(y_j - y_k) per particle; ordering keeps every gap nonzero
    diff = y[..., :, None] - y[..., None, :]
    n = y.shape[-1]
    idx = np.arange(n)
    diff[..., idx, idx] = np.inf
    return np.sum(1.0 / diff, axis=-1)


def _refine_step(y, t_abs, h, db, rate, rng, shrink, counters):
    # bisect one rejected Euler step, conditioning the finer noise on the
    # coarse increment (Brownian bridge), until every substep keeps the
    # strict ordering
    if h < _MIN_STEP:
        raise ConvergenceError(
            "euler step collapsed near a collision", t=t_abs, h=h
        )
    prop = y + (t_abs / 2.0 + rate + _pair_drift(y)) * h + db
    if np.all(np.diff(prop) > 0.0) and np.all(np.isfinite(prop)):
        return prop
    counters[0] += 1
    counters[1] = max(counters[1], shrink * 2.0)
    eta = rng.standard_normal(y.size)
    db1 = 0.5 * db + 0.5 * math.sqrt(h) * eta
    mid = _refine_step(y, t_abs, h / 2.0, db1, rate, rng, shrink * 2.0, counters)
    return _refine_step(mid, t_abs + h / 2.0, h / 2.0, db - db1, rate, rng, shrink * 2.0, counters)


def _euler_block(atoms, times, dt, seed, block, nb):
    n = atoms.size
    rate = drift_coefficient(n)
    y = np.tile(atoms, (nb, 1))
    out = np.empty((nb, len(times), n))
    rejections = 0
    max_shrink = 1.0
    gstep = 0
    for i_seg, (t0, h, count) in enumerate(_segments(times, dt)):
        for k in range(count):
            t_abs = t0 + k * h
            z = _stream(seed, (block, gstep, 0)).standard_normal((nb, n))
            db = math.sqrt(h) * z
            prop = y + (t_abs / 2.0 + rate + _pair_drift(y)) * h + db
            ok = np.all(np.diff(prop, axis=1) > 0.0, axis=1) & np.all(
                np.isfinite(prop), axis=1
            )
            if not np.all(ok):
                for i in np.flatnonzero(~ok):
                    counters = [1, 2.0]
                    rng = _stream(seed, (block, gstep, 1 + int(i)))
                    eta = rng.standard_normal(n)
                    db1 = 0.5 * db[i] + 0.5 * math.sqrt(h) * eta
                    mid = _refine_step(
                        y[i], t_abs, h / 2.0, db1, rate, rng, 2.0, counters
                    )
                    prop[i] = _refine_step(
                        mid, t_abs + h / 2.0, h / 2.0, db[i] - db1, rate, rng, 2.0, counters
                    )
                    rejections += counters[0]
                    max_shrink = max(max_shrink, counters[1])
            y = prop
            gstep += 1
        out[:, i_seg, :] = y
    return out, rejections, max_shrink


def _matrix_block(atoms, times, seed, block, nb):
    n = atoms.size
    rate = drift_coefficient(n)
    iu, ju = np.triu_indices(n, 1)
    dh = np.zeros((nb, n, n), dtype=complex)
    out = np.empty((nb, len(times), n))
    t_prev = 0.0
    for i, t in enumerate(times):
        rng = _stream(seed, (block, i, 0))
        root = math.sqrt(t - t_prev)
        diag = rng.standard_normal((nb, n))
        re = rng.standard_normal((nb, iu.size))
        im = rng.standard_normal((nb, iu.size))
        step = np.zeros((nb, n, n), dtype=complex)
        step[:, np.arange(n), np.arange(n)] = diag
        if iu.size:
            z = (re + 1j * im) / math.sqrt(2.0)
            step[:, iu, ju] = z
            step[:, ju, iu] = np.conj(z)
        dh += root * step
        lam = np.linalg.eigvalsh(dh + np.diag(atoms.astype(complex)))
        out[:, i, :] = lam + t * t / 4.0 + rate * t
        t_prev = t
    return out, 0, 1.0


def _run_block(args):
    method, atoms, times, dt, seed, block, nb = args
    if method == "euler":
        return _euler_block(atoms, times, dt, seed, block, nb)
    return _matrix_block(atoms, times, seed, block, nb)


def simulate(plan, workers=None):
    """Sample the plan's ensemble.

    The Euler route integrates the interacting SDE with the parabolic
    and zero-sum drifts, rejecting and bisecting any step that breaks
    the strict particle ordering (noise refined by Brownian-bridge
    conditioning, so the underlying path is unchanged); the matrix route
    diagonalizes the initial diagonal matrix plus a Hermitian Brownian
    increment and adds the deterministic shift, which is exact in
    distribution.  ``workers`` > 1 shards path blocks across processes;
    output is bit-identical for every worker count.

    Raises
    ------
    ArgumentError
        If the plan carries no seed.
    ConvergenceError
        If an Euler step collapses below the minimum step near a
        collision, or output ordering is violated.
    """
    if plan.seed is None:
        raise ArgumentError("plan has no seed; simulation must be reproducible")
    atoms = np.asarray(plan.initial.positions, dtype=float)
    blocks = []
    start = 0
    b = 0
    while start < plan.paths:
        nb = min(_BLOCK_PATHS, plan.paths - start)
        blocks.append((plan.method, atoms, plan.times, plan.dt, plan.seed, b, nb))
        start += nb
        b += 1
    if workers is not None and int(workers) > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            results = list(pool.map(_run_block, blocks))
    else:
        results = [_run_block(a) for a in blocks]
    samples = np.concatenate([r[0] for r in results], axis=0)
    rejections = sum(r[1] for r in results)
    max_shrink = max(r[2] for r in results)
    if not np.all(np.diff(samples, axis=2) > 0.0):
        raise ConvergenceError("output ordering violated")
    return Ensemble(samples=samples, plan=plan, diagnostics=(rejections, max_shrink))


def estimate_correlation(ens, t, bins, rho2=False):
    """Binned density estimate at one output time.

    Returns ``(density, stderr)`` per unit length, or with ``rho2`` also
    the two-point matrix ``rho2[b, c] = E[count_b (count_c - delta_bc)]``
    per unit squared length.  Standard errors treat each path's bin
    occupancy as binomial over the particle count, which is exact for
    0/1 occupancies and conservative (repulsion anticorrelates) for the
    rest.

    Raises
    ------
    ArgumentError
        If the ensemble is empty, ``t`` is not an output time, or the
        bin grid is not strictly increasing with at least two edges.
    """
    if ens.samples.size == 0:
        raise ArgumentError("ensemble has no samples")
    times = np.asarray(ens.plan.times)
    hit = np.flatnonzero(np.abs(times - float(t)) <= 1e-12)
    if hit.size == 0:
        raise ArgumentError("t is not one of the plan's output times")
    edges = np.asarray(bins, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise ArgumentError("bins must be a strictly increasing grid of edges")
    y = ens.samples[:, int(hit[0]), :]
    n_paths, n_part = y.shape
    n_bins = edges.size - 1
    idx = np.searchsorted(edges, y.ravel(), side="right") - 1
    inside = (idx >= 0) & (idx < n_bins) & (y.ravel() < edges[-1])
    path_of = np.repeat(np.arange(n_paths), n_part)
    counts = np.zeros((n_paths, n_bins))
    np.add.at(counts, (path_of[inside], idx[inside]), 1.0)
    width = np.diff(edges)
    dens = counts.sum(axis=0) / (n_paths * width)
    p_hat = counts.sum(axis=0) / (n_paths * n_part)
    err = np.sqrt(n_part * p_hat * (1.0 - p_hat) / n_paths) / width
    if not rho2:
        return dens, err
    cross = counts.T @ counts - np.diag(counts.sum(axis=0))
    pair = cross / n_paths / np.outer(width, width)
    return dens, err, pair
