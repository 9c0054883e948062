"""Determinantal observables for the noncolliding ensemble.

Multitime product densities come out of block determinants of a
space-time kernel; gap probabilities of the stationary edge law reduce
to a Fredholm determinant of the stationary kernel, with a Painleve II
route as an independent check.  Two further diagnostics probe the
relaxation process: the long-time defect against the extended kernel,
and the short-time recovery of the initial zeros.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .airy import ai, ai_prime, airy_zeros
from .errors import ArgumentError, ConvergenceError
from .kernels import KernelSpec, airy_kernel, kernel_batch, kernel_relaxation
from .quad import panel_rule, rule_for_frequency

__all__ = [
    "CorrelationQuery",
    "GapQuery",
    "correlation_function",
    "density_profile",
    "tracy_widom",
    "relaxation_residual",
    "initial_recovery",
]

_MAX_POINTS = 64


@dataclass(frozen=True)
class CorrelationQuery:
    """A product-density request: one tuple of positions per time.

    ``blocks`` is a sequence of ``(time, positions)`` pairs with strictly
    increasing times.  Positions are sorted at construction: the block
    determinant is invariant under within-block permutations, so fixing a
    canonical order turns that invariance into an exact identity instead
    of a floating-point accident.
    """

    kernel: KernelSpec
    blocks: tuple

    def __post_init__(self):
        if not isinstance(self.kernel, KernelSpec):
            raise ArgumentError("kernel must be a KernelSpec")
        norm = []
        for entry in self.blocks:
            try:
                t_m, pts = entry
            except (TypeError, ValueError):
                raise ArgumentError("each block must be a (time, points) pair")
            pts = tuple(sorted(float(p) for p in np.ravel(pts)))
            if not pts:
                raise ArgumentError("blocks must contain at least one point")
            norm.append((float(t_m), pts))
        if not norm:
            raise ArgumentError("at least one block is required")
        times = [t_m for t_m, _ in norm]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ArgumentError("block times must be strictly increasing")
        if sum(len(pts) for _, pts in norm) > _MAX_POINTS:
            raise ArgumentError("total point count exceeds the determinant guard")
        object.__setattr__(self, "blocks", tuple(norm))


def correlation_function(query):
    """Product density of the query's points: det [K(t_m,x_j; t_n,x_k)].

    A single equal-time block gives the n-point function rho_n; multiple
    blocks give the multitime version.  Warns when the assembled matrix
    is ill-conditioned (condition number above 1e12), which happens by
    design when two points nearly coincide.
    """
    pts = [(t_m, x) for t_m, xs in query.blocks for x in xs]
    n = len(pts)
    pairs = [(si, xi, tj, yj) for si, xi in pts for tj, yj in pts]
    mat = kernel_batch(query.kernel, pairs).reshape(n, n)
    if n > 1:
        cond = np.linalg.cond(mat)
        if not np.isfinite(cond) or cond > 1e12:
            warnings.warn(
                "correlation matrix is ill-conditioned (cond={:.3e})".format(cond),
                RuntimeWarning,
                stacklevel=2,
            )
    return float(np.linalg.det(mat))


def density_profile(kernel, t, grid):
    """Diagonal kernel values K(t,x;t,x) over a spatial grid."""
    if kernel.kind in ("finite_config", "infinite_config") and not float(t) > 0.0:
        raise ArgumentError("process kernels need t > 0")
    grid = np.asarray(grid, dtype=float)
    t = float(t)
    pts = [(t, float(v), t, float(v)) for v in np.ravel(grid)]
    return kernel_batch(kernel, pts).reshape(grid.shape)


@dataclass(frozen=True)
class GapQuery:
    """Right-edge gap probability request F(s) = P(no particle > s).

    ``discretization`` is ``(nodes, map_scale)``: the Fredholm route puts
    ``nodes`` Gauss-Legendre points through the rational map
    x = s + map_scale (1+u)/(1-u); the Painleve route ignores it.
    """

    s: float
    method: str = "fredholm"
    discretization: tuple = (80, 4.0)

    def __post_init__(self):
        s = float(self.s)
        if not -10.0 <= s <= 6.0:
            raise ArgumentError("left endpoint outside the supported range [-10, 6]")
        object.__setattr__(self, "s", s)
        if self.method not in ("fredholm", "painleve"):
            raise ArgumentError("method must be 'fredholm' or 'painleve'")
        try:
            n, scale = self.discretization
        except (TypeError, ValueError):
            raise ArgumentError("discretization must be (nodes, map_scale)")
        n = int(n)
        scale = float(scale)
        if n < 8:
            raise ArgumentError("at least 8 quadrature nodes are required")
        if not scale > 0.0:
            raise ArgumentError("map scale must be positive")
        object.__setattr__(self, "discretization", (n, scale))


def _tw_fredholm(s, n, scale):
    # Nystrom on (s, inf) via the rational map; the kernel is symmetric
    # positive with spectrum in [0, 1), so an eigenvalue product is the
    # stable way to the determinant
    u, w = np.polynomial.legendre.leggauss(n)
    x = s + scale * (1.0 + u) / (1.0 - u)
    dx = w * 2.0 * scale / (1.0 - u) ** 2
    # far nodes sit where the kernel is below 1e-250; pulling them in to
    # the edge of double range keeps the evaluator inside its envelope
    # without changing the determinant
    x = np.minimum(x, 100.0)
    root = np.sqrt(dx)
    mat = root[:, None] * airy_kernel(x[:, None], x[None, :]) * root[None, :]
    lam = np.linalg.eigvalsh(mat)
    return float(np.prod(1.0 - lam))


def _tw_painleve(s):
    # Hastings-McLeod branch: seed at the right with the Airy asymptote
    # and integrate down, carrying J = int q^2 and the gap exponent
    # I = int (y-x) q^2 alongside; both seeds are exact Airy primitives
    x0 = 8.0
    q0 = float(ai(x0))
    p0 = float(ai_prime(x0))
    j0 = p0 * p0 - x0 * q0 * q0
    i0 = (2.0 * x0 * x0 * q0 * q0 - 2.0 * x0 * p0 * p0 - q0 * p0) / 3.0
    if s >= x0:
        return math.exp(-i0)

    def rhs(xv, yv):
        q, p, _, j = yv
        return (p, xv * q + 2.0 * q**3, -j, -q * q)

    def blow_up(xv, yv):
        return abs(yv[0]) - 6.0

    blow_up.terminal = True
    sol = solve_ivp(
        rhs,
        (x0, s),
        (q0, p0, i0, j0),
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        events=blow_up,
    )
    if sol.status != 0 or not sol.success:
        raise ConvergenceError(
            "Painleve II integration left the Hastings-McLeod branch; "
            "use the fredholm method",
            s=s,
            reached=float(sol.t[-1]),
        )
    return math.exp(-float(sol.y[2, -1]))


def tracy_widom(query):
    """Distribution function of the rightmost particle at the stationary
    soft edge, by Fredholm determinant or by the Painleve II
    representation.

    The backward instability leaves the Painleve route with an absolute
    error near 1e-8, so its output loses relative accuracy once the
    distribution itself is smaller (left of about -6); the Fredholm
    route is the reference everywhere.

    Raises
    ------
    ConvergenceError
        When the Painleve route falls off the decaying branch entirely.
    """
    n, scale = query.discretization
    if query.method == "fredholm":
        return _tw_fredholm(query.s, n, scale)
    return _tw_painleve(query.s)


def _half_line_bilinear(rate, zeros, pts, side):
    """Matrix of int e^{-|u| rate/2} Ai(u+a) Ai(u+p) du over a half line.

    ``side`` selects u in [0, span] ("upper") or [-span, 0] ("lower").
    Returns shape (len(zeros), len(pts)).  The span covers the
    exponential weight to 1e-16 relative; the panel rule resolves the
    combined oscillation of both Airy factors at the deepest argument.
    """
    zeros = np.asarray(zeros, dtype=float)
    pts = np.asarray(pts, dtype=float)
    span = 76.0 / rate + 6.0
    lo, hi = (0.0, span) if side == "upper" else (-span, 0.0)
    deepest = lo + min(float(np.min(zeros)), float(np.min(pts)))
    freq = 2.0 * math.sqrt(max(1.0, -deepest))
    nodes, wts = rule_for_frequency(lo, hi, freq)
    w_eff = wts * np.exp(-np.abs(nodes) * rate / 2.0)
    q_mat = ai(nodes[None, :] + zeros[:, None])
    p_mat = ai(nodes[None, :] + pts[:, None])
    return (q_mat * w_eff[None, :]) @ p_mat.T


def relaxation_residual(s, t, box, theta_list, zero_trunc=64, grid_points=9):
    """Sup-norm defect of the shifted process kernel against the extended
    stationary kernel, for each time shift.

    The defect is evaluated through its bilinear representation: a sum
    over zeros of products of two half-line exponentially weighted Airy
    integrals, one forward in the upper half line at rate t+theta and one
    backward in the lower half line at rate s+theta, weighted by the
    inverse squared Airy slope at the zero.  Direct kernel subtraction
    would cancel catastrophically at large shifts; the bilinear form is
    exactly the part that survives.

    Returns the sup over a ``grid_points``-per-axis grid on ``box`` of
    the absolute defect, one entry per theta.
    """
    s = float(s)
    t = float(t)
    if not 0.0 < s <= t:
        raise ArgumentError("needs 0 < s <= t")
    thetas = [float(v) for v in theta_list]
    if not thetas:
        raise ArgumentError("at least one shift is required")
    if any(v < 0.0 for v in thetas):
        raise ArgumentError("shifts must be nonnegative")
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise ArgumentError("shifts must be strictly increasing")
    (x_lo, x_hi), (y_lo, y_hi) = box
    n = int(grid_points)
    if n < 2:
        raise ArgumentError("grid needs at least 2 points per axis")
    xs = np.linspace(float(x_lo), float(x_hi), n)
    ys = np.linspace(float(y_lo), float(y_hi), n)
    zeros = airy_zeros(int(zero_trunc)).values
    slope2 = ai_prime(zeros) ** 2
    out = []
    for theta in thetas:
        back = _half_line_bilinear(s + theta, zeros, xs, "lower")
        fwd = _half_line_bilinear(t + theta, zeros, ys, "upper")
        defect = (back / slope2[:, None]).T @ fwd
        out.append(float(np.max(np.abs(defect))))
    return np.asarray(out)


def initial_recovery(t_list, probe_center, probe_width):
    """Probe masses of the relaxation-kernel diagonal against a Gaussian
    bump, one per time.

    As the times decrease toward zero the diagonal concentrates on the
    zeros, so the mass tends to the bump's value at the nearest zero:
    one when centered there, zero when centered in a gap.
    """
    ts = [float(v) for v in t_list]
    if not ts:
        raise ArgumentError("at least one time is required")
    if any(not v > 0.0 for v in ts):
        raise ArgumentError("times must be positive")
    if any(b >= a for a, b in zip(ts, ts[1:])):
        raise ArgumentError("times must be strictly decreasing")
    width = float(probe_width)
    if width < 1e-2:
        raise ArgumentError("probe width must be at least 1e-2")
    center = float(probe_center)
    half = 3.5 * width
    # resolve the sharpest diagonal feature, which narrows like sqrt(t)
    h = min(width / 2.0, math.sqrt(min(ts)) / 2.0)
    nodes, wts = panel_rule(center - half, center + half, int(math.ceil(2 * half / h)), 8)
    phi = np.exp(-(((nodes - center) / width) ** 2))
    out = []
    for tv in ts:
        dens = np.array([kernel_relaxation(tv, v, tv, v) for v in nodes])
        out.append(float(np.dot(wts, phi * dens)))
    return np.asarray(out)
