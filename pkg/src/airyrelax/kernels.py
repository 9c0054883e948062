"""Transition densities and space-time correlation kernels.

The Gaussian density here follows the signed-time convention: for negative
time the exponent changes sign while the normalization keeps |t|.  That is
what makes the imaginary-axis contour integrals of the kernel formulas
converge, since the flipped exponent turns into Gaussian decay along the
contour.  All contour integrals are folded onto [0, V] by the conjugate
symmetry of their integrands and evaluated with panelized Gauss-Legendre
rules whose panel width tracks the local oscillation frequency.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .airy import ai, ai_prime, airy_constants, airy_zeros
from .configs import PointConfiguration, builtin, check_conditions, transform
from .errors import (
    ArgumentError,
    ConditionViolationError,
    ConvergenceError,
)
from .products import growth_bound, phi_A
from .quad import panel_rule, rule_for_frequency

__all__ = [
    "KernelSpec",
    "FourierAiryExpansion",
    "airy_bilinear_exp",
    "airy_gauss_transform",
    "airy_kernel",
    "ext_airy_kernel",
    "fourier_airy_project",
    "g_factor",
    "kernel_batch",
    "kernel_finite",
    "kernel_infinite",
    "kernel_relaxation",
    "p_ai",
    "p_sin",
    "q_kernel",
    "sine_kernel",
]

_NEAR_DIAG = 1e-6
_V_CAP = 200.0


def _as_scalar(v):
    if np.ndim(v) == 0:
        c = complex(v)
        return c.real if c.imag == 0.0 else c
    return v


def p_sin(t, x):
    """Gaussian transition density with the signed-time convention.

    For t > 0 this is the heat kernel of variance t.  For t < 0 the
    exponent flips sign (the normalization keeps |t|), giving the formal
    backward kernel that appears inside the contour-integral formulas;
    it is not a probability density there.

    Parameters
    ----------
    t : float
        Nonzero time.
    x : float, complex, or array_like
        Displacement; complex values are used on integration contours.
    """
    t = float(t)
    if t == 0.0:
        raise ArgumentError("time must be nonzero")
    xa = np.asarray(x)
    val = np.exp(-(xa * xa) / (2.0 * t)) / math.sqrt(2.0 * math.pi * abs(t))
    return _as_scalar(val)


def q_kernel(s, t, x):
    """Parabola-shifted Gaussian kernel: p_sin(t - s, x - (t^2 - s^2)/4).

    ``x`` is the spatial difference (destination minus source).  For t > s
    this integrates to 1 in the destination variable.
    """
    s = float(s)
    t = float(t)
    if t == s:
        raise ArgumentError("times must differ")
    return p_sin(t - s, np.asarray(x) - (t * t - s * s) / 4.0)


def g_factor(t, x):
    """Exponential gauge weight exp(-t x / 2 + t^3 / 24)."""
    t = float(t)
    return _as_scalar(np.exp(-t * np.asarray(x) / 2.0 + t**3 / 24.0))


def p_ai(dt, y, x):
    """Transition density of the drifted edge diffusion over increment dt.

    Closed form exp(-(y-x)^2/(2 dt) - dt (x+y)/4 + dt^3/96) / sqrt(2 pi |dt|).
    This equals g(t,y)/g(s,x) * q(s,t,y-x) for every (s,t) with t - s = dt
    (the s,t dependence cancels), and for dt > 0 it also equals the
    exponentially weighted Airy bilinear integral with c = dt/2.  Negative
    increments follow the signed convention of :func:`p_sin` and are formal
    kernels, not densities.
    """
    dt = float(dt)
    if dt == 0.0:
        raise ArgumentError("increment must be nonzero")
    ya = np.asarray(y)
    xa = np.asarray(x)
    d = ya - xa
    logv = -(d * d) / (2.0 * dt) - dt * (xa + ya) / 4.0 + dt**3 / 96.0
    return _as_scalar(np.exp(logv) / math.sqrt(2.0 * math.pi * abs(dt)))


def sine_kernel(t, x):
    """Extended sine kernel, three branches in the time argument.

    t = 0 gives sin(pi x)/(pi x); t > 0 integrates the cosine transform
    over frequencies inside the band, t < 0 over frequencies outside it
    (with the then-decaying Gaussian weight).
    """
    t = float(t)
    x = float(x)
    if t == 0.0:
        if x == 0.0:
            return 1.0
        return math.sin(math.pi * x) / (math.pi * x)
    freq = math.pi * abs(x)
    if t > 0.0:
        nodes, wts = rule_for_frequency(0.0, 1.0, freq)
        vals = np.exp(math.pi**2 * nodes**2 * t / 2.0) * np.cos(math.pi * nodes * x)
        return float(np.dot(wts, vals))
    # upper limit where the Gaussian weight is below 1e-19
    upper = max(2.0, math.sqrt(88.0 / abs(t)) / math.pi)
    nodes, wts = rule_for_frequency(1.0, upper, freq)
    vals = np.exp(math.pi**2 * nodes**2 * t / 2.0) * np.cos(math.pi * nodes * x)
    return -float(np.dot(wts, vals))


def airy_kernel(x, y):
    """Stationary soft-edge kernel.

    Off the diagonal the ratio form (Ai(x)Ai'(y) - Ai'(x)Ai(y))/(x - y);
    within 1e-6 of the diagonal the exact midpoint Taylor form, whose two
    retained terms leave an O(|x-y|^4) error below machine precision
    there.  Accepts arrays (broadcast).
    """
    xa, ya = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    ya = np.atleast_1d(ya)
    out = np.empty(xa.shape)
    close = np.abs(xa - ya) < _NEAR_DIAG
    if np.any(close):
        m = 0.5 * (xa[close] + ya[close])
        a_val = np.atleast_1d(ai(m))
        b_val = np.atleast_1d(ai_prime(m))
        diag = b_val**2 - m * a_val**2
        h2 = 0.25 * (xa[close] - ya[close]) ** 2
        out[close] = diag + (a_val * b_val / 3.0 + (2.0 * m / 3.0) * diag) * h2
    if np.any(~close):
        xs = xa[~close]
        ys = ya[~close]
        num = ai(xs) * ai_prime(ys) - ai_prime(xs) * ai(ys)
        out[~close] = num / (xs - ys)
    return float(out[0]) if scalar else out


def _airy_pair_tail_small(u_hi, t, x, y):
    # conservative envelope of |e^{-ut/2} Ai(u+x) Ai(u+y)| past u_hi, u >= 0
    lo = u_hi + min(x, y)
    if lo <= 1.0:
        return math.inf
    return math.exp(-u_hi * t / 2.0 - (4.0 / 3.0) * lo**1.5) / (4.0 * math.pi * math.sqrt(lo))


def ext_airy_kernel(t, y, x):
    """Space-time soft-edge kernel: exponentially weighted Airy bilinear
    integral over u >= 0 for t >= 0, minus the integral over u < 0 for
    t < 0.

    The upper cutoff grows until the analytic tail bound drops below
    1e-12 of scale.  Negative times are supported on t in (-8, 0), the
    documented accuracy envelope of the oscillatory branch.
    """
    t = float(t)
    y = float(y)
    x = float(x)

    def blocks(a, b):
        freq = math.sqrt(max(0.0, -(a + min(x, y)))) + abs(t) / 2.0 + 0.5
        nodes, wts = rule_for_frequency(a, b, freq)
        vals = np.exp(-nodes * t / 2.0) * ai(nodes + x) * ai(nodes + y)
        return float(np.dot(wts, vals))

    if t >= 0.0:
        total = 0.0
        u = 0.0
        step = 4.0
        while u < _V_CAP:
            total += blocks(u, u + step)
            u += step
            if _airy_pair_tail_small(u, t, x, y) < 1e-12 * max(1.0, abs(total)):
                return total
        raise ConvergenceError("tail cutoff not reached", u=u, t=t, x=x, y=y)
    if t <= -8.0:
        raise ArgumentError("negative times are supported on (-8, 0) only")
    # decay e^{-|u||t|/2} with an |u|^{-1/2} oscillation envelope
    u_lo = -(max(6.0, 66.0 / abs(t)) + max(0.0, -min(x, y)) + 4.0)
    return -blocks(u_lo, 0.0)


def airy_bilinear_exp(c, x, y):
    """Closed form of the exponentially weighted Airy bilinear integral
    over the whole line: (4 pi c)^{-1/2} exp(-(x-y)^2/(4c) - c(x+y)/2 +
    c^3/12), for c > 0."""
    c = float(c)
    if c <= 0.0:
        raise ArgumentError("weight rate must be positive")
    xa = np.asarray(x)
    ya = np.asarray(y)
    logv = -((xa - ya) ** 2) / (4.0 * c) - c * (xa + ya) / 2.0 + c**3 / 12.0
    return _as_scalar(np.exp(logv) / math.sqrt(4.0 * math.pi * c))


def airy_gauss_transform(c, xi):
    """Airy transform of the normalized Gaussian e^{-x^2}/sqrt(pi):
    exp{(xi + 1/(24 c^3))/(4 c^3)} Ai(xi/c + 1/(16 c^4))."""
    c = float(c)
    if c == 0.0:
        raise ArgumentError("scale must be nonzero")
    xi = float(xi)
    return math.exp((xi + 1.0 / (24.0 * c**3)) / (4.0 * c**3)) * ai(
        xi / c + 1.0 / (16.0 * c**4)
    )


@dataclass(frozen=True, eq=False)
class FourierAiryExpansion:
    """Projection of a function on (0, oo) onto shifted-Airy modes."""

    coefficients: np.ndarray
    l2_error: float


def fourier_airy_project(f, n, upper=None):
    """Project ``f`` onto the first ``n`` shifted-Airy basis functions.

    The modes Ai(x + a_l)/Ai'(a_l) are orthonormal on (0, oo); the
    coefficients are c_l = (integral of f(x) Ai(x + a_l) dx) / Ai'(a_l).

    Parameters
    ----------
    f : callable
        Real function on (0, oo), decaying at infinity.
    n : int
        Number of modes, n >= 1.
    upper : float, optional
        Integration cutoff; probed from the decay of f when omitted.

    Returns
    -------
    FourierAiryExpansion
        Coefficients and the L2 norm of the partial-sum residual.
    """
    n = int(n)
    if n < 1:
        raise ArgumentError("need at least one mode")
    if upper is None:
        upper = 10.0
        while upper < 80.0 and abs(f(upper)) > 1e-12:
            upper += 5.0
    zeros = airy_zeros(n).values
    dai = ai_prime(zeros)
    nodes, wts = rule_for_frequency(0.0, float(upper), math.sqrt(abs(zeros[-1])))
    fv = np.asarray([f(v) for v in nodes], dtype=float)
    modes = ai(nodes[None, :] + zeros[:, None])  # (n, nodes)
    coeffs = (modes * fv[None, :] * wts[None, :]).sum(axis=1) / dai
    recon = (coeffs / dai) @ modes
    l2 = float(np.sqrt(np.dot(wts, (fv - recon) ** 2)))
    return FourierAiryExpansion(coefficients=coeffs, l2_error=l2)


def _finite_v_halfwidth(t, y, c_growth, theta, floor):
    # V solving Gaussian decay against the calibrated product growth,
    # relative to the v = 0 scale (the center-dependent factor of the
    # growth bound is v-independent and cancels):
    # (V^2 - r^2)/(2t) >= 40 + C (V^theta v 1)
    r = abs(t * t / 4.0 - y)
    v = floor
    for _ in range(60):
        rhs = 2.0 * t * (40.0 + c_growth * max(v**theta, 1.0)) + r * r
        v_new = max(floor, math.sqrt(rhs))
        if v_new <= v * 1.0000001:
            return v_new
        v = v_new
    return v


def kernel_finite(xi, s, x, t, y, check=True, theta=1.9, quadrature=None):
    """Correlation kernel of the finite-configuration edge process.

    Sums, over the atoms x' of ``xi``, the source Gaussian weight times an
    imaginary-axis integral of the drift-corrected product against the
    backward Gaussian kernel, then subtracts the q term for s > t.

    Parameters
    ----------
    xi : PointConfiguration
        Finite initial configuration (unit multiplicities).
    s, t : float
        Positive times.
    x, y : float
        Positions paired with s and t respectively.
    check : bool
        Re-evaluate on a 1.5x-refined panel set and require agreement to
        1e-9 relative; disagreement raises ConvergenceError.
    theta : float
        Growth exponent used to calibrate the contour half-width.
    quadrature : (V, panels, nodes), optional
        Explicit contour rule; bypasses the calibrated choice.

    Raises
    ------
    ArgumentError
        For nonpositive times.
    ConvergenceError
        If the contour cannot be extended to cover the integrand or the
        refinement self-check fails.
    """
    s = float(s)
    t = float(t)
    if s <= 0.0 or t <= 0.0:
        raise ArgumentError("times must be positive")
    if not xi.is_simple:
        raise ArgumentError("initial configuration must have unit multiplicities")
    x = float(x)
    y = float(y)
    atoms = xi.positions
    if atoms.size == 0:
        raise ArgumentError("configuration has no atoms")

    value, _ = _finite_quad(xi, atoms, s, x, t, y, theta, 1.0, quadrature)
    if check:
        refined, rough = _finite_quad(xi, atoms, s, x, t, y, theta, 1.5, quadrature)
        # the envelope term is the roundoff floor of a cancelling
        # oscillatory integral; it dominates only at small t with the
        # evaluation point far off the parabola
        tol = 1e-9 * (1.0 + abs(refined)) + 5e-15 * rough
        if abs(refined - value) > tol:
            raise ConvergenceError(
                "refinement self-check failed",
                coarse=value,
                refined=refined,
                s=s,
                x=x,
                t=t,
                y=y,
            )
        value = refined
    if s > t:
        value -= q_kernel(t, s, x - y)
    return value


def _finite_quad(xi, atoms, s, x, t, y, theta, refine, quadrature):
    # source Gaussian weights over the atoms; for large configurations
    # atoms whose weight is below 1e-22 of the largest cannot move the
    # result and are skipped
    w_src = np.atleast_1d(q_kernel(0.0, s, x - atoms))
    if atoms.size > 32:
        keep = w_src >= 1e-22 * float(np.max(w_src))
    else:
        keep = np.ones(atoms.size, dtype=bool)

    is_airy_gen = xi.generator is not None and xi.generator[0] == "airy"
    # on the imaginary axis the forward factor peaks like
    # exp((t^2/4 - y)^2 / (2 t)), so points far from the parabola lose the
    # whole value to cancellation; bare finite products are entire and the
    # contour translates to the saddle abscissa for free, while the tagged
    # analytic tail is calibrated on the imaginary axis and stays pinned
    shift = 0.0 if is_airy_gen else y - t * t / 4.0
    floor = 6.0 * math.sqrt(max(s, t))
    if quadrature is None:
        # calibrate at the dominant atom; the tail-ratio loop below covers
        # the others
        a_ref = float(atoms[int(np.argmax(w_src))])
        y_cal = max(12.0, floor)
        for _ in range(4):
            c_growth = growth_bound(xi, a_ref, y_cal, theta)
            v_half = _finite_v_halfwidth(t, y, c_growth, theta, floor)
            if v_half <= y_cal:
                break
            y_cal = v_half * 1.05
        nodes_per = 12
        d1 = airy_constants().d1
        s_n = float(np.sum(1.0 / airy_zeros(xi.total_mass).values))
        freq = abs(t * t / 4.0 - y) / t + abs(d1 + s_n) + 1.0
    else:
        v_half, n_panels_given, nodes_per = quadrature
        freq = None

    v_cur = v_half
    for _ in range(12):
        if freq is not None:
            f_cur = freq + (0.75 * math.sqrt(v_cur) if is_airy_gen else 0.0)
            width = min(0.5, math.pi / f_cur) / refine
            n_panels = max(1, int(math.ceil(v_cur / width)))
        else:
            n_panels = max(1, int(n_panels_given * refine))
        nodes, wts = panel_rule(0.0, v_cur, n_panels, nodes_per)
        q_back = p_sin(-t, shift + 1j * nodes - y + t * t / 4.0)
        total = 0.0
        rough = 0.0
        tail_ratio = 0.0
        for i, a in enumerate(atoms):
            if not keep[i]:
                continue
            h = np.real(phi_A(xi, float(a), shift + 1j * nodes) * q_back)
            total += float(w_src[i]) * 2.0 * float(np.dot(wts, h))
            rough += float(w_src[i]) * 2.0 * float(np.dot(wts, np.abs(h)))
            scale = float(np.max(np.abs(h)))
            if scale > 0.0:
                tail_ratio = max(tail_ratio, abs(h[-1]) / scale)
        if quadrature is not None or tail_ratio < 1e-13:
            return total, rough
        v_cur *= 1.4
        if v_cur > _V_CAP:
            raise ConvergenceError(
                "contour half-width exceeded the cap",
                v=v_cur,
                tail_ratio=tail_ratio,
                s=s,
                t=t,
            )
    raise ConvergenceError("contour extension did not settle", v=v_cur)


def _relax_v_halfwidth(t):
    # balance the Gaussian decay e^{-v^2/2t} against the vertical-line
    # Airy growth e^{0.4714 v^{3/2}}, at 1e-17 relative plus margin
    v = math.sqrt(80.0 * t)
    for _ in range(80):
        v_new = math.sqrt(2.0 * t * (40.0 + 0.4714 * v**1.5))
        if v_new <= v * 1.0000001:
            break
        v = v_new
    return min(v, _V_CAP)


def kernel_relaxation(s, x, t, y, zero_trunc=None, quadrature=None):
    """Space-time kernel of the relaxation process started from the Airy
    zeros, in the undrifted gauge.

    Sum over zeros of the forward transition weight times a contour
    integral whose integrand couples the Airy function to the backward
    kernel through the pole at the zero; minus the backward q-type term
    for s > t.  Because the Airy factor vanishes at every pole, the
    integrand is entire and the vertical contour can sit anywhere; it is
    placed through Re z = y, where the backward Gaussian has modulus
    exp(-v^2/2t) and the cancellation that plagues the imaginary axis at
    small t never happens.  Terms decay super-exponentially in the zero
    index; summation stops once three consecutive terms fall below 1e-14
    of the running sum.

    Raises
    ------
    ArgumentError
        For nonpositive times.
    ConvergenceError
        If the zero sum fails to converge within the truncation cap.
    """
    s = float(s)
    t = float(t)
    if s <= 0.0 or t <= 0.0:
        raise ArgumentError("times must be positive")
    x = float(x)
    y = float(y)
    cap = int(zero_trunc) if zero_trunc is not None else 400
    if cap < 1:
        raise ArgumentError("zero-sum truncation must be >= 1")

    if quadrature is None:
        v_half = _relax_v_halfwidth(t)
        freq = math.sqrt(max(0.0, -y)) + t / 4.0 + 0.75 * math.sqrt(v_half) + 0.5
        width = min(0.5, math.pi / freq)
        nodes, wts = panel_rule(0.0, v_half, max(1, int(math.ceil(v_half / width))), 12)
    else:
        v_half, n_panels, nodes_per = quadrature
        nodes, wts = panel_rule(0.0, v_half, int(n_panels), int(nodes_per))

    z_line = y + 1j * nodes
    base = ai(z_line) * p_ai(-t, z_line, y)
    scale_probe = float(np.max(np.abs(base)))
    if scale_probe > 0.0 and abs(base[-1]) / scale_probe > 1e-12 and quadrature is None:
        raise ConvergenceError("contour integrand not covered", v=v_half, t=t, y=y)

    total = 0.0
    below = 0
    grown = 64
    zeros = airy_zeros(grown).values
    dai = ai_prime(zeros)
    for j in range(cap):
        if j >= grown:
            grown = min(2 * grown, cap)
            zeros = airy_zeros(grown).values
            dai = ai_prime(zeros)
        a = zeros[j]
        w = p_ai(s, x, a)
        inner = 2.0 * float(np.dot(wts, np.real(base / (z_line - a)))) / dai[j]
        term = w * inner
        total += term
        if abs(term) < 1e-14 * max(abs(total), 1e-300):
            below += 1
            if below >= 3:
                break
        else:
            below = 0
    else:
        raise ConvergenceError("zero sum did not converge", cap=cap, last=term)
    if s > t:
        total -= p_ai(s - t, x, y)
    return total


def kernel_infinite(xi, s, x, t, y, thresholds=None, zero_trunc=None):
    """Correlation kernel for an infinite configuration given by a
    generator tag.

    The configuration must pass the summability conditions (the first
    condition and both parts of the second).  Airy-generator
    configurations evaluate through the relaxation kernel and the gauge
    weight; other generators evaluate window truncations of the finite
    kernel and extrapolate the window length.

    Raises
    ------
    ArgumentError
        If ``xi`` carries no generator or times are nonpositive.
    ConditionViolationError
        If the conditions fail or remain inconclusive.
    ConvergenceError
        If the window extrapolation does not settle.
    """
    if xi.generator is None:
        raise ArgumentError("configuration has no generator; use kernel_finite")
    s = float(s)
    t = float(t)
    if s <= 0.0 or t <= 0.0:
        raise ArgumentError("times must be positive")
    report = check_conditions(xi, thresholds)
    if report.inconclusive or not report.all_pass:
        raise ConditionViolationError(
            "configuration fails the kernel summability conditions "
            "(c1={} c2i={} c2ii={} inconclusive={})".format(
                report.c1_pass, report.c2i_pass, report.c2ii_pass, report.inconclusive
            )
        )
    tag = xi.generator[0]
    if tag == "airy":
        val = kernel_relaxation(s, x, t, y, zero_trunc=zero_trunc)
        return g_factor(t, y) / g_factor(s, x) * val
    # window truncations extrapolated in the window length.  Product
    # truncation converges only like the inverse square root of the
    # window, so the values are Aitken-accelerated and the contraction of
    # the window sequence is required rather than a fixed-digit match.
    reach = abs(x) + max(s, t) ** 2 / 4.0 + 9.0 * math.sqrt(max(s, t)) + 4.0
    vals = []
    for fac in (1.0, 2.0, 4.0):
        window = transform(
            _materialized(xi, reach * fac), "restrict", -reach * fac, reach * fac
        )
        vals.append(kernel_finite(window, s, x, t, y, check=False))
    d_a, d_b = vals[1] - vals[0], vals[2] - vals[1]
    scale = max(1.0, abs(vals[2]))
    if abs(d_b) < 1e-12 * scale:
        return vals[2]
    if abs(d_b) >= 0.95 * abs(d_a) or abs(d_b) > 1e-3 * scale:
        raise ConvergenceError(
            "window extrapolation did not contract", values=tuple(vals)
        )
    return vals[2] - d_b * d_b / (d_b - d_a)


def _materialized(xi, span):
    # regenerate enough atoms of a tagged configuration to fill [-span, span]
    gen = xi.generator
    if gen[0] == "integers":
        need = int(math.ceil(span)) + 1
        if need > gen[1]:
            return builtin("integers", need)
    elif gen[0] == "eta":
        need = int(math.ceil(span ** (1.0 / gen[2]))) + 1
        if need > gen[1]:
            return builtin("eta", need, kappa=gen[2])
    return xi


_KINDS = ("sine", "ext_sine", "airy", "ext_airy", "finite_config", "infinite_config")


@dataclass(frozen=True)
class KernelSpec:
    """Declarative description of a kernel for batch evaluation.

    ``quadrature`` is (imaginary-axis half-width V, panel count, nodes per
    panel); when omitted each evaluation calibrates its own rule.  The
    half-width must cover the Gaussian decay of the largest time in the
    batch (at least 6 sqrt(max time)); this is validated per batch.
    """

    kind: str
    config: Optional[PointConfiguration] = None
    quadrature: Optional[Tuple[float, int, int]] = None
    zero_trunc: int = 64

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ArgumentError(f"unknown kernel kind {self.kind!r}")
        if self.zero_trunc < 1:
            raise ArgumentError("zero-sum truncation must be >= 1")
        if self.kind in ("finite_config", "infinite_config") and self.config is None:
            raise ArgumentError(f"kind {self.kind!r} needs a configuration")
        if self.quadrature is not None:
            v, panels, nodes = self.quadrature
            if not (v > 0 and panels >= 1 and nodes >= 2):
                raise ArgumentError("malformed quadrature triple")


def kernel_batch(spec, points):
    """Evaluate a kernel at a sequence of space-time tuples.

    Parameters
    ----------
    spec : KernelSpec
    points : iterable of (s, x, t, y)

    Returns
    -------
    ndarray of float
        One value per tuple.  Stationary kinds (sine, airy) require
        s == t for each tuple.
    """
    pts = [tuple(float(v) for v in p) for p in points]
    if spec.quadrature is not None and pts:
        t_max = max(max(p[0], p[2]) for p in pts)
        if spec.quadrature[0] < 6.0 * math.sqrt(max(t_max, 0.0)):
            raise ArgumentError(
                "quadrature half-width below the Gaussian-decay floor"
            )
    out = np.empty(len(pts))
    for i, (s, x, t, y) in enumerate(pts):
        if spec.kind == "sine":
            if s != t:
                raise ArgumentError("stationary kernel needs equal times")
            out[i] = sine_kernel(0.0, y - x)
        elif spec.kind == "ext_sine":
            out[i] = sine_kernel(t - s, y - x)
        elif spec.kind == "airy":
            if s != t:
                raise ArgumentError("stationary kernel needs equal times")
            out[i] = airy_kernel(x, y)
        elif spec.kind == "ext_airy":
            out[i] = ext_airy_kernel(t - s, y, x)
        elif spec.kind == "finite_config":
            out[i] = kernel_finite(
                spec.config, s, x, t, y, quadrature=spec.quadrature
            )
        else:
            out[i] = kernel_infinite(
                spec.config, s, x, t, y, zero_trunc=spec.zero_trunc
            )
    return out
