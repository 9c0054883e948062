"""Weierstrass primary factors, canonical products, and the drift-corrected
products that tie point configurations to the Airy function.

Everything is accumulated in log space: per-factor principal logs summed
over atoms, exponentiated once at the end.  Off the atom set no individual
factor is near zero, and exact atom hits short-circuit to 0.  For
configurations tagged with the ``airy`` generator the drift-corrected
products append an analytic tail for the zeros beyond the truncation,
summed from the zeta-type power sums; the raw genus-1 product converges
only like the cube root of the truncation, far too slow for kernel work.
"""
import math

import numpy as np

from .airy import airy_constants, airy_zeros, zeta_tail
from .configs import MERGE_TOL, PointConfiguration
from .errors import ArgumentError, ConvergenceError, DomainOverflowError

__all__ = [
    "ai_N",
    "growth_bound",
    "phi_A",
    "phi_p",
    "pi_p",
    "primary_factor",
    "s_decomposition",
]

_LOG_HUGE = 700.0  # exp() overflow guard on the final exponentiation


def primary_factor(u, p):
    """Weierstrass primary factor G(u, p) for genus p in {0, 1}."""
    if p == 0:
        return 1.0 - u
    if p == 1:
        return (1.0 - u) * np.exp(u)
    raise ArgumentError("genus must be 0 or 1")


def _over_real(num, den):
    # componentwise complex/real division; numpy promotes the real divisor
    # and its complex-division kernel can miss the exactness of x/x by an
    # ulp, which would break atom-hit detection and origin exactness
    num = np.asarray(num)
    if np.iscomplexobj(num):
        return num.real / den + 1j * (num.imag / den)
    return num / den


def _log_factors(t, u, p):
    # sum over the last axis of log G(u, p), with t = 1 - u supplied by the
    # caller as a direct subtraction ratio like (x - z)/x.  Forming t that
    # way keeps the factor accurate near atoms, where 1 - z/x cancels
    # catastrophically; near z = 0 the plain log costs only an absolute
    # epsilon per factor, which the log sum tolerates.
    hit = t == 0.0
    safe = np.where(hit, 1.0, t)
    terms = np.log(safe)
    if p == 1:
        terms = terms + u
    return np.sum(terms, axis=-1), np.any(hit, axis=-1)


def _finish(logval, zero_mask, scalar):
    if np.any(np.real(logval) > _LOG_HUGE):
        raise DomainOverflowError("product overflows double range")
    out = np.exp(logval)
    out = np.where(zero_mask, 0.0, out)
    if scalar:
        v = complex(out)
        return v.real if v.imag == 0.0 else v
    return out


def _weighted(positions, mults):
    # repeat atoms by multiplicity so log sums weight them correctly
    if np.all(mults == 1):
        return positions
    return np.repeat(positions, mults)


def pi_p(xi, z, p):
    """Canonical product over the atoms of ``xi`` (origin skipped).

    Parameters
    ----------
    xi : PointConfiguration
    z : complex or array_like
    p : int
        Genus, 0 or 1.

    Notes
    -----
    This is the raw truncated product; no tail correction is applied, so
    for a truncation of the Airy zero set the relative error at fixed z
    decays like the inverse cube root of the zero count.
    """
    if p not in (0, 1):
        raise ArgumentError("genus must be 0 or 1")
    pos = xi.positions
    keep = np.abs(pos) > MERGE_TOL
    x = _weighted(pos[keep], xi.mults[keep])
    z_arr = np.asarray(z, dtype=complex)
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    if x.size == 0:
        return _finish(np.zeros(z_arr.shape, dtype=complex), np.zeros(z_arr.shape, bool), scalar)
    t = _over_real(x - z_arr[..., None], x)
    u = _over_real(z_arr[..., None], x) if p == 1 else None
    logval, hit = _log_factors(t, u, p)
    return _finish(logval, hit, scalar)


def phi_p(xi, a, z, p):
    """Centered canonical product: genus-p product over atoms x != a of
    G((z-a)/(x-a), p)."""
    if p not in (0, 1):
        raise ArgumentError("genus must be 0 or 1")
    a = float(a)
    pos = xi.positions
    keep = np.abs(pos - a) > MERGE_TOL * max(1.0, abs(a))
    x = _weighted(pos[keep], xi.mults[keep])
    z_arr = np.asarray(z, dtype=complex)
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    if x.size == 0:
        return _finish(np.zeros(z_arr.shape, dtype=complex), np.zeros(z_arr.shape, bool), scalar)
    t = _over_real(x - z_arr[..., None], x - a)
    u = _over_real(z_arr[..., None] - a, x - a) if p == 1 else None
    logval, hit = _log_factors(t, u, p)
    return _finish(logval, hit, scalar)


def _tail_power_sums(n_start, k_max):
    # signed power sums over zeros beyond the truncation:
    # P_k = sum_{j > n} a_j^(-k) = (-1)^k sum |a_j|^(-k)
    return np.array(
        [(-1.0) ** k * zeta_tail(float(k), n_start) for k in range(2, k_max + 1)]
    )


_TAIL_MARGIN = 0.6  # power series runs only once |z| <= margin * |a_M|
_TAIL_MAX_ZEROS = 8000


def _tail_split(n_zeros, reach):
    # Choose M >= n_zeros so the series tail starting after zero M has its
    # argument inside _TAIL_MARGIN of the convergence radius |a_{M+1}|;
    # zeros (n_zeros, M] are then handled as explicit factors.  The count
    # comes from the leading-order zero location (3 pi j / 2)^(2/3).
    target = reach / _TAIL_MARGIN
    m = max(n_zeros, int(math.ceil((2.0 / (3.0 * math.pi)) * target**1.5)) + 4)
    if m > _TAIL_MAX_ZEROS:
        raise DomainOverflowError(
            f"argument reach {reach:.3g} needs more than {_TAIL_MAX_ZEROS} zeros"
        )
    zs = airy_zeros(m).values
    if abs(zs[m - 1]) < target:
        m = min(int(1.2 * m) + 8, _TAIL_MAX_ZEROS)
        zs = airy_zeros(m).values
        if abs(zs[m - 1]) < target:
            raise DomainOverflowError(
                f"argument reach {reach:.3g} exceeds the tail envelope"
            )
    return m, zs


def _uncentered_tail_log(z, n_zeros):
    # log of prod_{j>n} (1 - z/a_j) e^{z/a_j}: explicit genus-1 factors out
    # to zero M, then -sum_{m>=2} z^m P_m / m with P_m summed past M.
    z_arr = np.asarray(z, dtype=complex)
    reach = float(np.max(np.abs(z_arr)))
    m_split, zs = _tail_split(n_zeros, reach)
    out = np.zeros(np.shape(z), dtype=complex)
    hit = np.zeros(np.shape(z), dtype=bool)
    if m_split > n_zeros:
        x = zs[n_zeros:m_split]
        t = _over_real(x - z_arr[..., None], x)
        logs, h = _log_factors(t, _over_real(z_arr[..., None], x), 1)
        out = out + logs
        hit = hit | h
    p = _tail_power_sums(m_split + 1, 120)
    zpow = z_arr**2
    scale = max(1.0, float(np.max(np.abs(zpow))))
    for m in range(2, 121):
        term = -(zpow / m) * p[m - 2]
        out = out + term
        if np.max(np.abs(term)) < 1e-18 * scale:
            break
        zpow = zpow * z_arr
    else:
        raise ConvergenceError("product tail did not converge", n_zeros=n_zeros)
    return out, hit


def _centered_tail_log(w, a, n_zeros):
    # log of prod_{j>n} (1 - w/(a_j - a)) e^{w/a_j}: explicit factors out to
    # zero M, then the double expansion in the power sums P_k, geometric in
    # a/a_j and w/(a_j - a).
    w_arr = np.asarray(w, dtype=complex)
    wm = float(np.max(np.abs(w_arr)))
    m_split, zs = _tail_split(n_zeros, wm + abs(a))
    explicit = np.zeros(np.shape(w), dtype=complex)
    hit = np.zeros(np.shape(w), dtype=bool)
    if m_split > n_zeros:
        x = zs[n_zeros:m_split]
        # numerator built from the pre-shifted values; an argument within
        # ~ulp(a_j) of one of these zeros loses accuracy but not finiteness
        t = _over_real((x - a) - w_arr[..., None], x - a)
        logs, hit = _log_factors(t, _over_real(w_arr[..., None], x), 1)
        explicit = logs
    p = _tail_power_sums(m_split + 1, 160)  # p[k-2] = P_k
    ratio = (wm + abs(a)) / abs(zs[m_split - 1])
    n_zeros = m_split

    # linear-in-w part: -w * sum_{r>=1} a^r P_{r+1}
    lin = 0.0
    ar = a
    for r in range(1, 120):
        if r + 1 > 161:
            raise ConvergenceError("tail order exhausted", n_zeros=n_zeros)
        term = ar * p[r - 1]
        lin += term
        if abs(term) < 1e-20 and r > 3:
            break
        ar *= a
    out = explicit - w_arr * lin

    # higher orders: -sum_{m>=2} (w^m/m) sum_{r>=0} C(m+r-1, r) a^r P_{m+r}
    wpow = w_arr**2
    scale = max(1.0, wm**2)
    for m in range(2, 120):
        inner = 0.0
        ar = 1.0
        binom = 1.0
        for r in range(0, 161 - m):
            if m + r > 160:
                break
            inner += binom * ar * p[m + r - 2]
            ar *= a
            binom *= (m + r) / (r + 1.0)
            if abs(ar * binom) * abs(p[min(m + r - 1, 158)]) < 1e-22 and r > 3:
                break
        term = -(wpow / m) * inner
        out = out + term
        if np.max(np.abs(term)) < 1e-18 * scale and m > 3:
            return out, hit
        wpow = wpow * w_arr
    raise ConvergenceError("centered tail did not converge", n_zeros=n_zeros, ratio=ratio)


def phi_A(xi, a, z):
    """Drift-corrected product: the entire function attached to ``xi``.

    Uncentered (``a is None``): e^(d1 z) exp(z sum_j 1/a_j) Pi_0(xi, z),
    the correction sum running over the first N Airy zeros, N = xi(R).
    Centered: the same object for the shifted configuration, evaluated in
    one pass as e^((d1+S_N)(z-a)) times the centered genus-0 product.

    Configurations tagged with the ``airy`` generator get the analytic
    tail for the zeros beyond truncation, making the value agree with the
    infinite-configuration limit to near machine precision.

    Raises
    ------
    ArgumentError
        If the center carries multiplicity >= 2 (the identity-path
        denominator vanishes there).
    """
    n = xi.total_mass
    zeros = airy_zeros(n).values if n else np.empty(0)
    s_n = float(np.sum(1.0 / zeros)) if n else 0.0
    d1 = airy_constants().d1
    z_arr = np.asarray(z, dtype=complex)
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    is_airy_gen = xi.generator is not None and xi.generator[0] == "airy"

    if a is None:
        pos = xi.positions
        keep = np.abs(pos) > MERGE_TOL
        x = _weighted(pos[keep], xi.mults[keep])
        t = _over_real(x - z_arr[..., None], x) if x.size else np.zeros(z_arr.shape + (0,))
        logval, hit = _log_factors(t, None, 0)
        logval = logval + (d1 + s_n) * z_arr
        if is_airy_gen:
            tail, tail_hit = _uncentered_tail_log(z_arr, n)
            logval = logval + tail
            hit = hit | tail_hit
        return _finish(logval, hit, scalar)

    a = float(a)
    pos = xi.positions
    at_center = np.abs(pos - a) <= MERGE_TOL * max(1.0, abs(a))
    if int(np.sum(xi.mults[at_center])) >= 2:
        raise ArgumentError("center atom has multiplicity >= 2; derivative vanishes")
    keep = ~at_center
    x = _weighted(pos[keep], xi.mults[keep])
    w = z_arr - a
    t = _over_real(x - z_arr[..., None], x - a) if x.size else np.zeros(z_arr.shape + (0,))
    logval, hit = _log_factors(t, None, 0)
    logval = logval + (d1 + s_n) * w
    if is_airy_gen:
        # regroup the genus-1 tail factors around the center
        tail, tail_hit = _centered_tail_log(w, a, n)
        logval = logval + tail
        hit = hit | tail_hit
    return _finish(logval, hit, scalar)


def ai_N(z, n):
    """Partial-product approximation to Ai: the genus-1 product over the
    first n zeros with the exponential prefactor.

    Exact at z = 0 by construction; elsewhere the relative error decays
    like n^(-1/3).
    """
    n = int(n)
    if n < 1:
        raise ArgumentError("n must be >= 1")
    c = airy_constants()
    zeros = airy_zeros(n).values
    z_arr = np.asarray(z, dtype=complex)
    scalar = np.isscalar(z) or np.asarray(z).ndim == 0
    t = _over_real(zeros - z_arr[..., None], zeros)
    logval, hit = _log_factors(t, _over_real(z_arr[..., None], zeros), 1)
    return _finish(logval + c.d0 + c.d1 * z_arr, hit, scalar)


def s_decomposition(xi, a, z):
    """Recombined form of the centered genus-1 product.

    Evaluates e^S Pi_1(xi, z) Pi_1(xi less -a, -a) Phi_0(squared config
    centered at a^2, at 0) (z/a)^(mult at 0) a/(a-z), against which
    phi_p(xi, a, z, 1) can be checked.  The halving power is
    2^(-(1 + mult at -a)); the positive-exponent variant fails symbolic
    verification on two-atom configurations.
    """
    a = float(a)
    z = complex(z)
    pos = xi.positions
    mts = xi.mults
    tol = MERGE_TOL

    def mult_at(point):
        sel = np.abs(pos - point) <= tol * max(1.0, abs(point))
        return int(np.sum(mts[sel]))

    if mult_at(a) == 0:
        raise ArgumentError("a must be an atom of the configuration")

    not_a = np.abs(pos - a) > tol * max(1.0, abs(a))
    not_0 = np.abs(pos) > tol
    not_ma = np.abs(pos + a) > tol * max(1.0, abs(a))

    s_val = complex(np.sum(mts[not_a] * (z - a) / (pos[not_a] - a)))
    s_val -= complex(np.sum(mts[not_0] * z / pos[not_0]))
    sel = not_0 & not_ma
    s_val += complex(np.sum(mts[sel] * a / pos[sel]))

    xi_less_ma = PointConfiguration(pos[not_ma], mts[not_ma])
    sq = PointConfiguration(pos[not_0] ** 2, mts[not_0])

    val = (
        np.exp(s_val)
        * pi_p(xi, z, 1)
        * pi_p(xi_less_ma, -a, 1)
        * phi_p(sq, a * a, 0.0, 0)
        * (z / a) ** mult_at(0.0)
        * (a / (a - z))
        * 2.0 ** (-(1 + mult_at(-a)))
    )
    return val


def growth_bound(xi, a, y, theta, n_grid=81):
    """Calibrate C with |phi_A(xi, a, iv)| <= exp[C((|v|^theta v 1) +
    (|a|^theta v 1))] over |v| <= y.

    The constant is fitted on a coarse grid, inflated by 5 percent, and
    validated on a denser offset grid; violation there raises.  Larger
    theta trades into a smaller C.
    """
    theta = float(theta)
    if not 0.0 < theta < 2.0:
        raise ArgumentError("theta must lie in (0, 2)")
    y = float(abs(y))
    a = float(a)

    def log_mod(vs):
        vals = phi_A(xi, a, 1j * vs)
        mags = np.abs(np.atleast_1d(vals))
        mags = np.where(mags == 0.0, 1e-300, mags)
        return np.log(mags)

    def envelope(vs):
        return np.maximum(np.abs(vs) ** theta, 1.0) + max(abs(a) ** theta, 1.0)

    grid = np.linspace(-y, y, n_grid)
    c_fit = float(np.max(log_mod(grid) / envelope(grid)))
    c_cal = max(c_fit, 0.0) * 1.05 + 1e-9
    fine = np.linspace(-y, y, 4 * n_grid + 1) + (y / (8.0 * n_grid))
    fine = fine[np.abs(fine) <= y]
    if np.any(log_mod(fine) > c_cal * envelope(fine)):
        worst = float(np.max(log_mod(fine) / envelope(fine)))
        raise ConvergenceError(
            "growth-bound calibration failed on the validation grid",
            fitted=c_cal,
            observed=worst,
        )
    return c_cal
