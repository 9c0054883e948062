"""Airy function core: evaluation, zeros, constants, and the zeta-type sums
over the zeros.

The evaluator wraps the AMOS/Cephes routines behind the package's domain
contract.  Zeros are located by a vectorized Newton iteration started from
the classical asymptotic seeds, with a bisection fallback.  Zeta sums over
the zeros carry an Euler-Maclaurin tail correction, which is also reused by
the canonical-product machinery for its tail power sums.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ArgumentError, ConvergenceError, DomainOverflowError

__all__ = [
    "AiryConstants",
    "AiryZeroTable",
    "ai",
    "ai_prime",
    "airy_constants",
    "airy_zeros",
    "airy_zeta",
    "zeta_tail",
    "zero_seeds",
]

_MAX_ABS_Z = 1.0e4


def _eval_airy(z, index):
    z_arr = np.asarray(z)
    if np.any(np.abs(z_arr) > _MAX_ABS_Z):
        raise DomainOverflowError(f"|z| exceeds the supported envelope {_MAX_ABS_Z:g}")
    vals = special.airy(z_arr)[index]
    bad = ~np.isfinite(vals)
    if np.iscomplexobj(vals):
        bad |= ~np.isfinite(vals.imag)
    # Exact zeros of Ai/Ai' live on the negative real axis only; a computed
    # 0.0 elsewhere means the scaled result underflowed double range.
    underflow = (vals == 0) & (np.real(z_arr) > 0)
    if np.any(bad) or np.any(underflow):
        raise DomainOverflowError("Airy evaluation under/overflowed double precision")
    if np.isscalar(z) or z_arr.ndim == 0:
        v = complex(vals)
        return v if np.iscomplexobj(z_arr) else v.real
    return vals


def ai(z):
    """Airy function Ai(z) for real or complex argument.

    Parameters
    ----------
    z : float, complex, or array_like
        Argument with |z| <= 1e4.

    Returns
    -------
    float, complex, or ndarray
        Ai(z); real input yields real output.

    Raises
    ------
    DomainOverflowError
        If |z| leaves the envelope or the scaled result under/overflows.
    """
    return _eval_airy(z, 0)


def ai_prime(z):
    """Derivative Ai'(z); same domain contract as :func:`ai`."""
    return _eval_airy(z, 1)


@dataclass(frozen=True)
class AiryConstants:
    """The two constants of the Airy Hadamard factorization.

    d0 = log Ai(0) and d1 = Ai'(0)/Ai(0) < 0.
    """

    d0: float
    d1: float


def airy_constants():
    """Closed-form values of d0 and d1 via the gamma function.

    Two algebraically equivalent gamma expressions for d1 are evaluated and
    must agree to 1e-12; their mean is returned.
    """
    d0 = -math.log(3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
    d1_a = -(3.0 ** (1.0 / 3.0)) * math.gamma(2.0 / 3.0) / math.gamma(1.0 / 3.0)
    d1_b = -(3.0 ** (5.0 / 6.0)) * math.gamma(2.0 / 3.0) ** 2 / (2.0 * math.pi)
    if abs(d1_a - d1_b) > 1e-12:
        raise ConvergenceError("gamma-based d1 formulas disagree", d1_a=d1_a, d1_b=d1_b)
    return AiryConstants(d0=d0, d1=0.5 * (d1_a + d1_b))


def zero_seeds(n):
    """Asymptotic starting guesses -(3 pi (4j-1)/8)^(2/3), j = 1..n."""
    j = np.arange(1, n + 1, dtype=float)
    return -((3.0 * np.pi * (4.0 * j - 1.0) / 8.0) ** (2.0 / 3.0))


# Coefficients of the standard asymptotic refinement T(t) of the zero law;
# reused analytically by the zeta tail.
_T_COEF = (5.0 / 48.0, -5.0 / 36.0, 77125.0 / 82944.0)


def _refined_seeds(n):
    j = np.arange(1, n + 1, dtype=float)
    t = 3.0 * np.pi * (4.0 * j - 1.0) / 8.0
    u = t ** (-2.0)
    return -(t ** (2.0 / 3.0)) * (1.0 + _T_COEF[0] * u + _T_COEF[1] * u**2 + _T_COEF[2] * u**3)


class AiryZeroTable:
    """Immutable table of the first n zeros of Ai, ordered 0 > a_1 > a_2 > ...

    Supports len(), indexing (0-based), and exposes the raw array via
    ``values``.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.ascontiguousarray(values, dtype=float)
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self):
        return self._values

    def __len__(self):
        return self._values.size

    def __getitem__(self, idx):
        return self._values[idx]

    def __iter__(self):
        return iter(self._values)

    def __repr__(self):
        return f"AiryZeroTable(n={len(self)})"


_ZERO_CACHE = {"table": None}


def airy_zeros(n):
    """First n zeros of Ai by Newton refinement of the asymptotic seeds.

    Parameters
    ----------
    n : int
        Number of zeros, n >= 1.

    Returns
    -------
    AiryZeroTable
        Strictly decreasing negative zeros with |Ai(a_j)| < 1e-12.

    Raises
    ------
    ConvergenceError
        If some zero fails to converge; the context carries its 1-based index.
    """
    n = int(n)
    if n < 1:
        raise ArgumentError("n must be >= 1")
    cached = _ZERO_CACHE["table"]
    if cached is not None and len(cached) >= n:
        return AiryZeroTable(cached.values[:n])

    z = _refined_seeds(n)
    for _ in range(12):
        f, fp, _, _ = special.airy(z)
        step = f / fp
        z = z - step
        if np.max(np.abs(step)) < 1e-16 * np.max(np.abs(z)):
            break
    resid = np.abs(special.airy(z)[0])
    bad = np.flatnonzero(resid >= 1e-12)
    if bad.size:
        # Newton can stall one ulp from the representable minimum once the
        # step falls below spacing; scan the few neighbouring doubles.
        z = _ulp_polish(z, bad)
        resid = np.abs(special.airy(z)[0])
        bad = np.flatnonzero(resid >= 1e-12)
    if bad.size:
        z = _bisection_rescue(z, bad)
        resid = np.abs(special.airy(z)[0])
        still = np.flatnonzero(resid >= 1e-12)
        if still.size:
            j = int(still[0]) + 1
            raise ConvergenceError(
                f"zero {j} failed to converge", index=j, residual=float(resid[still[0]])
            )
    table = AiryZeroTable(z)
    if cached is None or len(cached) < n:
        _ZERO_CACHE["table"] = table
    return table


def _ulp_polish(z, bad):
    z = z.copy()
    sub = z[bad]
    cands = sub[:, None] + np.arange(-3, 4)[None, :] * np.spacing(sub)[:, None]
    resid = np.abs(special.airy(cands)[0])
    z[bad] = cands[np.arange(sub.size), np.argmin(resid, axis=1)]
    return z


def _bisection_rescue(z, bad):
    # Bracket each failed zero between midpoints to its seed neighbours.
    seeds = _refined_seeds(z.size + 1)
    z = z.copy()
    for i in bad:
        hi = 0.5 * (seeds[i] + (seeds[i - 1] if i > 0 else 0.0))
        lo = 0.5 * (seeds[i] + seeds[i + 1])
        flo, fhi = ai(lo), ai(hi)
        if flo * fhi > 0:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = ai(mid)
            if fm == 0.0:
                break
            if flo * fm < 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
        z[i] = 0.5 * (lo + hi)
    return z


def zeta_tail(alpha, j_start):
    """Euler-Maclaurin estimate of sum_{j >= j_start} |a_j|^(-alpha).

    Uses the refined asymptotic law for |a_j|, integrating its power-series
    form termwise; accurate far beyond the 1e-10 level for j_start >= 10.
    """
    alpha = float(alpha)
    a = float(j_start)

    def tj(j):
        return 3.0 * np.pi * (4.0 * j - 1.0) / 8.0

    def f(j):
        t = tj(j)
        u = t ** (-2.0)
        corr = 1.0 + _T_COEF[0] * u + _T_COEF[1] * u**2 + _T_COEF[2] * u**3
        return t ** (-2.0 * alpha / 3.0) * corr ** (-alpha)

    # corr^(-alpha) = 1 + c1 t^-2 + c2 t^-4 + c3 t^-6 (binomial expansion)
    b1, b2, b3 = _T_COEF
    c1 = -alpha * b1
    c2 = -alpha * b2 + alpha * (alpha + 1.0) / 2.0 * b1**2
    c3 = (
        -alpha * b3
        + alpha * (alpha + 1.0) * b1 * b2
        - alpha * (alpha + 1.0) * (alpha + 2.0) / 6.0 * b1**3
    )
    ta = tj(a)
    p = 2.0 * alpha / 3.0
    integral = 0.0
    for k, ck in enumerate((1.0, c1, c2, c3)):
        pk = p + 2 * k
        integral += ck * ta ** (1.0 - pk) / (pk - 1.0)
    integral *= 2.0 / (3.0 * np.pi)

    h = 1e-3
    fp = (f(a + h) - f(a - h)) / (2.0 * h)
    f3 = (f(a + 2 * h) - 2.0 * f(a + h) + 2.0 * f(a - h) - f(a - 2 * h)) / (2.0 * h**3)
    return integral + f(a) / 2.0 - fp / 12.0 + f3 / 720.0


def airy_zeta(alpha, n_terms, with_tail=False):
    """Zeta-type sum over Airy zeros: sum_j |a_j|^(-alpha), tail-corrected.

    Parameters
    ----------
    alpha : float
        Exponent; must exceed 3/2 (the sum diverges at and below it).
    n_terms : int
        Number of zeros summed explicitly before the tail correction.
    with_tail : bool
        When True, return (value, tail_correction) so callers can report the
        tail magnitude.

    Raises
    ------
    ArgumentError
        For alpha <= 3/2.
    """
    alpha = float(alpha)
    if alpha <= 1.5:
        raise ArgumentError(f"zeta sum over zeros diverges for alpha = {alpha} <= 3/2")
    n_terms = int(n_terms)
    if n_terms < 1:
        raise ArgumentError("n_terms must be >= 1")
    zeros = airy_zeros(n_terms).values
    head = float(np.sum(np.abs(zeros) ** (-alpha)))
    tail = float(zeta_tail(alpha, n_terms + 1))
    return (head + tail, tail) if with_tail else head + tail
