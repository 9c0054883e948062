"""Point configurations, their transforms, the moment functionals, and the
admissibility checks used by the kernel layer.

A configuration is a finite multiset of real atoms, optionally tagged with
the generator it was truncated from (``airy``, ``integers``, or ``eta``).
The tag lets :func:`check_conditions` re-truncate at higher counts and lets
the moment functionals append analytic tail corrections, without which the
slowly convergent sums could never stabilize to the 1e-6 level.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .airy import airy_zeros, zeta_tail
from .errors import ArgumentError

__all__ = [
    "ConditionReport",
    "ConditionThresholds",
    "PointConfiguration",
    "builtin",
    "check_conditions",
    "config_from_dict",
    "config_to_dict",
    "m_A",
    "m_alpha",
    "transform",
]

MERGE_TOL = 1e-12

# Zero-table size cap for window pairing; |a_6000| ~ 925 bounds the window.
_PAIR_TABLE_MAX = 6000


def _merged(points, mults):
    order = np.argsort(points, kind="stable")
    pts = points[order]
    mts = mults[order]
    if pts.size == 0:
        return pts, mts
    new_group = np.empty(pts.size, dtype=bool)
    new_group[0] = True
    np.greater(np.diff(pts), MERGE_TOL, out=new_group[1:])
    idx = np.cumsum(new_group) - 1
    out_pts = pts[new_group]
    out_mts = np.zeros(out_pts.size, dtype=np.int64)
    np.add.at(out_mts, idx, mts)
    return out_pts, out_mts


class PointConfiguration:
    """Finite multiset of real atoms with integer multiplicities.

    Atoms closer than ``MERGE_TOL`` are merged on construction, summing
    multiplicities.  Shifts are tracked as an exact additive offset so a
    shift and its inverse cancel bit-for-bit.
    """

    __slots__ = ("_points", "_mults", "_offset", "generator")

    def __init__(self, points, mults=None, generator=None, _offset=0.0):
        pts = np.asarray(points, dtype=float).ravel()
        if mults is None:
            mts = np.ones(pts.size, dtype=np.int64)
        else:
            mts = np.asarray(mults).ravel()
            if mts.size != pts.size:
                raise ArgumentError("points and mults length mismatch")
            if not np.issubdtype(mts.dtype, np.integer) or np.any(mts < 1):
                raise ArgumentError("multiplicities must be positive integers")
            mts = mts.astype(np.int64)
        if not np.all(np.isfinite(pts)):
            raise ArgumentError("atoms must be finite reals")
        pts, mts = _merged(pts, mts)
        pts.setflags(write=False)
        mts.setflags(write=False)
        self._points = pts
        self._mults = mts
        self._offset = float(_offset)
        self.generator = generator

    @property
    def positions(self):
        """Atom positions in increasing order (offset folded in)."""
        return self._points + self._offset

    @property
    def mults(self):
        return self._mults

    @property
    def total_mass(self):
        """xi(R): number of particles counted with multiplicity."""
        return int(self._mults.sum())

    @property
    def is_simple(self):
        """True when every multiplicity is one."""
        return bool(np.all(self._mults == 1))

    def __len__(self):
        return self._points.size

    def __eq__(self, other):
        if not isinstance(other, PointConfiguration):
            return NotImplemented
        return (
            np.array_equal(self.positions, other.positions)
            and np.array_equal(self._mults, other._mults)
        )

    def __repr__(self):
        tag = f", generator={self.generator!r}" if self.generator else ""
        return f"PointConfiguration(n_atoms={len(self)}, mass={self.total_mass}{tag})"


def builtin(tag, n, kappa=None):
    """Standard truncated configurations.

    Parameters
    ----------
    tag : str
        ``"airy"`` (first n zeros of Ai), ``"integers"`` (atoms at -n..n),
        or ``"eta"`` (atoms at sgn(l)|l|^kappa for |l| <= n).
    n : int
        Truncation parameter, n >= 1.
    kappa : float, optional
        Exponent for ``"eta"``; required there, rejected elsewhere.
    """
    n = int(n)
    if n < 1:
        raise ArgumentError("n must be >= 1")
    if tag == "airy":
        if kappa is not None:
            raise ArgumentError("kappa only applies to the eta generator")
        return PointConfiguration(airy_zeros(n).values, generator=("airy", n))
    if tag == "integers":
        if kappa is not None:
            raise ArgumentError("kappa only applies to the eta generator")
        pts = np.arange(-n, n + 1, dtype=float)
        return PointConfiguration(pts, generator=("integers", n))
    if tag == "eta":
        if kappa is None or not kappa > 0:
            raise ArgumentError("eta requires kappa > 0")
        ell = np.arange(-n, n + 1, dtype=float)
        pts = np.sign(ell) * np.abs(ell) ** float(kappa)
        return PointConfiguration(pts, generator=("eta", n, float(kappa)))
    raise ArgumentError(f"unknown generator tag {tag!r}")


def transform(xi, op, *args):
    """Apply ``shift(u)``, ``square``, or ``restrict(lo, hi)`` to a config.

    The result carries no generator tag: a transformed configuration is
    treated as a plain finite one from then on.

    Examples
    --------
    >>> transform(builtin("integers", 1), "shift", 3.0).positions
    array([2., 3., 4.])
    """
    if op == "shift":
        (u,) = args
        return PointConfiguration(
            xi._points, xi._mults, generator=None, _offset=xi._offset + float(u)
        )
    if op == "square":
        if args:
            raise ArgumentError("square takes no arguments")
        return PointConfiguration(xi.positions ** 2, xi._mults, generator=None)
    if op == "restrict":
        lo, hi = args
        if not hi >= lo:
            raise ArgumentError("empty interval")
        pos = xi.positions
        keep = (pos >= lo) & (pos <= hi)
        return PointConfiguration(pos[keep], xi._mults[keep], generator=None)
    raise ArgumentError(f"unknown transform {op!r}")


def _generator_tail_exponent(generator, alpha):
    tag = generator[0]
    if tag == "airy":
        return None  # handled via the zero-law tail directly
    if tag == "integers":
        return float(alpha)
    if tag == "eta":
        return generator[2] * float(alpha)
    raise ArgumentError(f"unknown generator tag {tag!r}")


def _power_tail(p, n_start):
    # Euler-Maclaurin tail of sum_{l >= n} l^(-p) for p > 1.
    n = float(n_start)
    return (
        n ** (1.0 - p) / (p - 1.0)
        + 0.5 * n**-p
        + p * n ** (-p - 1.0) / 12.0
        - p * (p + 1.0) * (p + 2.0) * n ** (-p - 3.0) / 720.0
    )


def m_alpha(xi, alpha, L=None):
    """Moment functional (sum over atoms x != 0 of mult/|x|^alpha)^(1/alpha).

    With ``L`` the sum is restricted to |x| <= L.  Generator-tagged configs
    with ``L`` omitted get an analytic tail for the part of the generator
    beyond the truncation, so the value approximates the full infinite sum.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ArgumentError("alpha must be positive")
    pos = xi.positions
    mts = xi._mults
    keep = np.abs(pos) > MERGE_TOL
    if L is not None:
        keep &= np.abs(pos) <= float(L)
    head = float(np.sum(mts[keep] * np.abs(pos[keep]) ** (-alpha)))
    tail = 0.0
    if L is None and xi.generator is not None:
        tag = xi.generator[0]
        n = xi.generator[1]
        if tag == "airy":
            tail = zeta_tail(alpha, n + 1) if alpha > 1.5 else math.inf
        else:
            p = _generator_tail_exponent(xi.generator, alpha)
            tail = 2.0 * _power_tail(p, n + 1) if p > 1.0 else math.inf
    total = head + tail
    if total == 0.0:
        return 0.0
    return total ** (1.0 / alpha)


def _window_zero_sum(L, table):
    # sum of 1/a_j over zeros with |a_j| <= L, using a precomputed table.
    vals = table.values
    if -vals[-1] < L:
        raise ArgumentError(f"window {L:g} exceeds the paired zero table")
    k = int(np.searchsorted(-vals, L, side="right"))
    return float(np.sum(1.0 / vals[:k]))


def _signed_reciprocal_sum(xi, L=None):
    pos = xi.positions
    mts = xi._mults
    keep = np.abs(pos) > MERGE_TOL
    if L is not None:
        keep &= np.abs(pos) <= float(L)
    return float(np.sum(mts[keep] / pos[keep]))


def m_A(xi, L=None):
    """Signed pairing functional against the Airy zeros.

    Finite (untagged) configurations pair by count: the first N = xi(R)
    zeros.  Generator-tagged configurations pair by symmetric window, and
    with ``L`` omitted the value is an Aitken extrapolation over windows
    {Lmax/4, Lmax/2, Lmax}; +-inf signals a non-contracting (divergent)
    window sequence.
    """
    if xi.generator is None:
        n = xi.total_mass
        if n == 0:
            return 0.0
        zeros = airy_zeros(n).values
        return float(np.sum(1.0 / zeros)) - _signed_reciprocal_sum(xi)

    table = airy_zeros(min(_needed_zero_count(_max_abs(xi)), _PAIR_TABLE_MAX))
    if L is not None:
        return _window_zero_sum(float(L), table) - _signed_reciprocal_sum(xi, L)
    l_max = min(_max_abs(xi), -table.values[-1])
    ws = [
        _window_zero_sum(l, table) - _signed_reciprocal_sum(xi, l)
        for l in (l_max / 4.0, l_max / 2.0, l_max)
    ]
    d1 = ws[1] - ws[0]
    d2 = ws[2] - ws[1]
    floor = 1e-12 * max(1.0, abs(ws[2]))  # summation-order roundoff
    if abs(d1) < floor and abs(d2) < floor:
        return ws[2]
    if abs(d1) < floor or abs(d2) >= 0.95 * abs(d1):
        return math.copysign(math.inf, d2)
    return ws[2] - d2 * d2 / (d2 - d1)


def _max_abs(xi):
    pos = xi.positions
    return float(np.max(np.abs(pos))) if pos.size else 1.0


def _needed_zero_count(L):
    # zero count with |a_j| <= L, from the asymptotic law, plus headroom
    return max(16, int(math.ceil(2.0 / (3.0 * math.pi) * (L + 2.0) ** 1.5)) + 10)


@dataclass(frozen=True)
class ConditionThresholds:
    """Constants against which the admissibility conditions are judged."""

    c0: float = 1.0
    alphas: tuple = (1.6, 1.75, 1.9)
    c1: float = 10.0
    beta: float = 0.4
    c2: float = 10.0
    kappa: float | None = None
    stabilize_tol: float = 1e-6
    max_truncation: int = 12800
    max_probe_atoms: int = 64


@dataclass
class ConditionReport:
    """Outcome of the admissibility checks on one configuration."""

    mA: float
    mA_divergent: bool
    m_alpha: dict
    c1_pass: bool
    c0: float
    c2i_pass: bool
    c2i_alpha: float | None
    c1_bound: float
    c2ii_pass: bool
    c2ii_sup: float
    c2ii_binding_atom: float | None
    beta: float
    c2_bound: float
    c3: tuple | None = None
    inconclusive: bool = False
    truncation_used: int | None = None
    all_pass: bool = field(init=False)

    def __post_init__(self):
        self.all_pass = self.c1_pass and self.c2i_pass and self.c2ii_pass


def _probe_atoms(xi, limit):
    pos = xi.positions
    if pos.size <= limit:
        return pos
    order = np.argsort(np.abs(pos))
    small = order[: limit // 4]
    large = order[-(limit // 2):]
    mid = order[limit // 4 : -(limit // 2)]
    stride = max(1, mid.size // (limit - small.size - large.size))
    return pos[np.concatenate([small, mid[::stride][: limit // 4], large])]


def _m1_shifted_square(xi_support, xi_mults, a, tail_spec):
    # M_1(tau_{-a^2} xi^<2>) = sum over x with x^2 != a^2 of mult/|x^2-a^2|
    d = xi_support**2 - a * a
    keep = np.abs(d) > MERGE_TOL * max(1.0, a * a)
    head = float(np.sum(xi_mults[keep] / np.abs(d[keep])))
    if tail_spec is None:
        return head
    kind, n_ext, kappa = tail_spec
    # Geometric expansion of 1/(x^2 - a^2) in (a/x)^2 beyond the extended
    # truncation; the support extension keeps the ratio away from 1.
    tail = 0.0
    for r in range(5):
        if kind == "airy":
            term = zeta_tail(2.0 * (r + 1), n_ext + 1)
        else:
            term = 2.0 * _power_tail(2.0 * kappa * (r + 1), n_ext + 1)
        tail += (a * a) ** r * term
    return head + tail


def _extended_support(generator, factor=4):
    tag = generator[0]
    n = generator[1] * factor
    if tag == "airy":
        n = min(n, 16000)  # stay inside the double-precision zero envelope
        return np.abs(airy_zeros(n).values)[::-1], ("airy", n, None)
    if tag == "integers":
        return np.arange(1.0, n + 1.0), ("integers", n, 1.0)
    kappa = generator[2]
    return np.arange(1.0, n + 1.0) ** kappa, ("eta", n, kappa)


def _c2ii_sup(xi, thr, probes=None):
    if probes is None:
        probes = _probe_atoms(xi, thr.max_probe_atoms)
    if xi.generator is None:
        support = xi.positions
        mults = xi._mults
        tail_spec = None
    else:
        # Magnitude support; the symmetric generators fold +-x together
        # (weight 2 plus an origin atom), the airy one is one-sided.
        mags, tail_spec = _extended_support(xi.generator)
        if xi.generator[0] == "airy":
            support = mags
            mults = np.ones(mags.size)
        else:
            support = np.concatenate([[0.0], mags])
            mults = np.concatenate([[1.0], np.full(mags.size, 2.0)])
    best = -math.inf
    binding = None
    for a in probes:
        val = (max(abs(a), 1.0)) ** thr.beta * _m1_shifted_square(
            support, mults, float(a), tail_spec
        )
        if val > best:
            best, binding = val, float(a)
    return best, binding


def _count_condition_c3(xi, kappa):
    pos = xi.positions
    if pos.size == 0:
        return 0
    cum = np.concatenate([[0], np.cumsum(xi._mults)])

    def ginv(y):
        return math.copysign(abs(y) ** (1.0 / kappa), y)

    k_lo = int(math.floor(ginv(pos[0]))) - 1
    k_hi = int(math.ceil(ginv(pos[-1]))) + 1
    ks = np.arange(k_lo, k_hi + 1, dtype=float)
    edges = np.sign(ks) * np.abs(ks) ** kappa
    lo_idx = np.searchsorted(pos, edges[:-1], side="left")
    hi_idx = np.searchsorted(pos, edges[1:], side="right")
    return int(np.max(cum[hi_idx] - cum[lo_idx]))


def _report_at(xi, thr, probes=None):
    mA_val = m_A(xi)
    divergent = math.isinf(mA_val)
    malpha = {float(a): m_alpha(xi, a) for a in thr.alphas}
    sup, binding = _c2ii_sup(xi, thr, probes)
    kappa = thr.kappa
    if kappa is None and xi.generator is not None and xi.generator[0] == "eta":
        kappa = xi.generator[2]
    c3 = (kappa, _count_condition_c3(xi, kappa)) if kappa is not None else None
    passing_alpha = next((a for a, v in malpha.items() if v <= thr.c1), None)
    return ConditionReport(
        mA=mA_val,
        mA_divergent=divergent,
        m_alpha=malpha,
        c1_pass=(not divergent) and abs(mA_val) < thr.c0,
        c0=thr.c0,
        c2i_pass=passing_alpha is not None,
        c2i_alpha=passing_alpha,
        c1_bound=thr.c1,
        c2ii_pass=sup <= thr.c2,
        c2ii_sup=sup,
        c2ii_binding_atom=binding,
        beta=thr.beta,
        c2_bound=thr.c2,
        c3=c3,
        truncation_used=xi.generator[1] if xi.generator else None,
    )


def check_conditions(xi, thresholds=None):
    """Evaluate the admissibility conditions and return a report.

    Generator-tagged configurations are re-truncated at doubling counts
    until every reported functional moves by less than ``stabilize_tol``
    between levels (a stable divergence flag also terminates).  Hitting
    ``max_truncation`` without stabilizing sets ``inconclusive``.

    Finite configurations are evaluated once; all sums are exact there.
    """
    thr = thresholds or ConditionThresholds()
    if xi.generator is None:
        return _report_at(xi, thr)

    # Probe atoms for the C.2(ii) sup are fixed at the base truncation so
    # escalation refines each probe's value instead of moving the target.
    probes = _probe_atoms(xi, thr.max_probe_atoms)
    report = _report_at(xi, thr, probes)
    n = xi.generator[1]
    while True:
        if 2 * n > thr.max_truncation:
            report.inconclusive = True
            return report
        n *= 2
        tag = xi.generator[0]
        nxt = builtin(tag, n, kappa=xi.generator[2] if tag == "eta" else None)
        next_report = _report_at(nxt, thr, probes)
        if _stable(report, next_report, thr.stabilize_tol):
            return next_report
        report = next_report


def _stable(r1, r2, tol):
    if r1.mA_divergent != r2.mA_divergent:
        return False
    if not r1.mA_divergent and abs(r1.mA - r2.mA) >= tol:
        return False
    for a, v in r1.m_alpha.items():
        if abs(v - r2.m_alpha[a]) >= tol:
            return False
    return abs(r1.c2ii_sup - r2.c2ii_sup) < tol


def config_to_dict(xi):
    """JSON-ready dict; tagged configs serialize as their generator."""
    if xi.generator is not None:
        tag = xi.generator[0]
        d = {"generator": tag, "n": xi.generator[1]}
        if tag == "eta":
            d["kappa"] = xi.generator[2]
        return d
    return {
        "atoms": [
            {"x": float(x), "mult": int(m)}
            for x, m in zip(xi.positions, xi.mults)
        ]
    }


def config_from_dict(d):
    """Inverse of :func:`config_to_dict`; accepts either schema."""
    if "generator" in d:
        return builtin(d["generator"], d["n"], kappa=d.get("kappa"))
    if "atoms" not in d:
        raise ArgumentError("config dict needs 'atoms' or 'generator'")
    pts = [a["x"] for a in d["atoms"]]
    mts = [int(a.get("mult", 1)) for a in d["atoms"]]
    return PointConfiguration(pts, mts)
