"""Damper location analysis: continued fractions, bounded quotients, sine sequences.

A location ``a`` in (0, 1) is a :class:`Location`.  Named quadratic
irrationals (``golden`` and ``sqrt2m1``) are kept exact as ``(P + sqrt(D)) / Q``
so their expansions are computed in integer arithmetic.  Fractions ``p/q`` are
exact rationals, and decimal strings or floats become the exact rational they
denote, together with the resolution of that input.

Phases ``n a mod 1`` are formed with a double-double representation of ``a``
and an error-free product, so ``sin(n pi a)`` stays accurate for large ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

import numpy as np

from .exceptions import InvalidInputError, RationalLocationError

INTEGER_MODE = "integer"
HALF_INTEGER_MODE = "half_integer"
SHIFTS = (INTEGER_MODE, HALF_INTEGER_MODE)

# name -> (P, D, Q) with a = (P + sqrt(D)) / Q and Q | D - P**2
NAMED_QUADRATICS = {
    "golden": (-1, 5, 2),
    "sqrt2m1": (-1, 2, 1),
}

_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class Location:
    """Damper location; exactly one of ``exact`` and ``quad`` is set."""

    kind: str  # "quadratic", "rational", "decimal" or "float"
    label: str
    exact: Fraction | None = None
    quad: tuple[int, int, int] | None = None
    resolution: float = 0.0

    @property
    def value(self) -> float:
        hi, _ = self.hi_lo()
        return hi

    def as_fraction(self, bits: int = 160) -> Fraction:
        """Exact value, or a ``2**-bits``-accurate rational for quadratics."""
        if self.exact is not None:
            return self.exact
        P, D, Q = self.quad
        scale = 1 << bits
        return Fraction(P * scale + math.isqrt(D * scale * scale), Q * scale)

    def hi_lo(self) -> tuple[float, float]:
        fr = self.as_fraction()
        hi = float(fr)
        lo = float(fr - Fraction(hi))
        return hi, lo

    @property
    def is_exact_rational(self) -> bool:
        return self.kind == "rational"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "label": self.label, "value": self.value}
        if self.exact is not None:
            d["numerator"], d["denominator"] = self.exact.numerator, self.exact.denominator
        return d


LocationLike = Union[Location, str, float, Fraction]


def parse_location(spec: LocationLike) -> Location:
    """Build a :class:`Location` from a name, ``"p/q"``, a decimal string or a float.

    Raises :class:`InvalidInputError` unless ``0 < a < 1``.
    """
    if isinstance(spec, Location):
        loc = spec
    elif isinstance(spec, Fraction):
        loc = Location("rational", str(spec), exact=spec)
    elif isinstance(spec, (float, int, np.floating, np.integer)) and not isinstance(spec, bool):
        x = float(spec)
        if not math.isfinite(x):
            raise InvalidInputError("location must be finite")
        loc = Location("float", repr(x), exact=Fraction(x), resolution=math.ulp(x))
    elif isinstance(spec, str):
        s = spec.strip()
        if s in NAMED_QUADRATICS:
            loc = Location("quadratic", s, quad=NAMED_QUADRATICS[s])
        elif "/" in s:
            try:
                num, den = s.split("/")
                fr = Fraction(int(num), int(den))
            except (ValueError, ZeroDivisionError) as exc:
                raise InvalidInputError(f"bad fraction {spec!r}") from exc
            loc = Location("rational", s, exact=fr)
        else:
            try:
                dec = Decimal(s)
            except InvalidOperation as exc:
                raise InvalidInputError(f"cannot parse location {spec!r}") from exc
            if not dec.is_finite():
                raise InvalidInputError("location must be finite")
            exp = dec.as_tuple().exponent
            loc = Location("decimal", s, exact=Fraction(dec), resolution=0.5 * 10.0 ** exp)
    else:
        raise InvalidInputError(f"unsupported location type {type(spec).__name__}")
    fr = loc.as_fraction()
    if not 0 < fr < 1:
        raise InvalidInputError(f"location must lie in (0, 1), got {loc.label}")
    return loc


# -- continued fractions ----------------------------------------------------------

@dataclass(frozen=True)
class ContinuedFraction:
    """``a = [a0; a1, a2, ...]`` with convergents ``p_k / q_k`` (``k = 0`` is ``a0/1``).

    ``terminated`` flags a detected rational; ``precision_limited`` flags an
    expansion cut where the input's resolution stops determining quotients.
    """

    a0: int
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    terminated: bool
    precision_limited: bool = False

    def to_dict(self) -> dict:
        return {"a0": self.a0, "quotients": list(self.quotients),
                "convergents": [list(c) for c in self.convergents],
                "terminated": self.terminated, "precision_limited": self.precision_limited}


def _floor_quadratic(P: int, D: int, Q: int) -> int:
    """``floor((P + sqrt(D)) / Q)`` for non-square ``D`` and ``Q != 0``."""
    r = math.isqrt(D)
    if Q > 0:
        return (P + r) // Q
    # (P + s)/Q = -(P + s)/|Q| and (P + s)/|Q| is never an integer
    return -((P + r) // -Q) - 1


def _quadratic_quotients(P: int, D: int, Q: int, count: int) -> list[int]:
    out = []
    for _ in range(count):
        a = _floor_quadratic(P, D, Q)
        out.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    return out


def continued_fraction(a: LocationLike, max_terms: int = 64,
                       rational_tol: float = 1e-12) -> ContinuedFraction:
    """Continued-fraction expansion of ``a`` in exact arithmetic.

    Stops with ``terminated=True`` when the fractional remainder of a complete
    quotient falls below ``rational_tol``, and with ``precision_limited=True``
    once ``1/q_k**2`` reaches the input resolution.
    """
    loc = parse_location(a)
    if max_terms < 1:
        raise InvalidInputError("max_terms must be positive")
    terminated = False
    limited = False
    if loc.quad is not None:
        P, D, Q = loc.quad
        qs = _quadratic_quotients(P, D, Q, max_terms + 1)
        a0, quotients = qs[0], qs[1:]
    else:
        x = loc.exact
        a0 = math.floor(x)
        r = x - a0
        quotients = []
        q_prev, q = 0, 1
        while len(quotients) < max_terms:
            if r == 0 or r < rational_tol:
                terminated = True
                break
            if loc.resolution > 0 and q * q * loc.resolution >= 1.0:
                limited = True
                break
            x = 1 / r
            ak = math.floor(x)
            quotients.append(ak)
            r = x - ak
            q_prev, q = q, ak * q + q_prev
        else:
            if r == 0 or r < rational_tol:
                terminated = True
    convs = [(a0, 1)]
    p_prev, q_prev, p, q = 1, 0, a0, 1
    for ak in quotients:
        p_prev, p = p, ak * p + p_prev
        q_prev, q = q, ak * q + q_prev
        convs.append((p, q))
    return ContinuedFraction(a0, tuple(quotients), tuple(convs), terminated, limited)


def _sign_quadratic(x: int, y: int, D: int) -> int:
    """Exact sign of ``x + y sqrt(D)``."""
    if y == 0:
        return (x > 0) - (x < 0)
    if x == 0:
        return (y > 0) - (y < 0)
    if (x > 0) == (y > 0):
        return 1 if x > 0 else -1
    # opposite signs: compare x**2 with y**2 D
    lhs, rhs = x * x, y * y * D
    if lhs == rhs:
        return 0
    dominant_x = lhs > rhs
    return (1 if x > 0 else -1) if dominant_x else (1 if y > 0 else -1)


def convergent_bounds_hold(a: LocationLike, cf: ContinuedFraction) -> bool:
    """Check ``|a - p_k/q_k| <= 1/(q_k q_{k+1})`` exactly for every non-final ``k``."""
    loc = parse_location(a)
    convs = cf.convergents
    for (p, q), (_, q_next) in zip(convs, convs[1:]):
        bound = Fraction(1, q * q_next)
        if loc.quad is None:
            if abs(loc.exact - Fraction(p, q)) > bound:
                return False
        else:
            P, D, Q = loc.quad
            # |(P + sqrt D)/Q - p/q| <= 1/(q q')  <=>  |q' (qP - pQ) + q' q sqrt D| <= Q
            x = q_next * (q * P - p * Q)
            y = q_next * q
            if _sign_quadratic(x - Q, y, D) > 0 or _sign_quadratic(-x - Q, -y, D) > 0:
                return False
    return True


def recurrence_holds(cf: ContinuedFraction) -> bool:
    convs = cf.convergents
    qs = [cf.a0, *cf.quotients]
    p2, q2, p1, q1 = 0, 1, 1, 0
    for ak, (p, q) in zip(qs, convs):
        if p != ak * p1 + p2 or q != ak * q1 + q2:
            return False
        p2, q2, p1, q1 = p1, q1, p, q
    denoms = [q for _, q in convs[1:]]
    return all(b > a for a, b in zip(denoms, denoms[1:]))


@dataclass(frozen=True)
class BoundedQuotientsReport:
    bounded: bool
    max_quotient: int
    horizon: int
    note: str = "estimate from a finite prefix of the expansion; not a certificate of membership"

    def to_dict(self) -> dict:
        return {"bounded_estimate": self.bounded, "max_quotient": self.max_quotient,
                "horizon": self.horizon, "note": self.note}


def bounded_quotients(cf: ContinuedFraction, horizon: int = 20) -> BoundedQuotientsReport:
    """Heuristic boundedness of the partial quotients over ``horizon`` terms.

    The estimate is ``True`` when the largest quotient in the second half of
    the horizon does not exceed the largest in the first half.
    """
    if cf.terminated:
        raise RationalLocationError("expansion terminated: the location is rational")
    if horizon < 2:
        raise InvalidInputError("horizon must be at least 2")
    if len(cf.quotients) < horizon:
        raise InvalidInputError(
            f"expansion has {len(cf.quotients)} quotients, fewer than horizon {horizon}")
    qs = cf.quotients[:horizon]
    half = horizon // 2
    bounded = max(qs[half:]) <= max(qs[:half])
    return BoundedQuotientsReport(bool(bounded), int(max(qs)), horizon)


# -- sine sequences -----------------------------------------------------------------

def _split(x):
    c = _SPLITTER * x
    hi = c - (c - x)
    return hi, x - hi


def two_product(a, b):
    """Error-free product: ``a * b == p + e`` exactly (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def reduced_phase(loc: Location, m: np.ndarray, scale: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """``m * a / scale`` as ``(k, r)`` with integer ``k`` and ``r`` in ``[-1/2, 1/2]``.

    ``m`` holds positive integers below ``2**53``; ``scale`` is 1 or 2.
    """
    m = np.asarray(m, dtype=np.int64)
    if loc.is_exact_rational:
        fr = loc.exact / scale
        num, den = fr.numerator, fr.denominator
        prod = [int(mi) * num for mi in m.tolist()]
        k = np.array([(x + den // 2) // den for x in prod], dtype=np.int64)
        rem = np.array([float(Fraction(x - int(kk) * den, den)) for x, kk in zip(prod, k.tolist())])
        return k, rem
    hi, lo = loc.hi_lo()
    hi, lo = hi / scale, lo / scale  # exact: scale is a power of two
    mf = m.astype(float)
    p, e = two_product(mf, hi)
    k1 = np.rint(p)
    r = (p - k1) + (e + mf * lo)
    k2 = np.rint(r)
    r = r - k2
    return (k1 + k2).astype(np.int64), r


@dataclass(frozen=True)
class SineSequence:
    """``sin^2(n pi a)`` (or ``sin^2((n + 1/2) pi a)``) for ``n = 1..N``.

    ``signed`` holds the signed sines; ``accuracy_bound`` bounds the phase
    error of the reduction, inherited input resolution included.
    """

    a: Location
    shift: str
    n: np.ndarray
    values: np.ndarray
    signed: np.ndarray
    accuracy_bound: float

    def rows(self):
        return list(zip(self.n.tolist(), self.values.tolist()))


def signed_sines(loc: Location, n, shift: str = INTEGER_MODE) -> tuple[np.ndarray, float]:
    """``sin(n pi a)`` or ``sin((n + 1/2) pi a)`` for the given ``n`` (may include 0)."""
    if shift not in SHIFTS:
        raise InvalidInputError(f"shift must be one of {SHIFTS}")
    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 0):
        raise InvalidInputError("n must be nonnegative")
    if shift == INTEGER_MODE:
        m, scale = n, 1
    else:
        m, scale = 2 * n + 1, 2
    k, r = reduced_phase(loc, m, scale)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    s = sign * np.sin(np.pi * r)
    mmax = float(np.max(m)) / scale if m.size else 0.0
    bound = math.pi * (mmax * (loc.resolution + 2.0 ** -100) + 4 * np.finfo(float).eps)
    return s, bound


def sine_sequence(a: LocationLike, N: int, shift: str = INTEGER_MODE) -> SineSequence:
    """``sin^2`` of the reduced phases for ``n = 1..N`` with compensated reduction."""
    loc = parse_location(a)
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    n = np.arange(1, N + 1, dtype=np.int64)
    s, bound = signed_sines(loc, n, shift)
    values = np.clip(s * s, 0.0, 1.0)
    return SineSequence(loc, shift, n, values, s, bound)


def require_irrational(a: LocationLike, rational_tol: float = 1e-12) -> Location:
    loc = parse_location(a)
    if loc.is_exact_rational or continued_fraction(loc, 64, rational_tol).terminated:
        raise RationalLocationError(f"location {loc.label} is rational")
    return loc


def liouville_constant(a: LocationLike, N: int, d: float = 2.0,
                       shift: str = INTEGER_MODE) -> tuple[float, int]:
    """Empirical ``min_{n <= N} n**(d-1) |sin(n pi a)|`` and its minimiser.

    Half-integer mode uses ``(2n + 1)**(d-1) |sin((n + 1/2) pi a)|``.  This is
    a lower envelope over a finite range, not the true infimum.
    """
    if not d >= 2:
        raise InvalidInputError("d must be at least 2")
    loc = require_irrational(a)
    seq = sine_sequence(loc, N, shift)
    base = seq.n.astype(float) if shift == INTEGER_MODE else 2.0 * seq.n + 1.0
    scaled = base ** (d - 1) * np.abs(seq.signed)
    k = int(np.argmin(scaled))
    return float(scaled[k]), int(seq.n[k])
