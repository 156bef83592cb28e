"""Concave interpolation pairs (Phi, Psi), the decay function H and its checks.

Conventions: ``Phi`` is increasing and concave with ``Phi(0) = 0``; ``Psi`` is
increasing and concave with ``Psi(inf) = inf``; the decay function is

    H(t) = 1 / Psi^{-1}(1 / Phi(t)),      H^{-1}(t) = Phi^{-1}(1 / Psi(1 / t)).

Interpolants are built from weights (see :mod:`holderdecay.weights`) or from
closed-form families, and carry their inverse.  Inverses without a closed form
use bracketed bisection (:func:`invert_monotone`), since monotonicity is the
only structure guaranteed for piecewise-linear weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .exceptions import (
    DomainError,
    InternalConsistencyError,
    InvalidFunctionError,
    InvalidInputError,
    InvalidWeightError,
    NoBracketError,
    UnsupportedError,
)
from .weights import (
    DECREASING,
    INCREASING,
    EnvelopeResult,
    WeightProfile,
    discretely_concave,
)

BISECTION_TOL = 1e-12
SHAPE_GRID = 512
SHAPE_RTOL = 1e-10
_EPS = np.finfo(float).eps


# -- monotone inversion ------------------------------------------------------

def invert_monotone(f: Callable[[float], float], y: float, bracket: tuple[float, float],
                    tol: float = BISECTION_TOL, domain: tuple[float, float] | None = None,
                    max_expansions: int = 60) -> float:
    """Solve ``f(t) = y`` for strictly monotone ``f`` by bisection.

    The bracket is widened up to ``max_expansions`` times when it does not
    straddle ``y``: by doubling its width towards an infinite domain end, or
    by halving the gap towards a finite (open) one.  Bisection stops once the
    bracket width is below ``tol`` relative to its magnitude, or at machine
    resolution.

    Raises
    ------
    NoBracketError
        ``y`` could not be bracketed.
    InvalidFunctionError
        A sample contradicted monotonicity.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise InvalidInputError("bracket must satisfy lo < hi")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    dlo, dhi = (-math.inf, math.inf) if domain is None else domain
    y = float(y)
    flo, fhi = float(f(lo)), float(f(hi))
    if math.isnan(flo) or math.isnan(fhi):
        raise InvalidFunctionError("function returned NaN at the bracket ends")
    if flo == fhi:
        if flo == y:
            return lo
        raise InvalidFunctionError("function is not strictly monotone on the bracket")
    inc = fhi > flo

    def between(a, b, c):
        return min(a, c) <= b <= max(a, c)

    width = hi - lo
    for k in range(max_expansions + 1):
        if between(flo, y, fhi):
            break
        if k == max_expansions:
            raise NoBracketError(f"could not bracket y={y!r} after {max_expansions} expansions")
        go_right = (y > fhi) if inc else (y < fhi)
        if go_right:
            width *= 2.0
            new = hi + width if math.isinf(dhi) else 0.5 * (hi + dhi)
            if not new > hi:
                raise NoBracketError(f"y={y!r} is beyond the function's range")
            fnew = float(f(new))
            if math.isnan(fnew) or (fnew < fhi if inc else fnew > fhi):
                raise InvalidFunctionError(f"non-monotone sample at t={new!r}")
            lo, flo, hi, fhi = hi, fhi, new, fnew
        else:
            width *= 2.0
            new = lo - width if math.isinf(dlo) else 0.5 * (lo + dlo)
            if not new < lo:
                raise NoBracketError(f"y={y!r} is beyond the function's range")
            fnew = float(f(new))
            if math.isnan(fnew) or (fnew > flo if inc else fnew < flo):
                raise InvalidFunctionError(f"non-monotone sample at t={new!r}")
            hi, fhi, lo, flo = lo, flo, new, fnew

    if flo == y:
        return lo
    if fhi == y:
        return hi
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi or hi - lo <= tol * max(abs(lo), abs(hi)):
            break
        fm = float(f(mid))
        if math.isnan(fm) or not between(flo, fm, fhi):
            raise InvalidFunctionError(f"non-monotone sample at t={mid!r}")
        if fm == y:
            return mid
        if (fm < y) == inc:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


# -- weight (de)serialisation --------------------------------------------------

def weight_to_dict(w) -> dict:
    if isinstance(w, EnvelopeResult):
        return {"family": "envelope", **w.to_dict()}
    return w.to_dict()


def weight_from_dict(d: Mapping):
    if d.get("family") == "envelope":
        return EnvelopeResult.from_dict(d)
    return WeightProfile.from_dict(d)


def _weight_sample_grid(w, n: int) -> np.ndarray:
    lo, hi = w.domain
    if math.isinf(hi):
        t = lo + np.geomspace(1e-3, 1e3, n)
    else:
        t = np.linspace(lo, hi, n)
        if isinstance(w, EnvelopeResult):
            t = np.union1d(t, [v[0] for v in w.hull_vertices])
        elif w.family == "piecewise_linear":
            t = np.union1d(t, [b[0] for b in w.breakpoints])
    if w.family == "power_decay" or isinstance(w, EnvelopeResult) or lo == 0:
        t = t[t > 0]
    return t


# -- interpolants ---------------------------------------------------------------

class Interpolant:
    """Increasing function on ``domain`` with forward and inverse evaluation.

    Instances are produced by the factory functions of this module.  The
    attribute ``concavity_verified`` records the outcome of the sampled
    monotonicity/concavity test done at construction (``None`` if skipped).
    """

    def __init__(self, kind: str, params: Mapping, forward: Callable, inverse: Callable,
                 domain: tuple[float, float], value_range: tuple[float, float], *,
                 inverse_method: str = "closed_form", power_form: tuple[float, float] | None = None,
                 samples: Callable[[int], tuple[np.ndarray, np.ndarray]] | None = None,
                 serial: dict | None = None):
        self.kind = kind
        self.params = dict(params)
        self._forward = forward
        self._inverse = inverse
        self.domain = (float(domain[0]), float(domain[1]))
        self.value_range = (float(value_range[0]), float(value_range[1]))
        self.inverse_method = inverse_method
        self.power_form = power_form
        self._samples = samples
        self._serial = serial
        self.concavity_verified: bool | None = None
        self.increasing_verified: bool | None = None

    def __repr__(self):
        return f"Interpolant(kind={self.kind!r}, params={self.params!r}, domain={self.domain!r})"

    @property
    def sup(self) -> float:
        """Limit of the function at the right end of its domain."""
        return self.value_range[1]

    @staticmethod
    def _clip(arr, lo, hi, what):
        slack_lo = 4 * _EPS * max(1.0, abs(lo))
        slack_hi = 4 * _EPS * max(1.0, abs(hi)) if math.isfinite(hi) else 0.0
        bad = ~np.isfinite(arr) | (arr < lo - slack_lo) | (arr > hi + slack_hi)
        if np.any(bad):
            raise DomainError(f"{what} {arr[bad].ravel()[0]!r} outside [{lo}, {hi}]")
        return np.clip(arr, lo, hi)

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        arr = self._clip(arr, *self.domain, "argument")
        out = self._forward(arr)
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def inv(self, y):
        arr = np.asarray(y, dtype=float)
        arr = self._clip(arr, *self.value_range, "value")
        out = self._inverse(arr)
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def shape_samples(self, n: int = SHAPE_GRID) -> tuple[np.ndarray, np.ndarray]:
        """Sorted ``(s, f(s))`` samples, parametric where that avoids inversion."""
        if self._samples is not None:
            s, v = self._samples(n)
        else:
            lo, hi = self.domain
            if math.isinf(hi):
                s = lo + np.geomspace(1e-6, 1e6, n)
            else:
                s = np.linspace(lo, hi, n + 1)[1:]
            v = np.asarray(self(s), dtype=float)
        s = np.asarray(s, dtype=float)
        v = np.asarray(v, dtype=float)
        ok = np.isfinite(s) & np.isfinite(v) & (s > 0)
        s, v = s[ok], v[ok]
        order = np.argsort(s, kind="stable")
        s, v = s[order], v[order]
        keep = np.concatenate([[True], np.diff(s) > 0])
        return s[keep], v[keep]

    def verify_shape(self, n: int = SHAPE_GRID, rtol: float = SHAPE_RTOL) -> tuple[bool, bool]:
        s, v = self.shape_samples(n)
        increasing = bool(np.all(np.diff(v) > 0))
        concave = discretely_concave(s, v, rtol)
        self.increasing_verified = increasing
        self.concavity_verified = concave
        return increasing, concave

    def to_dict(self) -> dict:
        if self._serial is None:
            raise InvalidInputError(f"interpolant of kind {self.kind!r} is not serialisable")
        return dict(self._serial)

    @classmethod
    def from_dict(cls, d: Mapping) -> "Interpolant":
        kind = d.get("kind")
        if kind == "power":
            return power_interpolant(d["C"], d["exponent"])
        if kind == "phi_from_weight":
            return build_phi(weight_from_dict(d["weight"]), d["p"])
        if kind == "psi_from_weight":
            return build_psi(weight_from_dict(d["weight"]), d.get("root", 1.0))
        if kind == "phi_inverse_weight":
            return phi_inverse_weight(weight_from_dict(d["weight"]), d.get("root", 1.0))
        if kind == "composite_reciprocal":
            return composite_reciprocal(weight_from_dict(d["w1"]), weight_from_dict(d["w2"]))
        if kind == "log_ratio":
            return log_ratio(d["A"])
        if kind == "raised":
            return raised(cls.from_dict(d["base"]), d["k"])
        raise InvalidInputError(f"unknown interpolant kind {kind!r}")


def _power_callables(C: float, e: float):
    def fwd(s):
        return C * np.power(s, e)

    def inv(y):
        return np.power(y / C, 1.0 / e)
    return fwd, inv


def power_interpolant(C: float, exponent: float) -> Interpolant:
    """``f(s) = C s**exponent`` on ``[0, inf)``."""
    C, exponent = float(C), float(exponent)
    if not (C > 0 and exponent > 0):
        raise InvalidInputError("power interpolant needs C > 0 and exponent > 0")
    fwd, inv = _power_callables(C, exponent)
    f = Interpolant("power", {"C": C, "exponent": exponent}, fwd, inv, (0.0, math.inf),
                    (0.0, math.inf), power_form=(C, exponent),
                    serial={"kind": "power", "C": C, "exponent": exponent})
    f.verify_shape()
    return f


def identity_interpolant() -> Interpolant:
    return power_interpolant(1.0, 1.0)


def custom_interpolant(forward: Callable, inverse: Callable, domain: tuple[float, float],
                       value_range: tuple[float, float], verify: bool = True) -> Interpolant:
    """Wrap user callables (vectorised over numpy arrays).  Not serialisable."""
    f = Interpolant("custom", {}, forward, inverse, domain, value_range)
    if verify:
        f.verify_shape()
    return f


def _weight_log(w, t):
    return np.asarray(w.log(t), dtype=float)


def build_phi(w1, p: float, tol: float = BISECTION_TOL) -> Interpolant:
    """``Phi(s) = 1 / phi^{-1}(s)`` with ``phi(t) = w1(t) / t**p``.

    ``Phi^{-1}(y) = phi(1 / y)``.  Closed form for ``power_decay``; bisection
    on ``log phi`` otherwise.

    Raises
    ------
    UnsupportedError
        ``p < 1`` (concavity of ``Phi`` can fail).
    InvalidWeightError
        ``w1`` is not a decreasing weight, or the sampled ``Phi`` is not
        increasing.
    """
    p = float(p)
    if not p >= 1:
        raise UnsupportedError("build_phi requires p >= 1")
    if w1.direction != DECREASING:
        raise InvalidWeightError("w1 must be decreasing to zero")
    serial = {"kind": "phi_from_weight", "weight": weight_to_dict(w1), "p": p}
    params = {"p": p}
    left, right = w1.domain
    if left < 0:
        raise InvalidWeightError("phi(t) = w1(t)/t**p needs a domain inside (0, inf)")

    def phi(t):
        return np.asarray(w1(t), dtype=float) / np.power(t, p)

    def log_phi(t):
        return _weight_log(w1, t) - p * np.log(t)

    def samples(n):
        t = _weight_sample_grid(w1, n)
        return phi(t), 1.0 / t

    s_lo = float(phi(right)) if math.isfinite(right) else 0.0
    s_hi = float(phi(left)) if left > 0 else math.inf
    v_lo = 1.0 / right if math.isfinite(right) else 0.0
    v_hi = 1.0 / left if left > 0 else math.inf

    if isinstance(w1, WeightProfile) and w1.family == "power_decay":
        c, r = w1.params["c"], w1.params["r"]
        e = 1.0 / (r + p)
        C = c ** (-e)
        fwd, inv = _power_callables(C, e)
        f = Interpolant("phi_from_weight", params, fwd, inv, (s_lo, s_hi), (v_lo, v_hi),
                        power_form=(C, e) if left == 0 else None, samples=samples, serial=serial)
    else:
        if math.isfinite(right):
            bracket = (left + 0.5 * (right - left), right)
        else:
            bracket = (left + 1.0, left + 2.0)

        def fwd_scalar(s):
            if s == 0.0:
                return 0.0
            if s == s_lo and math.isfinite(right):
                return v_lo
            t = invert_monotone(lambda x: float(log_phi(x)), math.log(s), bracket, tol,
                                domain=(left, right))
            return 1.0 / t

        def inv(y):
            y = np.asarray(y, dtype=float)
            with np.errstate(divide="ignore"):
                t = 1.0 / y
            out = np.zeros_like(y)
            pos = y > 0
            if np.any(pos):
                out[pos] = phi(np.clip(t[pos], left, right))
            return out

        f = Interpolant("phi_from_weight", params, np.vectorize(fwd_scalar, otypes=[float]),
                        inv, (s_lo, s_hi), (v_lo, v_hi), inverse_method="bisection",
                        samples=samples, serial=serial)
        f.tol = tol
    increasing, _ = f.verify_shape()
    if not increasing:
        raise InvalidWeightError("phi(t) = w1(t)/t**p is not strictly decreasing on the sample grid")
    return f


def build_psi(w2, root: float = 1.0) -> Interpolant:
    """``Psi(y) = (w2^{-1}(y))**(1/root)``; inverse ``w2(x**root)``.

    For ``power_growth(alpha, p)`` and ``root = 1`` this is
    ``y**(1/p) - alpha`` in closed form.
    """
    root = float(root)
    if not root > 0:
        raise InvalidInputError("root must be positive")
    if not isinstance(w2, WeightProfile) or w2.direction != INCREASING:
        raise InvalidWeightError("w2 must be an increasing weight profile")
    left, right = w2.domain
    if root != 1.0 and left < 0:
        raise InvalidWeightError("fractional root needs w2 defined on t >= 0")
    serial = {"kind": "psi_from_weight", "weight": weight_to_dict(w2), "root": root}
    y_lo = float(w2(left))
    y_hi = float(w2(right)) if math.isfinite(right) else math.inf
    v_lo = left ** (1.0 / root) if root != 1.0 else left
    v_hi = right ** (1.0 / root) if math.isfinite(right) else math.inf

    power_form = None
    if w2.family == "power_growth":
        a, q = w2.params["alpha"], w2.params["p"]

        def fwd(y):
            return np.power(np.power(y, 1.0 / q) - a, 1.0 / root)

        def inv(x):
            return np.power(np.power(x, root) + a, q)
        if a == 0.0:
            power_form = (1.0, 1.0 / (q * root))
    else:
        def fwd(y):
            return np.power(np.asarray(w2.inverse(y), dtype=float), 1.0 / root)

        def inv(x):
            return np.asarray(w2(np.power(x, root)), dtype=float)

    def samples(n):
        t = _weight_sample_grid(w2, n)
        t = t[t >= 0] if root != 1.0 else t
        return np.asarray(w2(t), dtype=float), np.power(t, 1.0 / root)

    f = Interpolant("psi_from_weight", {"root": root}, fwd, inv, (y_lo, y_hi), (v_lo, v_hi),
                    power_form=power_form, samples=samples, serial=serial)
    increasing, _ = f.verify_shape()
    if not increasing:
        raise InvalidWeightError("w2 is not strictly increasing on the sample grid")
    return f


def phi_inverse_weight(w1, root: float = 1.0) -> Interpolant:
    """``Phi(s) = (w1^{-1}(s))**(-1/root)``, inverse ``w1(y**(-root))``.

    This is the ``Phi`` of the optimal-pair construction; concavity is
    recorded, not enforced.
    """
    root = float(root)
    if not root > 0:
        raise InvalidInputError("root must be positive")
    if w1.direction != DECREASING:
        raise InvalidWeightError("w1 must be decreasing to zero")
    left, right = w1.domain
    if left < 0:
        raise InvalidWeightError("w1 must be defined on t >= 0")
    serial = {"kind": "phi_inverse_weight", "weight": weight_to_dict(w1), "root": root}
    s_lo = float(w1(right)) if math.isfinite(right) else 0.0
    s_hi = w1.value_at_left
    v_lo = right ** (-1.0 / root) if math.isfinite(right) else 0.0
    v_hi = left ** (-1.0 / root) if left > 0 else math.inf

    power_form = None
    if isinstance(w1, WeightProfile) and w1.family == "power_decay" and left == 0:
        c, r = w1.params["c"], w1.params["r"]
        e = 1.0 / (r * root)
        power_form = (c ** (-e), e)
        fwd, inv = _power_callables(*power_form)
    else:
        def fwd(s):
            s = np.asarray(s, dtype=float)
            out = np.zeros_like(s)
            pos = s > 0
            if np.any(pos):
                out[pos] = np.power(np.asarray(w1.inverse(s[pos]), dtype=float), -1.0 / root)
            return out

        def inv(y):
            y = np.asarray(y, dtype=float)
            out = np.zeros_like(y)
            pos = y > 0
            if np.any(pos):
                out[pos] = np.asarray(w1(np.power(y[pos], -root)), dtype=float)
            return out

    def samples(n):
        t = _weight_sample_grid(w1, n)
        return np.asarray(w1(t), dtype=float), np.power(t, -1.0 / root)

    f = Interpolant("phi_inverse_weight", {"root": root}, fwd, inv, (s_lo, s_hi), (v_lo, v_hi),
                    power_form=power_form, samples=samples, serial=serial)
    f.verify_shape()
    return f


def composite_reciprocal(w1, w2) -> Interpolant:
    """``Phi = 1 / (w2 o w1^{-1})``, the partner of ``Psi = identity``."""
    if w1.direction != DECREASING or w2.direction != INCREASING:
        raise InvalidWeightError("need w1 decreasing and w2 increasing")
    left, right = w1.domain
    serial = {"kind": "composite_reciprocal", "w1": weight_to_dict(w1), "w2": weight_to_dict(w2)}
    s_lo = float(w1(right)) if math.isfinite(right) else 0.0
    s_hi = w1.value_at_left
    v_lo = 1.0 / float(w2(right)) if math.isfinite(right) else 0.0
    w2_left = float(w2(left))
    v_hi = 1.0 / w2_left if w2_left > 0 else math.inf

    def fwd(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        pos = s > 0
        if np.any(pos):
            out[pos] = 1.0 / np.asarray(w2(w1.inverse(s[pos])), dtype=float)
        return out

    def inv(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        pos = y > 0
        if np.any(pos):
            out[pos] = np.asarray(w1(w2.inverse(1.0 / y[pos])), dtype=float)
        return out

    power_form = None
    if (isinstance(w1, WeightProfile) and w1.family == "power_decay" and left == 0
            and w2.family == "power_growth" and w2.params["alpha"] == 0 and w2.domain_left == 0):
        c, r, q = w1.params["c"], w1.params["r"], w2.params["p"]
        power_form = (c ** (-q / r), q / r)

    def samples(n):
        t = _weight_sample_grid(w1, n)
        return np.asarray(w1(t), dtype=float), 1.0 / np.asarray(w2(t), dtype=float)

    f = Interpolant("composite_reciprocal", {}, fwd, inv, (s_lo, s_hi), (v_lo, v_hi),
                    power_form=power_form, samples=samples, serial=serial)
    f.verify_shape()
    return f


def log_ratio(A: float) -> Interpolant:
    """``Phi(t) = 2A / (A - ln t)`` on ``[0, e**(A-2)]``, ``Phi(0) = 0``.

    Partner of ``Psi = sqrt`` for the weights ``exp(-A|x|)`` and ``|x|**2``.
    """
    A = float(A)
    if not A >= 1:
        raise InvalidInputError("log_ratio needs A >= 1")
    hi = math.exp(A - 2.0)

    def fwd(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = 2.0 * A / (A - np.log(t[pos]))
        return out

    def inv(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        pos = y > 0
        out[pos] = np.exp(A - 2.0 * A / y[pos])
        return out

    def samples(n):
        s = np.geomspace(hi * 1e-12, hi, n)
        return s, fwd(s)

    f = Interpolant("log_ratio", {"A": A}, fwd, inv, (0.0, hi), (0.0, A), samples=samples,
                    serial={"kind": "log_ratio", "A": A})
    f.verify_shape()
    return f


def raised(base: Interpolant, k: float) -> Interpolant:
    """``base**k``; concavity is deliberately not enforced."""
    k = float(k)
    if not k > 0:
        raise InvalidInputError("exponent must be positive")

    def fwd(s):
        return np.power(base._forward(s), k)

    def inv(y):
        return base._inverse(np.power(y, 1.0 / k))

    pf = None
    if base.power_form is not None:
        pf = (base.power_form[0] ** k, base.power_form[1] * k)
    serial = None
    if base._serial is not None:
        serial = {"kind": "raised", "base": base.to_dict(), "k": k}
    lo, hi = base.value_range
    f = Interpolant("raised", {"k": k}, fwd, inv, base.domain, (lo ** k, hi ** k),
                    inverse_method=base.inverse_method, power_form=pf, serial=serial)
    return f


# -- pairs ----------------------------------------------------------------------

@dataclass
class InterpolationPair:
    """``(Phi, Psi)`` with the derived decay function ``H``.

    ``delta`` is the right end of the domain of ``H``; ``h_sup`` is the limit of
    ``H`` at ``delta``.  For pairs of power form ``h_closed_form = (C, e)``
    means ``H(t) = C t**e``.
    """

    phi: Interpolant
    psi: Interpolant
    p_exponent: float = 1.0
    h_closed_form: tuple[float, float] | None = None
    delta: float = math.inf
    h_sup: float = math.inf
    label: str = "custom"
    notes: list = field(default_factory=list)

    @property
    def h_domain(self) -> tuple[float, float]:
        return max(0.0, self.phi.domain[0]), self.delta

    def _check_h_arg(self, arr):
        lo, hi = self.h_domain
        bad = ~np.isfinite(arr) | (arr < lo) | (arr <= 0) | (arr >= hi)
        if np.any(bad):
            raise DomainError(f"H argument {arr[bad].ravel()[0]!r} outside ({lo}, {hi})")

    def h(self, t, route: str = "auto"):
        """``H(t) = 1 / Psi^{-1}(1 / Phi(t))``.

        ``route`` selects ``"closed"`` (power pairs only), ``"generic"`` (always
        through ``Phi`` and ``Psi^{-1}``) or ``"auto"``.
        """
        arr = np.asarray(t, dtype=float)
        self._check_h_arg(arr)
        if route not in ("auto", "closed", "generic"):
            raise InvalidInputError(f"unknown route {route!r}")
        if route == "closed" and self.h_closed_form is None:
            raise InvalidInputError("pair has no closed-form H")
        if route != "generic" and self.h_closed_form is not None:
            C, e = self.h_closed_form
            out = C * np.power(arr, e)
        else:
            out = 1.0 / np.asarray(self.psi.inv(1.0 / np.asarray(self.phi(arr))), dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    def h_inv(self, t):
        """``H^{-1}(t) = Phi^{-1}(1 / Psi(1 / t))``."""
        arr = np.asarray(t, dtype=float)
        bad = ~np.isfinite(arr) | (arr <= 0) | (arr >= self.h_sup)
        if np.any(bad):
            raise DomainError(f"H^-1 argument {arr[bad].ravel()[0]!r} outside (0, {self.h_sup})")
        if self.h_closed_form is not None:
            C, e = self.h_closed_form
            out = np.power(arr / C, 1.0 / e)
        else:
            out = np.asarray(self.phi.inv(1.0 / np.asarray(self.psi(1.0 / arr))), dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "phi": self.phi.to_dict(),
            "psi": self.psi.to_dict(),
            "p_exponent": self.p_exponent,
            "h_closed_form": list(self.h_closed_form) if self.h_closed_form else None,
            "delta": self.delta,
            "h_sup": self.h_sup,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "InterpolationPair":
        try:
            phi = Interpolant.from_dict(d["phi"])
            psi = Interpolant.from_dict(d["psi"])
        except KeyError as exc:
            raise InvalidInputError(f"malformed pair JSON: missing {exc}") from exc
        return make_pair(phi, psi, p_exponent=d.get("p_exponent", 1.0), validate=False,
                         label=d.get("label", "custom"))


def make_pair(phi: Interpolant, psi: Interpolant, p_exponent: float = 1.0,
              validate: bool = True, label: str = "custom") -> InterpolationPair:
    """Assemble a pair, computing ``delta``, ``h_sup`` and any closed form.

    ``delta = Phi^{-1}(1 / Psi(lo))`` where ``lo`` is the left end of Psi's
    domain (``w2(m)`` for weight-built Psi) when ``Psi(lo) > 0``; otherwise the
    right end of Phi's domain.

    Raises
    ------
    InvalidFunctionError
        With ``validate``, if either function failed its sampled
        increasing/concave test.
    """
    if validate:
        for name, f in (("Phi", phi), ("Psi", psi)):
            if f.concavity_verified is None:
                f.verify_shape()
            if not (f.concavity_verified and f.increasing_verified):
                raise InvalidFunctionError(f"{name} is not increasing and concave on its sample grid")
    notes = []
    y0 = psi.value_range[0]
    delta = phi.domain[1]
    if y0 > 0:
        target = 1.0 / y0
        lo, hi = phi.value_range
        if lo <= target <= hi:
            delta = float(phi.inv(target))
        else:
            notes.append("1/Psi(w2(m)) outside the range of Phi; delta set to Phi's domain end")
    x = max(y0, 1.0 / phi.sup if phi.sup > 0 else math.inf)
    x = min(max(x, psi.value_range[0]), psi.value_range[1])
    base = float(psi.inv(x)) if math.isfinite(x) else math.inf
    h_sup = math.inf if base == 0.0 else 1.0 / base
    closed = None
    if phi.power_form is not None and psi.power_form is not None:
        (C1, e1), (C2, e2) = phi.power_form, psi.power_form
        closed = ((C1 * C2) ** (1.0 / e2), e1 / e2)
    return InterpolationPair(phi, psi, float(p_exponent), closed, float(delta), float(h_sup),
                             label, notes)


def h_fun(pair: InterpolationPair, t):
    return pair.h(t)


def h_inv(pair: InterpolationPair, t):
    return pair.h_inv(t)


def power_pair(C1: float, e1: float, C2: float, e2: float) -> InterpolationPair:
    """``Phi = C1 t**e1``, ``Psi = C2 t**e2`` so ``H(t) = (C1 C2)**(1/e2) t**(e1/e2)``."""
    return make_pair(power_interpolant(C1, e1), power_interpolant(C2, e2),
                     p_exponent=1.0 / e1, label="power")


def power_decay_pair(c: float, nu: float) -> InterpolationPair:
    """Pair for ``w1 = c**2 / t**(2(1+nu))`` and ``w2 = t**2``.

    ``Phi = 2 (t/c**2)**(1/(2(1+nu)))`` and ``Psi = sqrt`` give
    ``H(t) = 4 (t/c**2)**(1/(1+nu))``; ``Phi`` is twice the optimal choice.
    """
    e = 1.0 / (2.0 * (1.0 + nu))
    return power_pair(2.0 * c ** (-2.0 * e), e, 1.0, 0.5)


def shifted_power_pair(w1, p: float, alpha: float = 0.0) -> InterpolationPair:
    """Pair for ``w2 = (t + alpha)**p``: ``H(t) = 1 / (phi^{-1}(t) + alpha)**p``."""
    w2 = WeightProfile.power_growth(alpha, p)
    return make_pair(build_phi(w1, p), build_psi(w2), p_exponent=p, label="shifted_power")


def optimal_pair(w1, w2, p: float = 1.0) -> InterpolationPair:
    """``Phi_p = (w1^{-1})**(-1/p)``, ``Psi_p = (w2^{-1})**(1/p)``; ``H = 1/(w2 o w1^{-1})``.

    Optimality needs ``Phi_p`` concave; that is only sampled and recorded in
    ``pair.phi.concavity_verified``.
    """
    p = float(p)
    if not p >= 1:
        raise UnsupportedError("optimal pair construction requires p >= 1")
    pair = make_pair(phi_inverse_weight(w1, p), build_psi(w2, p), p_exponent=p,
                     validate=False, label="optimal")
    if not pair.phi.concavity_verified:
        pair.notes.append("Phi_p failed the sampled concavity test")
    return pair


def identity_optimal_pair(w1, w2) -> InterpolationPair:
    """``Psi = identity``, ``Phi = 1/(w2 o w1^{-1})`` (optimal when that Phi is concave)."""
    pair = make_pair(composite_reciprocal(w1, w2), identity_interpolant(), validate=False,
                     label="identity_optimal")
    if not pair.phi.concavity_verified:
        pair.notes.append("1/(w2 o w1^-1) failed the sampled concavity test")
    return pair


def exp_square_pair(A: float) -> InterpolationPair:
    """``Phi(t) = 2A/(A - ln t)``, ``Psi = sqrt`` for weights ``exp(-A|x|)``, ``|x|**2``."""
    return make_pair(log_ratio(A), power_interpolant(1.0, 0.5), p_exponent=2.0, label="exp_square")


# -- inequality checks ------------------------------------------------------------

def _as_1d(x, name):
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def jensen_upper_check(phi: Callable, masses: Sequence[float], values: Sequence[float]) -> float:
    """``phi(sum m_i v_i) - sum m_i phi(v_i)``; nonnegative for concave ``phi``."""
    m = _as_1d(masses, "masses")
    v = _as_1d(values, "values")
    if m.shape != v.shape:
        raise InvalidInputError("masses and values differ in length")
    if np.any(m < 0):
        raise InvalidInputError("masses must be nonnegative")
    total = math.fsum(m.tolist())
    if abs(total - 1.0) > 1e-12:
        raise InvalidInputError(f"masses sum to {total!r}, not 1")
    mean = math.fsum((m * v).tolist())
    phv = np.asarray([float(phi(x)) for x in v.tolist()])
    return float(phi(mean)) - math.fsum((m * phv).tolist())


def weighted_averages(f, mu, w1_vals, w2_vals, p: float) -> tuple[float, float]:
    """``|f|**p``-weighted averages of the two weights under ``mu``."""
    f = _as_1d(f, "f")
    mu = _as_1d(mu, "mu")
    w1v = _as_1d(w1_vals, "w1_vals")
    w2v = _as_1d(w2_vals, "w2_vals")
    if not (f.shape == mu.shape == w1v.shape == w2v.shape):
        raise InvalidInputError("f, mu and weight values must have equal length")
    if not p > 0:
        raise InvalidInputError("p must be positive")
    if np.any(mu <= 0) or np.any(w1v <= 0) or np.any(w2v <= 0):
        raise InvalidInputError("masses and weight values must be positive")
    g = np.abs(f) ** p * mu
    norm = math.fsum(g.tolist())
    if norm == 0:
        raise InvalidInputError("f is identically zero")
    a1 = math.fsum((g * w1v).tolist()) / norm
    a2 = math.fsum((g * w2v).tolist()) / norm
    return a1, a2


def holder_check(f, mu, w1_vals, w2_vals, p: float, pair: InterpolationPair) -> float:
    """``Phi(A1) Psi(A2) - 1`` for the normalised weighted averages ``A1, A2``.

    Raises :class:`DomainError` when an average leaves the domain of Phi or Psi.
    """
    a1, a2 = weighted_averages(f, mu, w1_vals, w2_vals, p)
    return float(pair.phi(a1)) * float(pair.psi(a2)) - 1.0


def pointwise_bound(pair: InterpolationPair, w1, w2, grid) -> float:
    """Minimum over ``grid`` of ``Phi(w1(t)) Psi(w2(t))``."""
    t = _as_1d(grid, "grid")
    return float(np.min(np.asarray(pair.phi(w1(t))) * np.asarray(pair.psi(w2(t)))))


@dataclass(frozen=True)
class AdmissibilityReport:
    condition_a: bool
    condition_b: bool
    h_exceeds_one: bool
    ratio_nondecreasing: bool
    notes: tuple[str, ...] = ()

    @property
    def admissible(self) -> bool:
        return self.condition_a or self.condition_b

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("condition_a", "condition_b", "h_exceeds_one", "ratio_nondecreasing")}
        d["admissible"] = self.admissible
        d["notes"] = list(self.notes)
        return d


def check_admissible(pair: InterpolationPair, grid, slack: float = 1e-10) -> AdmissibilityReport:
    """Which structural condition holds: (a) ``H^{-1}(t)/t`` nondecreasing on the
    grid with ``H`` exceeding 1 before ``delta``, or (b) both functions powers.

    Domain problems yield a non-admissible report, never an exception.
    """
    t = np.sort(_as_1d(grid, "grid"))
    if np.any((t <= 0) | (t >= 1)):
        raise InvalidInputError("grid must lie in (0, 1)")
    notes = []
    cond_b = pair.phi.power_form is not None and pair.psi.power_form is not None
    h_big = pair.h_sup > 1.0
    try:
        g = np.asarray(pair.h_inv(t)) / t
        mono = bool(np.all(np.diff(g) >= -slack * np.abs(g[:-1])))
    except (DomainError, NoBracketError) as exc:
        mono = False
        notes.append(f"H^-1 not evaluable on the grid: {exc}")
    if not h_big:
        notes.append(f"H stays below 1 on its domain (sup {pair.h_sup!r})")
    return AdmissibilityReport(mono and h_big, cond_b, h_big, mono, tuple(notes))


@dataclass(frozen=True)
class OptimalityReport:
    grid: tuple[float, ...]
    ratios: tuple[float, ...]
    sup_ratio: float
    sup_fine: float
    sup_coarse: float
    optimal: bool
    note: str = ("finite-grid proxy for an asymptotic statement: boundedness is tested "
                 "by comparing the finer half of the grid against the coarser half")

    def to_dict(self) -> dict:
        return {"sup_ratio": self.sup_ratio, "sup_fine": self.sup_fine,
                "sup_coarse": self.sup_coarse, "optimal": self.optimal, "note": self.note,
                "samples": [[g, r] for g, r in zip(self.grid, self.ratios)]}


def default_eps_grid(pair: InterpolationPair, n: int = 161, smallest: float = 1e-8) -> np.ndarray:
    lo, hi = pair.h_domain
    top = min(1e-2, 0.5 * hi)
    bottom = max(smallest, lo * (1 + 1e-9)) if lo > 0 else smallest
    if not top > bottom:
        raise DomainError("H domain too small for the default optimality grid")
    return np.geomspace(bottom, top, n)


def check_optimality(pair: InterpolationPair, w1, w2, eps_grid=None,
                     factor: float = 1.05) -> OptimalityReport:
    """Measure ``C(t) = H(t) w2(w1^{-1}(t))`` on a grid towards 0.

    The lower bound ``C >= 1`` must hold wherever the pointwise hypothesis holds;
    a violation beyond 1e-9 raises :class:`InternalConsistencyError`.
    """
    grid = default_eps_grid(pair) if eps_grid is None else np.sort(_as_1d(eps_grid, "eps_grid"))
    ratios = np.asarray(pair.h(grid)) * np.asarray(w2(w1.inverse(grid)), dtype=float)
    worst = float(np.min(ratios))
    if worst < 1.0 - 1e-9:
        k = int(np.argmin(ratios))
        raise InternalConsistencyError(
            f"H(t) w2(w1^-1(t)) = {worst!r} < 1 at t = {grid[k]!r}")
    half = len(grid) // 2
    fine = float(np.max(ratios[:max(half, 1)]))
    coarse = float(np.max(ratios[half:])) if half < len(grid) else fine
    sup = float(np.max(ratios))
    optimal = bool(np.isfinite(sup) and fine <= factor * coarse)
    return OptimalityReport(tuple(grid.tolist()), tuple(ratios.tolist()), sup, fine, coarse, optimal)


def power_invariance_check(pair: InterpolationPair, p: float, grid) -> float:
    """``max |H_{Phi,Psi} - H_{Phi^p,Psi^p}|`` over ``grid`` (generic route on both sides)."""
    t = _as_1d(grid, "grid")
    raised_pair = make_pair(raised(pair.phi, p), raised(pair.psi, p), validate=False)
    return float(np.max(np.abs(np.asarray(pair.h(t, route="generic"))
                               - np.asarray(raised_pair.h(t, route="generic")))))
