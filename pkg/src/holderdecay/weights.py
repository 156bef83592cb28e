"""Weights, lower convex envelopes of positive sequences, and weight hypotheses.

A weight is either one of the closed-form families

* ``exp_decay``     ``w(t) = exp(-A t)``
* ``power_decay``   ``w(t) = c / t**r``
* ``power_growth``  ``w(t) = (t + alpha)**p``

or a piecewise-linear profile through finitely many breakpoints.  The lower
convex envelope of a sequence ``(n, u_n)`` is represented by
:class:`EnvelopeResult`, which behaves like a decreasing convex weight on
``[0, n*]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DomainError, InvalidInputError

DECREASING = "decreasing_to_zero"
INCREASING = "increasing_to_infinity"

FAMILIES = ("exp_decay", "power_decay", "power_growth", "piecewise_linear")

# Relative slack used in every discrete convexity test.
CONVEXITY_RTOL = 1e-12


def _as_float_array(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _unwrap(values, scalar):
    return float(values) if scalar else values


@dataclass(frozen=True)
class WeightProfile:
    """A positive weight on ``[domain_left, right end)``.

    Use the class-method constructors rather than calling this directly.
    ``params`` holds the family parameters; ``breakpoints`` is only used by
    the piecewise-linear family.
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)
    domain_left: float = 0.0
    breakpoints: tuple[tuple[float, float], ...] = ()
    declared_direction: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown weight family {self.family!r}")
        if self.family == "piecewise_linear":
            if len(self.breakpoints) < 2:
                raise InvalidInputError("piecewise_linear needs at least 2 breakpoints")
            ts = [b[0] for b in self.breakpoints]
            vs = [b[1] for b in self.breakpoints]
            if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
                raise InvalidInputError("breakpoints must be strictly increasing in t")
            if any(not v > 0 for v in vs):
                raise InvalidInputError("breakpoint values must be strictly positive")

    # -- constructors -----------------------------------------------------
    @classmethod
    def exp_decay(cls, A: float, domain_left: float = 0.0) -> "WeightProfile":
        if not A > 0:
            raise InvalidInputError("exp_decay needs A > 0")
        return cls("exp_decay", {"A": float(A)}, float(domain_left))

    @classmethod
    def power_decay(cls, c: float, r: float, domain_left: float = 0.0) -> "WeightProfile":
        if not (c > 0 and r > 0):
            raise InvalidInputError("power_decay needs c > 0 and r > 0")
        if domain_left < 0:
            raise InvalidInputError("power_decay lives on (0, inf)")
        return cls("power_decay", {"c": float(c), "r": float(r)}, float(domain_left))

    @classmethod
    def power_growth(cls, alpha: float, p: float, domain_left: float = 0.0) -> "WeightProfile":
        if not (0.0 <= alpha <= 1.0):
            raise InvalidInputError("power_growth needs alpha in [0, 1]")
        if not p >= 1:
            raise InvalidInputError("power_growth needs p >= 1")
        if domain_left + alpha < 0:
            raise InvalidInputError("t + alpha must stay nonnegative on the domain")
        return cls("power_growth", {"alpha": float(alpha), "p": float(p)}, float(domain_left))

    @classmethod
    def piecewise_linear(cls, breakpoints: Iterable[Sequence[float]],
                         direction: str | None = None) -> "WeightProfile":
        bps = tuple((float(t), float(v)) for t, v in breakpoints)
        if direction is None and len(bps) >= 2:
            direction = DECREASING if bps[-1][1] < bps[0][1] else INCREASING
        if direction not in (DECREASING, INCREASING):
            raise InvalidInputError(f"direction must be {DECREASING!r} or {INCREASING!r}")
        left = bps[0][0] if bps else 0.0
        return cls("piecewise_linear", {}, left, bps, direction)

    # -- metadata ---------------------------------------------------------
    @property
    def direction(self) -> str:
        if self.family in ("exp_decay", "power_decay"):
            return DECREASING
        if self.family == "power_growth":
            return INCREASING
        return self.declared_direction

    @property
    def domain(self) -> tuple[float, float]:
        if self.family == "piecewise_linear":
            return self.breakpoints[0][0], self.breakpoints[-1][0]
        return self.domain_left, math.inf

    @property
    def value_at_left(self) -> float:
        """Limit of the weight at the left end of its domain (may be inf)."""
        m = self.domain[0]
        if self.family == "power_decay" and m == 0:
            return math.inf
        return float(self(m))

    def _check_domain(self, t: np.ndarray) -> None:
        lo, hi = self.domain
        bad = (t < lo) | (t > hi) | ~np.isfinite(t)
        if self.family == "power_decay":
            bad |= t <= 0
        if np.any(bad):
            raise DomainError(f"t={t[bad].ravel()[0]!r} outside weight domain [{lo}, {hi}]")

    # -- evaluation -------------------------------------------------------
    def __call__(self, t):
        arr, scalar = _as_float_array(t)
        self._check_domain(arr)
        P = self.params
        if self.family == "exp_decay":
            out = np.exp(-P["A"] * arr)
        elif self.family == "power_decay":
            out = P["c"] / arr ** P["r"]
        elif self.family == "power_growth":
            out = (arr + P["alpha"]) ** P["p"]
        else:
            ts, vs = self._breakpoint_arrays()
            out = np.interp(arr, ts, vs)
        return _unwrap(out, scalar)

    def log(self, t):
        """Natural log of the weight; stays finite where the value underflows."""
        arr, scalar = _as_float_array(t)
        self._check_domain(arr)
        P = self.params
        if self.family == "exp_decay":
            out = -P["A"] * arr
        elif self.family == "power_decay":
            out = math.log(P["c"]) - P["r"] * np.log(arr)
        elif self.family == "power_growth":
            with np.errstate(divide="ignore"):
                out = P["p"] * np.log(arr + P["alpha"])
        else:
            out = np.log(self(arr))
        return _unwrap(out, scalar)

    def inverse(self, y):
        """Functional inverse of the (strictly monotone) weight."""
        arr, scalar = _as_float_array(y)
        P = self.params
        if self.family == "exp_decay":
            out = -np.log(arr) / P["A"]
        elif self.family == "power_decay":
            out = (P["c"] / arr) ** (1.0 / P["r"])
        elif self.family == "power_growth":
            out = arr ** (1.0 / P["p"]) - P["alpha"]
        else:
            ts, vs = self._breakpoint_arrays()
            if self.direction == DECREASING:
                ts, vs = ts[::-1], vs[::-1]
            if np.any((arr < vs[0]) | (arr > vs[-1])):
                raise DomainError("value outside the range of the piecewise-linear weight")
            out = np.interp(arr, vs, ts)
        lo, hi = self.domain
        if np.any(~np.isfinite(out)) or np.any(out < lo - 1e-12 * max(1.0, abs(lo))):
            raise DomainError("value outside the range of the weight")
        return _unwrap(out, scalar)

    def _breakpoint_arrays(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        return bp[:, 0], bp[:, 1]

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict:
        d = {"family": self.family, "domain_left": self.domain_left}
        d.update(self.params)
        if self.family == "piecewise_linear":
            d["breakpoints"] = [list(b) for b in self.breakpoints]
            d["direction"] = self.direction
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "WeightProfile":
        fam = d.get("family")
        left = float(d.get("domain_left", 0.0))
        if fam == "exp_decay":
            return cls.exp_decay(d["A"], left)
        if fam == "power_decay":
            return cls.power_decay(d["c"], d["r"], left)
        if fam == "power_growth":
            return cls.power_growth(d["alpha"], d["p"], left)
        if fam == "piecewise_linear":
            return cls.piecewise_linear(d["breakpoints"], d.get("direction"))
        raise InvalidInputError(f"unknown weight family {fam!r}")


@dataclass(frozen=True)
class EnvelopeResult:
    """Lower convex envelope of a positive sequence, trusted on ``[0, n*]``.

    ``hull_vertices`` holds the nonincreasing part of the lower hull.  Left of
    the first vertex the envelope continues linearly with
    ``extension_slope``; right of ``n*`` it is undefined.
    """

    hull_vertices: tuple[tuple[int, float], ...]
    reliable_window: tuple[int, int]
    extension_slope: float

    family = "envelope"
    direction = DECREASING

    @property
    def n_star(self) -> int:
        return self.reliable_window[1]

    @property
    def domain(self) -> tuple[float, float]:
        return 0.0, float(self.n_star)

    @property
    def value_at_left(self) -> float:
        return float(self(0.0))

    def _arrays(self):
        v = np.asarray(self.hull_vertices, dtype=float)
        return v[:, 0], v[:, 1]

    def __call__(self, t):
        arr, scalar = _as_float_array(t)
        if np.any(~np.isfinite(arr) | (arr < 0) | (arr > self.n_star)):
            raise DomainError(f"envelope is only defined on [0, {self.n_star}]")
        ns, vs = self._arrays()
        out = np.interp(arr, ns, vs)
        left = arr < ns[0]
        if np.any(left):
            out = np.where(left, vs[0] + self.extension_slope * (arr - ns[0]), out)
        return _unwrap(out, scalar)

    def log(self, t):
        return np.log(self(t))

    def inverse(self, y):
        """Smallest ``t`` in ``[0, n*]`` with ``envelope(t) == y``."""
        arr, scalar = _as_float_array(y)
        ns, vs = self._arrays()
        top = float(self(0.0))
        if np.any((arr < vs[-1]) | (arr > top)):
            raise DomainError(f"value outside envelope range [{vs[-1]}, {top}]")
        # vs is nonincreasing; np.interp needs increasing abscissae
        out = np.interp(arr, vs[::-1], ns[::-1])
        ext = arr > vs[0]
        if np.any(ext):
            out = np.where(ext, ns[0] + (arr - vs[0]) / self.extension_slope, out)
        return _unwrap(out, scalar)

    def to_dict(self) -> dict:
        return {
            "vertices": [[int(n), float(v)] for n, v in self.hull_vertices],
            "reliable_window": [int(self.reliable_window[0]), int(self.reliable_window[1])],
            "extension_slope": float(self.extension_slope),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EnvelopeResult":
        try:
            verts = tuple((int(n), float(v)) for n, v in d["vertices"])
            window = (int(d["reliable_window"][0]), int(d["reliable_window"][1]))
            slope = float(d["extension_slope"])
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InvalidInputError(f"malformed envelope JSON: {exc}") from exc
        if not verts:
            raise InvalidInputError("envelope has no vertices")
        return cls(verts, window, slope)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Lower boundary of the convex hull of points sorted by abscissa (monotone chain).

    Collinear interior points are dropped.
    """
    hull: list[tuple[float, float]] = []
    for p in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _validate_points(points) -> list[tuple[int, float]]:
    pts = [(p[0], p[1]) for p in points]
    if len(pts) < 2:
        raise InvalidInputError("lower_convex_envelope needs at least 2 points")
    out = []
    for n, v in pts:
        if isinstance(n, float):
            if not n.is_integer():
                raise InvalidInputError(f"index {n} is not an integer")
        n = int(n)
        v = float(v)
        if n < 1:
            raise InvalidInputError("indices must be positive integers")
        if not (v > 0 and math.isfinite(v)):
            raise InvalidInputError(f"value at n={n} is not strictly positive")
        out.append((n, v))
    if any(b[0] <= a[0] for a, b in zip(out, out[1:])):
        raise InvalidInputError("indices must be strictly increasing")
    return out


def lower_convex_envelope(points) -> EnvelopeResult:
    """Lower convex envelope of ``[(n, u_n), ...]`` restricted to its nonincreasing part.

    The reliable window ends at the last hull vertex reached by a segment of
    nonpositive slope.  Left of the first index the envelope is continued
    linearly with the first segment's slope (0 if the window is a single
    vertex).
    """
    pts = _validate_points(points)
    hull = lower_hull(pts)
    keep = [hull[0]]
    for a, b in zip(hull, hull[1:]):
        if b[1] > a[1]:
            break
        keep.append(b)
    if len(keep) >= 2:
        slope = (keep[1][1] - keep[0][1]) / (keep[1][0] - keep[0][0])
    else:
        slope = 0.0
    slope = min(slope, 0.0)
    return EnvelopeResult(tuple(keep), (keep[0][0], keep[-1][0]), slope)


def eval_weight(w, t):
    """Evaluate a :class:`WeightProfile` or :class:`EnvelopeResult` at ``t``."""
    return w(t)


def discretely_convex(t, v, rtol: float = CONVEXITY_RTOL) -> bool:
    """Every interior sample lies on or below the chord of its neighbours."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    if t.size < 3:
        return True
    t0, t1, t2 = t[:-2], t[1:-1], t[2:]
    v0, v1, v2 = v[:-2], v[1:-1], v[2:]
    chord = v0 + (v2 - v0) * (t1 - t0) / (t2 - t0)
    scale = np.maximum(np.maximum(np.abs(v0), np.abs(v1)), np.abs(v2))
    return bool(np.all(v1 <= chord + rtol * scale))


def discretely_concave(t, v, rtol: float = CONVEXITY_RTOL) -> bool:
    return discretely_convex(t, -np.asarray(v, dtype=float), rtol)


@dataclass(frozen=True)
class WeightHypothesisReport:
    """Per-hypothesis booleans for a pair of weights on a grid."""

    w1_positive: bool
    w1_decreasing: bool
    w1_convex: bool
    w1_vanishing: bool
    w2_positive: bool
    w2_increasing: bool
    w2_convex: bool
    w2_diverging: bool

    @property
    def all_passed(self) -> bool:
        return all(vars(self).values())

    def to_dict(self) -> dict:
        d = dict(vars(self))
        d["all_passed"] = self.all_passed
        return d


def _profile_checks(w, grid):
    logs = np.asarray(w.log(grid), dtype=float)
    vals = np.asarray(w(grid), dtype=float)
    positive = bool(np.all(np.isfinite(logs)) and np.all(vals >= 0))
    diffs = np.diff(logs)
    return positive, diffs, vals


def check_weight_hypotheses(w1, w2, grid, vanish_threshold: float = 1e-3,
                            diverge_threshold: float = 1e3) -> WeightHypothesisReport:
    """Sampled versions of the structural hypotheses on the two weights.

    ``w1`` must be positive, strictly decreasing, convex and fall below
    ``vanish_threshold`` at the last grid point; ``w2`` positive, strictly
    increasing, convex and above ``diverge_threshold`` there.
    """
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise InvalidInputError("empty grid")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    pos1, d1, v1 = _profile_checks(w1, grid)
    pos2, d2, v2 = _profile_checks(w2, grid)
    return WeightHypothesisReport(
        w1_positive=pos1,
        w1_decreasing=bool(np.all(d1 < 0)),
        w1_convex=discretely_convex(grid, v1),
        w1_vanishing=bool(v1[-1] <= vanish_threshold),
        w2_positive=pos2,
        w2_increasing=bool(np.all(d2 > 0)),
        w2_convex=discretely_convex(grid, v2),
        w2_diverging=bool(v2[-1] >= diverge_threshold),
    )


class LowerConvexEnvelope(BaseEstimator):
    """Estimator wrapper: ``fit`` on a sequence, ``predict`` the envelope.

    Parameters
    ----------
    clip : bool, default=False
        If True, ``predict`` clips arguments into ``[0, n*]`` instead of
        raising :class:`DomainError`.

    Attributes
    ----------
    envelope_ : EnvelopeResult
    n_star_ : int
        End of the reliable window.
    """

    def __init__(self, clip: bool = False):
        self.clip = clip

    def fit(self, X, y=None):
        """Fit on indices ``X`` (shape (k,) or (k, 1)) and values ``y``.

        With ``y=None``, ``X`` must be a (k, 2) array of ``(n, value)`` rows.
        """
        if y is None:
            data = check_array(X, ensure_min_samples=2)
            if data.shape[1] != 2:
                raise InvalidInputError("expected (n, value) rows")
            n, u = data[:, 0], data[:, 1]
        else:
            n = check_array(np.asarray(X).reshape(-1, 1), ensure_min_samples=2)[:, 0]
            u = check_array(np.asarray(y, dtype=float).reshape(-1, 1))[:, 0]
            if n.shape != u.shape:
                raise InvalidInputError("X and y lengths differ")
        self.envelope_ = lower_convex_envelope(list(zip(n, u)))
        self.n_star_ = self.envelope_.n_star
        return self

    def predict(self, X):
        check_is_fitted(self, "envelope_")
        t = np.asarray(X, dtype=float).ravel()
        if self.clip:
            t = np.clip(t, 0.0, self.n_star_)
        return self.envelope_(t)
