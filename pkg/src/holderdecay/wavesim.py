"""Modal simulation of string and beam equations with a pointwise damper at ``a``.

Each model keeps ``N`` eigenmodes with frequencies ``lam`` and damper trace
``s`` (the mode shapes evaluated at ``a``).  Modal coordinates obey

    q'' + lam**2 q + 2 s (s . q') = 0,      E = 1/4 sum(v**2 + lam**2 q**2),

and the energy decreases at the rate ``(s . v)**2``, the squared velocity at
the damper.  Time stepping is the implicit midpoint rule.  The damping matrix
has rank one, so each implicit solve is a diagonal solve plus a
Sherman-Morrison correction, and the discrete energy identity
``E_{k+1} - E_k = -dt (s . vbar)**2`` holds up to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .dioph import HALF_INTEGER_MODE, INTEGER_MODE, Location, LocationLike, parse_location, signed_sines
from .exceptions import DomainError, InvalidInputError, StepFailureError
from .interp import InterpolationPair
from .rng import SplitMix64
from .weights import WeightProfile

KINDS = ("dirichlet", "mixed", "beam")
_ALIASES = {"dirichlet_wave": "dirichlet", "mixed_wave": "mixed"}
BREAKDOWN_TOL = 1e-14


def canonical_kind(kind: str) -> str:
    k = _ALIASES.get(kind, kind)
    if k not in KINDS:
        raise InvalidInputError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    return k


@dataclass(frozen=True, eq=False)
class ModalModel:
    """Truncated modal description of one damped equation.

    ``modes`` are the mode indices ``n`` (``1..N`` for dirichlet and
    beam, ``0..N-1`` for mixed).
    """

    kind: str
    a: Location
    N: int
    modes: np.ndarray
    frequencies: np.ndarray
    trace: np.ndarray
    strong_weight: WeightProfile

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a.to_dict(), "N": self.N}


def assemble_model(kind: str, a: LocationLike, N: int) -> ModalModel:
    """Frequencies ``n pi``, ``(n + 1/2) pi`` or ``(n pi)**2`` and the signed trace."""
    kind = canonical_kind(kind)
    loc = parse_location(a)
    if int(N) != N or N < 1:
        raise InvalidInputError("N must be a positive integer")
    N = int(N)
    if kind == "mixed":
        modes = np.arange(0, N, dtype=np.int64)
        lam = (modes + 0.5) * np.pi
        trace, _ = signed_sines(loc, modes, HALF_INTEGER_MODE)
        w2 = WeightProfile.power_growth(0.5, 2.0)
    else:
        modes = np.arange(1, N + 1, dtype=np.int64)
        trace, _ = signed_sines(loc, modes, INTEGER_MODE)
        if kind == "dirichlet":
            lam = modes * np.pi
            w2 = WeightProfile.power_growth(0.0, 2.0)
        else:
            lam = (modes * np.pi) ** 2
            w2 = WeightProfile.power_growth(0.0, 4.0)
    for arr in (modes, lam, trace):
        arr.setflags(write=False)
    return ModalModel(kind, loc, N, modes, lam, trace, w2)


def with_trace(model: ModalModel, trace) -> ModalModel:
    """Copy of ``model`` with a replaced damper trace (e.g. zero for an undamped run)."""
    trace = np.array(trace, dtype=float)
    if trace.shape != model.trace.shape:
        raise InvalidInputError("trace length must equal N")
    trace.setflags(write=False)
    return ModalModel(model.kind, model.a, model.N, model.modes, model.frequencies, trace,
                      model.strong_weight)


@dataclass(frozen=True, eq=False)
class ModalState:
    time: float
    q: np.ndarray
    v: np.ndarray


def _coeffs(model: ModalModel, c, name: str) -> np.ndarray:
    c = np.asarray(c, dtype=float).ravel()
    if c.size > model.N:
        raise InvalidInputError(f"{name} has {c.size} entries but the model keeps {model.N} modes")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError(f"{name} has non-finite entries")
    out = np.zeros(model.N)
    out[:c.size] = c
    return out


def project_initial_data(model: ModalModel, a_coeffs, b_coeffs) -> ModalState:
    """``q(0) = a``, ``v(0) = lam * b`` (shorter lists are zero-padded)."""
    a = _coeffs(model, a_coeffs, "a_coeffs")
    b = _coeffs(model, b_coeffs, "b_coeffs")
    return ModalState(0.0, a, model.frequencies * b)


def energy(model: ModalModel, state: ModalState) -> float:
    q, v = np.asarray(state.q), np.asarray(state.v)
    if q.shape != (model.N,) or v.shape != (model.N,):
        raise InvalidInputError("state dimension does not match the model")
    lam = model.frequencies
    return 0.25 * (float(np.dot(v, v)) + float(np.dot(lam * q, lam * q)))


def weak_and_strong_energies(model: ModalModel, a_coeffs, b_coeffs, omega1) -> tuple[float, float]:
    """``E- = 1/2 sum lam**2 (a**2+b**2) w1(n)`` and ``E+ = 1/4 sum lam**4 (a**2+b**2)``.

    ``E+`` equals ``1/4 sum lam**2 (a**2+b**2) kappa w2(n)`` with the model's
    strong weight ``w2`` and ``kappa = pi**2`` (waves) or ``pi**4`` (beam).
    """
    a = _coeffs(model, a_coeffs, "a_coeffs")
    b = _coeffs(model, b_coeffs, "b_coeffs")
    lam2 = model.frequencies ** 2
    c = lam2 * (a * a + b * b)
    used = model.modes[c > 0]
    top = float(used.max()) if used.size else 0.0
    if top > omega1.domain[1]:
        raise DomainError(f"weight window ends at {omega1.domain[1]} but data reaches mode {top:g}")
    w = np.zeros(model.N)
    if used.size:
        w[c > 0] = np.asarray(omega1(model.modes[c > 0].astype(float)), dtype=float)
    e_minus = 0.5 * math.fsum((c * w).tolist())
    e_plus = 0.25 * math.fsum((c * lam2).tolist())
    return e_minus, e_plus


def norms_squared(model: ModalModel, a_coeffs, b_coeffs) -> tuple[float, float]:
    """``(||.||_X**2, ||.||_{D(A)}**2) = (2 E(0), 2 E+(0))`` from the modal sums."""
    a = _coeffs(model, a_coeffs, "a_coeffs")
    b = _coeffs(model, b_coeffs, "b_coeffs")
    lam2 = model.frequencies ** 2
    c = lam2 * (a * a + b * b)
    return 0.5 * math.fsum(c.tolist()), 0.5 * math.fsum((c * lam2).tolist())


class _MidpointStepper:
    """Precomputed implicit-midpoint coefficients for a fixed ``dt``."""

    def __init__(self, model: ModalModel, dt: float):
        if not (dt > 0 and math.isfinite(dt)):
            raise InvalidInputError("dt must be positive and finite")
        lam = model.frequencies
        s = np.asarray(model.trace, dtype=float)
        self.dt = dt
        self.s = s
        self.half_dt_lam2 = 0.5 * dt * lam * lam
        self.dinv = 1.0 / (1.0 + 0.25 * dt * dt * lam * lam)
        self.dinv_s = self.dinv * s
        sigma = float(np.dot(s, self.dinv_s))
        denom = 1.0 + dt * sigma
        if not (math.isfinite(denom) and denom >= BREAKDOWN_TOL):
            raise StepFailureError(f"rank-one update denominator {denom!r} (dt={dt!r}, s.D^-1 s={sigma!r})")
        self.c = dt / denom
        self.keep = 1.0 - self.c * sigma  # s . vbar = keep * (s . D^-1 rhs)

    def advance(self, q: np.ndarray, v: np.ndarray) -> float:
        """Advance ``q, v`` in place; return the step's dissipation ``dt (s . vbar)**2``."""
        w = self.dinv * (v - self.half_dt_lam2 * q)
        sw = float(np.dot(self.s, w))
        vbar = w - (self.c * sw) * self.dinv_s
        q += self.dt * vbar
        np.subtract(2.0 * vbar, v, out=v)
        sv = self.keep * sw
        return self.dt * sv * sv


def step(model: ModalModel, state: ModalState, dt: float) -> ModalState:
    """One implicit-midpoint step.

    Raises :class:`StepFailureError` if the rank-one update breaks down or the
    state stops being finite.
    """
    stepper = _MidpointStepper(model, dt)
    q, v = np.array(state.q, dtype=float), np.array(state.v, dtype=float)
    stepper.advance(q, v)
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
        raise StepFailureError(f"non-finite state after step at t={state.time + dt!r}")
    return ModalState(state.time + dt, q, v)


@dataclass(eq=False)
class Trajectory:
    """Sampled run: times, energies and cumulative dissipation at each sample.

    ``dissipation`` is the running sum of ``dt (s . vbar)**2``; the discrete
    energy identity reads ``E_k - E_0 + dissipation_k = 0`` up to rounding.
    """

    model: ModalModel
    dt: float
    times: np.ndarray
    energies: np.ndarray
    dissipation: np.ndarray
    steps: np.ndarray
    states: list | None = None
    integrator_meta: dict = field(default_factory=dict)

    @property
    def final_state(self) -> ModalState | None:
        return self.states[-1] if self.states else None

    def identity_defect(self) -> float:
        """``max_k |E_k - E_0 + D_k| / E_0``."""
        e0 = self.energies[0]
        if e0 == 0:
            return float(np.max(np.abs(self.energies - e0 + self.dissipation)))
        return float(np.max(np.abs(self.energies - e0 + self.dissipation)) / e0)

    def max_energy_increase(self) -> float:
        """Largest ``E_{k+1} - E_k`` relative to ``E_0`` (nonpositive when monotone)."""
        if len(self.energies) < 2 or self.energies[0] == 0:
            return 0.0
        return float(np.max(np.diff(self.energies)) / self.energies[0])


def sample_steps(nsteps: int, stride: int | None = None, log_samples: int | None = None) -> np.ndarray:
    """Step indices to sample: every ``stride`` steps, or ``log_samples`` geometric ones.

    Step 0 and the last step are always included.
    """
    if nsteps < 0:
        raise InvalidInputError("nsteps must be nonnegative")
    if log_samples is not None:
        if log_samples < 2:
            raise InvalidInputError("log_samples must be at least 2")
        idx = np.rint(np.geomspace(1, max(nsteps, 1), log_samples)).astype(np.int64)
    else:
        stride = 1 if stride is None else int(stride)
        if stride < 1:
            raise InvalidInputError("sample_stride must be positive")
        idx = np.arange(0, nsteps + 1, stride, dtype=np.int64)
    idx = np.union1d(np.union1d(idx[idx <= nsteps], [0]), [nsteps])
    return idx.astype(np.int64)


def simulate(model: ModalModel, init: ModalState, dt: float, T: float, sample_stride: int | None = None,
             log_samples: int | None = None, keep_states: bool = False) -> Trajectory:
    """Integrate to time ``T`` (rounded to a whole number of steps).

    Raises :class:`StepFailureError` on solver breakdown or a non-finite state.
    """
    if not (T >= 0 and math.isfinite(T)):
        raise InvalidInputError("T must be nonnegative and finite")
    stepper = _MidpointStepper(model, dt)
    nsteps = int(round(T / dt))
    samples = sample_steps(nsteps, sample_stride, log_samples)
    q = np.array(init.q, dtype=float)
    v = np.array(init.v, dtype=float)
    if q.shape != (model.N,) or v.shape != (model.N,):
        raise InvalidInputError("initial state dimension does not match the model")
    t0 = float(init.time)
    times, energies, diss, states = [], [], [], []
    total, comp = 0.0, 0.0  # Neumaier summation of the ledger

    def record(k):
        times.append(t0 + k * dt)
        energies.append(energy(model, ModalState(0.0, q, v)))
        diss.append(total + comp)
        if keep_states:
            states.append(ModalState(t0 + k * dt, q.copy(), v.copy()))

    advance = stepper.advance
    record(0)
    k = 0
    for target in samples[1:].tolist():
        while k < target:
            d = advance(q, v)
            t = total + d
            if abs(total) >= abs(d):
                comp += (total - t) + d
            else:
                comp += (d - t) + total
            total = t
            k += 1
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
            raise StepFailureError(f"non-finite state at step {k} (t={t0 + k * dt!r})")
        record(k)
    meta = {"scheme": "implicit_midpoint", "rank_one_solve": "sherman_morrison",
            "dt": dt, "T": nsteps * dt, "steps": nsteps}
    return Trajectory(model, dt, np.asarray(times), np.asarray(energies), np.asarray(diss),
                      samples, states if keep_states else None, meta)


# -- observability ------------------------------------------------------------------

def _int_cos(w: np.ndarray, T: float) -> np.ndarray:
    """``int_0^T cos(w t) dt``."""
    return T * np.sinc(w * T / np.pi)


def _int_sin(w: np.ndarray, T: float) -> np.ndarray:
    """``int_0^T sin(w t) dt = 2 sin(wT/2)**2 / w``."""
    half = 0.5 * w * T
    return T * np.sin(half) * np.sinc(half / np.pi)


def velocity_trace_coefficients(model: ModalModel, a_coeffs, b_coeffs):
    """Undamped ``v_t(t, a) = sum A_n cos(lam_n t) + B_n sin(lam_n t)``."""
    a = _coeffs(model, a_coeffs, "a_coeffs")
    b = _coeffs(model, b_coeffs, "b_coeffs")
    ls = model.frequencies * model.trace
    return ls * b, -ls * a


def observability_lhs(model: ModalModel, a_coeffs, b_coeffs, T: float) -> float:
    """``int_0^T v_t(t, a)**2 dt`` for the undamped solution, via the exact Gram matrix."""
    A, B = velocity_trace_coefficients(model, a_coeffs, b_coeffs)
    w = model.frequencies
    dif = w[:, None] - w[None, :]
    tot = w[:, None] + w[None, :]
    cd, ct = _int_cos(dif, T), _int_cos(tot, T)
    icc = 0.5 * (cd + ct)
    iss = 0.5 * (cd - ct)
    ics = 0.5 * (_int_sin(tot, T) - _int_sin(dif, T))  # int cos(w_m t) sin(w_n t)
    return float(A @ icc @ A + 2.0 * (A @ ics @ B) + B @ iss @ B)


def observability_check(model: ModalModel, a_coeffs, b_coeffs, T_window: float = 10.0,
                        rtol: float = 1e-8) -> tuple[float, float, bool]:
    """``(lhs, rhs, ok)`` with ``rhs = sum lam**2 s**2 (a**2 + b**2)``."""
    if not T_window >= 2:
        raise InvalidInputError("T_window must be at least 2")
    a = _coeffs(model, a_coeffs, "a_coeffs")
    b = _coeffs(model, b_coeffs, "b_coeffs")
    lhs = observability_lhs(model, a, b, T_window)
    terms = (model.frequencies * model.trace) ** 2 * (a * a + b * b)
    rhs = math.fsum(terms.tolist())
    return lhs, rhs, bool(lhs >= rhs - rtol * rhs)


# -- random data and the interpolation chain ------------------------------------------

def random_initial_data(model: ModalModel, support: int, rng: SplitMix64 | int) -> tuple[np.ndarray, np.ndarray]:
    """i.i.d. uniform(-1, 1) coefficients on the first ``support`` modes, scaled to
    unit strong norm ``2 E+(0) = 1``."""
    if not 1 <= support <= model.N:
        raise InvalidInputError("support must lie in [1, N]")
    gen = rng if isinstance(rng, SplitMix64) else SplitMix64(int(rng))
    a = np.zeros(model.N)
    b = np.zeros(model.N)
    a[:support] = gen.uniform(-1.0, 1.0, support)
    b[:support] = gen.uniform(-1.0, 1.0, support)
    _, strong = norms_squared(model, a, b)
    if strong == 0:
        raise InvalidInputError("random draw has zero strong norm")
    scale = 1.0 / math.sqrt(strong)
    return a * scale, b * scale


def chain_check(model: ModalModel, a_coeffs, b_coeffs, pair: InterpolationPair, omega1,
                rtol: float = 1e-8) -> tuple[float, float, bool]:
    """``(E-, X * H^{-1}(X / D), ok)``: the weak energy dominates the interpolation bound."""
    e_minus, _ = weak_and_strong_energies(model, a_coeffs, b_coeffs, omega1)
    x2, d2 = norms_squared(model, a_coeffs, b_coeffs)
    bound = x2 * float(pair.h_inv(x2 / d2))
    return e_minus, bound, bool(e_minus >= bound * (1.0 - rtol))


# -- decay analysis ---------------------------------------------------------------------

class DecayRateEstimator(BaseEstimator):
    """Least-squares power law ``E ~ C (t + 1)**slope`` over a time window.

    Parameters
    ----------
    window : (float, float), default=(0.1, 1.0)
        Fit window as fractions of the largest time seen in ``fit``.
    """

    def __init__(self, window=(0.1, 1.0)):
        self.window = window

    def fit(self, X, y):
        t = check_array(np.asarray(X, dtype=float).reshape(-1, 1), ensure_min_samples=2)[:, 0]
        e = check_array(np.asarray(y, dtype=float).reshape(-1, 1), ensure_min_samples=2)[:, 0]
        if t.shape != e.shape:
            raise InvalidInputError("times and energies differ in length")
        lo_f, hi_f = self.window
        tmax = float(np.max(t))
        mask = (t >= lo_f * tmax) & (t <= hi_f * tmax) & (e > 0)
        if np.count_nonzero(mask) < 2:
            raise InvalidInputError("fewer than 2 positive samples inside the fit window")
        self.slope_, self.intercept_ = (float(c) for c in
                                        np.polyfit(np.log(t[mask] + 1.0), np.log(e[mask]), 1))
        self.n_fit_ = int(np.count_nonzero(mask))
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        t = np.asarray(X, dtype=float)
        return np.exp(self.intercept_) * (t + 1.0) ** self.slope_


@dataclass(frozen=True)
class DecayReport:
    """Ratios ``R(t) = E(t) / (H(1/(t+1)) ||.||_{D(A)}**2)`` and their summaries.

    ``sup_ratio`` is an empirical, truncation-dependent constant, not the
    non-constructive constant of the decay theorem.
    """

    pair_label: str
    strong_norm_sq: float
    times: tuple[float, ...]
    ratios: tuple[float, ...]
    sup_ratio: float
    sup_time: float
    final_decade_sup: float
    mid_decade_sup: float
    loglog_slope: float
    decaying: bool
    upward_trend: bool
    trend_factor: float = 1.2

    @property
    def trend_ratio(self) -> float:
        return self.final_decade_sup / self.mid_decade_sup if self.mid_decade_sup > 0 else math.inf

    def to_dict(self) -> dict:
        return {
            "sup_ratio": self.sup_ratio,
            "loglog_slope": self.loglog_slope,
            "samples": [[t, r] for t, r in zip(self.times, self.ratios)],
            "sup_time": self.sup_time,
            "final_decade_sup": self.final_decade_sup,
            "mid_decade_sup": self.mid_decade_sup,
            "trend_ratio": self.trend_ratio,
            "decaying": self.decaying,
            "upward_trend": self.upward_trend,
            "pair": self.pair_label,
            "strong_norm_sq": self.strong_norm_sq,
            "note": "sup_ratio is an empirical constant for this truncation and data, "
                    "not the theoretical decay constant",
        }


def decay_report(traj: Trajectory, pair: InterpolationPair, strong_norm_sq: float,
                 trend_factor: float = 1.2) -> DecayReport:
    """Compare sampled energies with the decay envelope ``H(1/(t+1))``.

    Raises :class:`DomainError` listing the first sample time whose argument
    falls outside the domain of ``H``.
    """
    if not strong_norm_sq > 0:
        raise InvalidInputError("strong norm must be positive")
    t = np.asarray(traj.times, dtype=float)
    e = np.asarray(traj.energies, dtype=float)
    x = 1.0 / (t + 1.0)
    lo, hi = pair.h_domain
    bad = (x <= lo) | (x >= hi)
    if np.any(bad):
        raise DomainError(f"H(1/(t+1)) undefined at t={t[bad][0]!r} (H domain ({lo}, {hi}))")
    ratios = e / (np.asarray(pair.h(x), dtype=float) * strong_norm_sq)
    k = int(np.argmax(ratios))
    T = float(t[-1])
    final = (t >= T / 10) & (t <= T)
    mid = (t >= T / 100) & (t < T / 10)
    fsup = float(np.max(ratios[final])) if np.any(final) else math.nan
    msup = float(np.max(ratios[mid])) if np.any(mid) else math.nan
    try:
        slope = DecayRateEstimator().fit(t, e).slope_
    except InvalidInputError:
        slope = math.nan
    upward = bool(not (fsup <= trend_factor * msup))
    decaying = bool(e[-1] < (1.0 - 1e-6) * e[0])
    return DecayReport(pair.label, float(strong_norm_sq), tuple(t.tolist()), tuple(ratios.tolist()),
                       float(ratios[k]), float(t[k]), fsup, msup, float(slope), decaying, upward,
                       trend_factor)
