"""Command-line front end.

Exit codes: 0 success, 1 a check failed (negative residual, non-decay, ...),
2 usage, input or file error.  Only flags are consulted, never the environment.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dioph import (
    HALF_INTEGER_MODE,
    INTEGER_MODE,
    bounded_quotients,
    continued_fraction,
    liouville_constant,
    parse_location,
    sine_sequence,
)
from .exceptions import (
    DomainError,
    HolderDecayError,
    InvalidInputError,
    RationalLocationError,
    UnsupportedError,
)
from .fileio import (
    read_json,
    read_sequence_csv,
    read_trajectory_csv,
    write_json,
    write_sequence_csv,
    write_trajectory_csv,
)
from .interp import (
    InterpolationPair,
    exp_square_pair,
    holder_check,
    identity_optimal_pair,
    jensen_upper_check,
    log_ratio,
    optimal_pair,
    power_interpolant,
    power_pair,
    power_decay_pair,
    shifted_power_pair,
)
from .weights import EnvelopeResult, WeightProfile, lower_convex_envelope
from .wavesim import (
    KINDS,
    Trajectory,
    assemble_model,
    decay_report,
    norms_squared,
    observability_check,
    project_initial_data,
    random_initial_data,
    simulate,
)

DEFAULT_MODES = 64
DEFAULT_DT = 1e-4
DEFAULT_T = 200.0
DEFAULT_GRID = 512
DEFAULT_ENVELOPE_POINTS = 4096
HOLDER_TOL = 1e-9
JENSEN_TOL = 1e-12


class CheckFailure(Exception):
    """A verification ran but its check did not hold."""


@dataclass
class RunConfig:
    """Everything that determines a run; echoed into every output file."""

    subcommand: str
    model: str | None = None
    a: str | None = None
    modes: int = DEFAULT_MODES
    dt: float = DEFAULT_DT
    T: float = DEFAULT_T
    seed: int = 42
    grid: int = DEFAULT_GRID
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.modes < 1:
            raise InvalidInputError("--modes must be at least 1")
        if not self.dt > 0 or not self.T >= 0:
            raise InvalidInputError("--dt must be positive and --T nonnegative")
        if self.grid < 3:
            raise InvalidInputError("--grid must be at least 3")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["version"] = __version__
        return d


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse number list {text!r}") from exc


def parse_weight(spec: str):
    """``exp_decay:A=1``, ``power_decay:c=1,r=2``, ``power_growth:alpha=0,p=2`` or
    ``envelope:PATH`` (an envelope JSON file)."""
    family, _, rest = spec.partition(":")
    if family == "envelope":
        return EnvelopeResult.from_dict(read_json(rest))
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, value = item.partition("=")
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise InvalidInputError(f"bad weight parameter {item!r}") from exc
    try:
        if family == "exp_decay":
            return WeightProfile.exp_decay(params["A"])
        if family == "power_decay":
            return WeightProfile.power_decay(params["c"], params["r"])
        if family == "power_growth":
            return WeightProfile.power_growth(params.get("alpha", 0.0), params["p"])
    except KeyError as exc:
        raise InvalidInputError(f"weight {spec!r} is missing parameter {exc}") from exc
    raise InvalidInputError(f"unknown weight family in {spec!r}")


def _emit(obj, out: str | None):
    if out:
        write_json(out, obj)
    else:
        from .fileio import dumps_json
        sys.stdout.write(dumps_json(obj))


# -- subcommands ---------------------------------------------------------------------

def cmd_envelope(args, cfg: RunConfig):
    if args.input:
        points = read_sequence_csv(args.input)
        source = {"input": args.input}
    else:
        if not args.a:
            raise InvalidInputError("envelope needs --input or --a")
        seq = sine_sequence(args.a, args.modes, args.shift)
        points = seq.rows()
        source = {"a": args.a, "points": args.modes, "shift": args.shift}
    env = lower_convex_envelope(points)
    _emit({**env.to_dict(), "source": source, "config": cfg.to_dict()}, args.out)
    return 0


def build_pair_from_args(args) -> InterpolationPair:
    kind = args.kind
    if kind == "power":
        return power_pair(args.C1, args.e1, args.C2, args.e2)
    if kind == "power_decay":
        return power_decay_pair(args.c, args.nu)
    if kind == "shifted_power":
        if not args.w1:
            raise InvalidInputError("shifted_power needs --w1")
        return shifted_power_pair(parse_weight(args.w1), args.p, args.alpha)
    if kind in ("optimal", "identity_optimal"):
        if not (args.w1 and args.w2):
            raise InvalidInputError(f"{kind} needs --w1 and --w2")
        w1, w2 = parse_weight(args.w1), parse_weight(args.w2)
        return optimal_pair(w1, w2, args.p) if kind == "optimal" else identity_optimal_pair(w1, w2)
    if kind == "exp_square":
        return exp_square_pair(args.A)
    raise InvalidInputError(f"unknown pair kind {kind!r}")


def cmd_pair(args, cfg: RunConfig):
    pair = build_pair_from_args(args)
    _emit({**pair.to_dict(), "config": cfg.to_dict()}, args.out)
    return 0


def _load_pair(path: str) -> InterpolationPair:
    return InterpolationPair.from_dict(read_json(path))


def cmd_hfun(args, cfg: RunConfig):
    pair = _load_pair(args.pair)
    t = np.asarray(_floats(args.t))
    values = pair.h_inv(t) if args.inverse else pair.h(t)
    name = "H_inv" if args.inverse else "H"
    _emit({"t": t.tolist(), name: np.atleast_1d(values).tolist()}, args.out)
    return 0


def cmd_verify_holder(args, cfg: RunConfig):
    pair = _load_pair(args.pair)
    w1, w2 = parse_weight(args.w1), parse_weight(args.w2)
    f = _floats(args.f)
    x = _floats(args.points)
    mu = _floats(args.mu) if args.mu else [1.0] * len(f)
    residual = holder_check(f, mu, w1(np.asarray(x)), w2(np.asarray(x)), args.p, pair)
    ok = residual >= -HOLDER_TOL
    _emit({"residual": residual, "ok": ok, "tolerance": HOLDER_TOL}, args.out)
    if not ok:
        raise CheckFailure(f"holder residual {residual!r} below -{HOLDER_TOL}")
    return 0


def _named_concave(spec: str):
    name, _, rest = spec.partition(":")
    if name == "sqrt":
        return power_interpolant(1.0, 0.5)
    if name == "identity":
        return power_interpolant(1.0, 1.0)
    if name == "power":
        C, e = _floats(rest)
        return power_interpolant(C, e)
    if name == "log_ratio":
        return log_ratio(float(rest))
    raise InvalidInputError(f"unknown concave function {spec!r}")


def cmd_verify_jensen(args, cfg: RunConfig):
    phi = _named_concave(args.phi)
    residual = jensen_upper_check(phi, _floats(args.masses), _floats(args.values))
    ok = residual >= -JENSEN_TOL
    _emit({"residual": residual, "ok": ok, "tolerance": JENSEN_TOL}, args.out)
    if not ok:
        raise CheckFailure(f"jensen residual {residual!r} below -{JENSEN_TOL}")
    return 0


def dioph_summary(a: str, terms: int, horizon: int, modes: int, d: float, shift: str) -> dict:
    loc = parse_location(a)
    cf = continued_fraction(loc, terms)
    out = {"a": loc.to_dict(), "continued_fraction": cf.to_dict()}
    if cf.terminated:
        out["rational"] = True
        return out
    out["rational"] = False
    try:
        out["bounded_quotients"] = bounded_quotients(cf, horizon).to_dict()
    except InvalidInputError as exc:
        out["bounded_quotients"] = {"error": str(exc)}
    c_est, argmin = liouville_constant(loc, modes, d, shift)
    out["liouville"] = {"c_est": c_est, "argmin_n": argmin, "d": d, "N": modes, "shift": shift,
                        "note": "empirical minimum over n <= N, not the true infimum"}
    return out


def cmd_dioph(args, cfg: RunConfig):
    out = dioph_summary(args.a, args.terms, args.horizon, args.modes, args.d, args.shift)
    out["config"] = cfg.to_dict()
    if args.sequence_out:
        seq = sine_sequence(args.a, args.modes, args.shift)
        write_sequence_csv(args.sequence_out, seq.rows(),
                           {"a": args.a, "shift": args.shift, "accuracy_bound": seq.accuracy_bound})
    _emit(out, args.out)
    return 0


def _initial_data(model, args):
    if args.init_mode is not None:
        idx = np.nonzero(model.modes == args.init_mode)[0]
        if idx.size == 0:
            raise InvalidInputError(f"mode {args.init_mode} is not among the model's modes")
        a = np.zeros(model.N)
        a[idx[0]] = 1.0
        return a, np.zeros(model.N)
    support = args.support if args.support is not None else max(1, model.N // 2)
    return random_initial_data(model, support, args.seed)


def _traj_meta(cfg: RunConfig, model, x2, d2, extra=None) -> dict:
    meta = {"kind": model.kind, "a": cfg.a, "modes": model.N, "dt": cfg.dt, "T": cfg.T,
            "seed": cfg.seed, "grid": cfg.grid, "x_norm_sq": format(x2, ".17g"),
            "strong_norm_sq": format(d2, ".17g"), "scheme": "implicit_midpoint"}
    meta.update(extra or {})
    return meta


def run_simulation(cfg: RunConfig, args):
    if cfg.dt * 10 > cfg.T:
        raise InvalidInputError("simulation needs dt * 10 <= T")
    model = assemble_model(cfg.model, cfg.a, cfg.modes)
    a, b = _initial_data(model, args)
    x2, d2 = norms_squared(model, a, b)
    traj = simulate(model, project_initial_data(model, a, b), cfg.dt, cfg.T,
                    sample_stride=args.stride)
    init = f"mode {args.init_mode}" if args.init_mode is not None else \
        f"random support={args.support if args.support is not None else max(1, model.N // 2)}"
    return model, traj, x2, d2, _traj_meta(cfg, model, x2, d2, {"init": init, "stride": args.stride})


def cmd_simulate(args, cfg: RunConfig):
    _, traj, _, _, meta = run_simulation(cfg, args)
    write_trajectory_csv(args.out, traj.times, traj.energies, traj.dissipation, meta)
    return 0


def cmd_observability(args, cfg: RunConfig):
    model = assemble_model(cfg.model, cfg.a, cfg.modes)
    support = args.support if args.support is not None else max(1, model.N // 2)
    from .rng import SplitMix64
    gen = SplitMix64(cfg.seed)
    results = []
    for _ in range(args.draws):
        a, b = random_initial_data(model, support, gen)
        lhs, rhs, ok = observability_check(model, a, b, args.window)
        results.append({"lhs": lhs, "rhs": rhs, "ok": ok})
    all_ok = all(r["ok"] for r in results)
    worst = min(r["lhs"] / r["rhs"] for r in results if r["rhs"] > 0) if results else math.nan
    _emit({"all_ok": all_ok, "min_lhs_over_rhs": worst, "draws": results, "config": cfg.to_dict()},
          args.out)
    if not all_ok:
        raise CheckFailure("observability inequality failed for at least one draw")
    return 0


def default_pair(kind: str, a: str, envelope: EnvelopeResult | None):
    """Pair used for decay reports: the power pair ``H(t) = 4t`` when the Dirichlet
    location looks bounded-type, otherwise the envelope-based pair."""
    if kind == "dirichlet":
        cf = continued_fraction(a, 64)
        if not cf.terminated:
            try:
                if bounded_quotients(cf, min(20, len(cf.quotients))).bounded:
                    return power_decay_pair(1.0, 0.0)
            except InvalidInputError:
                pass
    if envelope is None:
        raise InvalidInputError("an envelope is needed for this model/location")
    if kind == "beam":
        return shifted_power_pair(envelope, 4.0, 0.0)
    if kind == "mixed":
        return shifted_power_pair(envelope, 2.0, 0.5)
    return shifted_power_pair(envelope, 2.0, 0.0)


def cmd_decay(args, cfg: RunConfig):
    meta, t, e, d = read_trajectory_csv(args.traj)
    try:
        strong = float(meta["strong_norm_sq"])
    except (KeyError, ValueError) as exc:
        raise InvalidInputError("trajectory file lacks strong_norm_sq metadata") from exc
    if args.pair:
        pair = _load_pair(args.pair)
    else:
        pair = power_decay_pair(1.0, 0.0)
    traj = Trajectory(None, float(meta.get("dt", "nan")), t, e, d, np.arange(len(t)))
    report = decay_report(traj, pair, strong)
    out = report.to_dict()
    out["config"] = cfg.to_dict()
    out["trajectory"] = args.traj
    _emit(out, args.out)
    if not report.decaying:
        raise CheckFailure("energy does not decay (non-decay flag set)")
    return 0


def cmd_pipeline(args, cfg: RunConfig):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    shift = HALF_INTEGER_MODE if cfg.model == "mixed" else INTEGER_MODE
    summary = dioph_summary(cfg.a, 64, 20, min(cfg.modes, 10_000), 2.0, shift)
    if summary["rational"]:
        env = None
    else:
        seq = sine_sequence(cfg.a, args.envelope_points, shift)
        env = lower_convex_envelope(seq.rows())
        write_json(outdir / "env.json", {**env.to_dict(), "config": cfg.to_dict(),
                                          "source": {"a": cfg.a, "points": args.envelope_points,
                                                     "shift": shift}})
    pair = default_pair(cfg.model, cfg.a, env)
    write_json(outdir / "pair.json", {**pair.to_dict(), "config": cfg.to_dict()})
    model, traj, x2, d2, meta = run_simulation(cfg, args)
    write_trajectory_csv(outdir / "traj.csv", traj.times, traj.energies, traj.dissipation, meta)
    report = decay_report(traj, pair, d2)
    out = report.to_dict()
    out["dioph"] = summary
    out["identity_defect"] = traj.identity_defect()
    out["config"] = cfg.to_dict()
    write_json(outdir / "report.json", out)
    if not report.decaying:
        raise CheckFailure("energy does not decay (non-decay flag set)")
    return 0


# -- parser ----------------------------------------------------------------------------

def _add_model_args(p):
    p.add_argument("--model", choices=KINDS, default="dirichlet",
                   help="damped equation: dirichlet (default), mixed or beam")
    p.add_argument("--a", required=True, help="damper location: decimal, p/q, golden or sqrt2m1")
    p.add_argument("--modes", type=int, default=DEFAULT_MODES, help="retained modes N (default 64)")
    p.add_argument("--seed", type=int, default=42, help="SplitMix64 seed for random data (default 42)")
    p.add_argument("--support", type=int, default=None,
                   help="random data lives on the first SUPPORT modes (default N/2)")


def _add_sim_args(p):
    p.add_argument("--dt", type=float, default=DEFAULT_DT, help="time step (default 1e-4)")
    p.add_argument("--T", type=float, default=DEFAULT_T, help="final time (default 200)")
    p.add_argument("--stride", type=int, default=1000, help="sample every STRIDE steps (default 1000)")
    p.add_argument("--init-mode", type=int, default=None,
                   help="use unit data a_n = 1 on this single mode instead of random data")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holderdecay",
                                     description="Interpolation pairs, decay functions and "
                                                 "pointwise-damped wave simulations.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--grid", type=int, default=DEFAULT_GRID,
                        help="sample count for grid-based checks (default 512)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("envelope", help="lower convex envelope of a positive sequence")
    p.add_argument("--input", help="CSV with header n,value")
    p.add_argument("--a", help="build the sequence sin^2(n pi a) instead of reading a file")
    p.add_argument("--modes", type=int, default=DEFAULT_ENVELOPE_POINTS,
                   help="sequence length when --a is given (default 4096)")
    p.add_argument("--shift", choices=(INTEGER_MODE, HALF_INTEGER_MODE), default=INTEGER_MODE,
                   help="sin^2(n pi a) (integer) or sin^2((n+1/2) pi a) (half_integer)")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("pair", help="build an interpolation pair and write it as JSON")
    p.add_argument("--kind", required=True,
                   choices=("power", "power_decay", "shifted_power", "optimal", "identity_optimal",
                            "exp_square"),
                   help="pair family to build")
    p.add_argument("--C1", type=float, default=2.0, help="power pair: Phi = C1 t**e1 (default 2)")
    p.add_argument("--e1", type=float, default=0.5, help="power pair exponent of Phi (default 0.5)")
    p.add_argument("--C2", type=float, default=1.0, help="power pair: Psi = C2 t**e2 (default 1)")
    p.add_argument("--e2", type=float, default=0.5, help="power pair exponent of Psi (default 0.5)")
    p.add_argument("--c", type=float, default=1.0, help="constant c of w1 = c^2 / t^(2(1+nu))")
    p.add_argument("--nu", type=float, default=0.0, help="exponent nu for --kind power_decay (default 0)")
    p.add_argument("--w1", help="decreasing weight, e.g. power_decay:c=1,r=2 or envelope:env.json")
    p.add_argument("--w2", help="increasing weight, e.g. power_growth:alpha=0,p=2")
    p.add_argument("--p", type=float, default=2.0, help="exponent p of phi(t) = w1(t)/t**p (default 2)")
    p.add_argument("--alpha", type=float, default=0.0,
                   help="shift of w2 = (t + alpha)**p for shifted_power (default 0)")
    p.add_argument("--A", type=float, default=1.0, help="rate A of exp_square (default 1)")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("hfun", help="evaluate H or its inverse for a stored pair")
    p.add_argument("--pair", required=True, help="pair JSON written by the pair subcommand")
    p.add_argument("--t", required=True, help="comma-separated arguments")
    p.add_argument("--inverse", action="store_true", help="evaluate H^-1 instead of H")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("verify-holder", help="residual of the generalized Holder inequality")
    p.add_argument("--pair", required=True, help="pair JSON written by the pair subcommand")
    p.add_argument("--w1", required=True, help="decreasing weight spec")
    p.add_argument("--w2", required=True, help="increasing weight spec")
    p.add_argument("--f", required=True, help="comma-separated function values")
    p.add_argument("--points", required=True, help="comma-separated sample points x_i")
    p.add_argument("--mu", help="comma-separated masses (default all 1)")
    p.add_argument("--p", type=float, default=1.0, help="averages use |f|**p (default 1)")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("verify-jensen", help="residual of the inverse Jensen inequality")
    p.add_argument("--phi", default="sqrt", help="sqrt, identity, power:C,e or log_ratio:A")
    p.add_argument("--masses", required=True, help="comma-separated probability weights")
    p.add_argument("--values", required=True, help="comma-separated points in phi's domain")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("dioph", help="continued fraction, bounded quotients, Liouville constant")
    p.add_argument("--a", required=True, help="location: decimal, p/q, golden or sqrt2m1")
    p.add_argument("--terms", type=int, default=64, help="continued-fraction terms (default 64)")
    p.add_argument("--horizon", type=int, default=20,
                   help="quotients inspected by the boundedness estimate (default 20)")
    p.add_argument("--modes", type=int, default=1000, help="N for the Liouville scan")
    p.add_argument("--d", type=float, default=2.0, help="Liouville exponent d >= 2 (default 2)")
    p.add_argument("--shift", choices=(INTEGER_MODE, HALF_INTEGER_MODE), default=INTEGER_MODE,
                   help="integer or half_integer sine sequence")
    p.add_argument("--sequence-out", help="also write sin^2 values as CSV n,value")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("simulate", help="simulate a damped model and write a trajectory CSV")
    _add_model_args(p)
    _add_sim_args(p)
    p.add_argument("--out", required=True, help="trajectory CSV path")

    p = sub.add_parser("observability", help="observability inequality on random data")
    _add_model_args(p)
    p.add_argument("--draws", type=int, default=100, help="random data draws (default 100)")
    p.add_argument("--window", type=float, default=10.0, help="time window T (default 10)")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("decay", help="decay report for a trajectory CSV")
    p.add_argument("--traj", required=True, help="trajectory CSV written by simulate")
    p.add_argument("--pair", help="pair JSON (default: the power pair H(t) = 4t)")
    p.add_argument("--out", help="output JSON (default stdout)")

    p = sub.add_parser("pipeline", help="dioph -> envelope -> pair -> simulate -> decay")
    _add_model_args(p)
    _add_sim_args(p)
    p.add_argument("--envelope-points", type=int, default=DEFAULT_ENVELOPE_POINTS,
                   help="sequence length for the envelope (default 4096)")
    p.add_argument("--outdir", default=".", help="directory for env/pair/traj/report files")
    return parser


COMMANDS = {
    "envelope": cmd_envelope,
    "pair": cmd_pair,
    "hfun": cmd_hfun,
    "verify-holder": cmd_verify_holder,
    "verify-jensen": cmd_verify_jensen,
    "dioph": cmd_dioph,
    "simulate": cmd_simulate,
    "observability": cmd_observability,
    "decay": cmd_decay,
    "pipeline": cmd_pipeline,
}

INPUT_ERRORS = (OSError, InvalidInputError, DomainError, UnsupportedError, RationalLocationError)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    cfg = RunConfig(args.command, model=getattr(args, "model", None), a=getattr(args, "a", None),
                    modes=getattr(args, "modes", DEFAULT_MODES), dt=getattr(args, "dt", DEFAULT_DT),
                    T=getattr(args, "T", DEFAULT_T), seed=getattr(args, "seed", 42), grid=args.grid)
    try:
        cfg.validate()
        return COMMANDS[args.command](args, cfg)
    except CheckFailure as exc:
        print(f"holderdecay: check failed: {exc}", file=sys.stderr)
        return 1
    except INPUT_ERRORS as exc:
        print(f"holderdecay: error: {exc}", file=sys.stderr)
        return 2
    except HolderDecayError as exc:
        print(f"holderdecay: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
