"""Command-line front end.

Every subcommand prints JSON on stdout (``--human`` for a readable form).
Errors go to stderr as a single line ``error: <Kind>: <message>`` with exit
status 2. ``check-equiv`` exits 0 when equivalent and 1 when not.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .compose import compose
from .equivalence import (
    BudgetExhausted,
    dbisim_witness,
    distance,
    equivalence_metric,
    state_bisim_partition,
)
from .errors import LmpError, ParseError
from .kernels import HeaterParams, cantor_interval, cantor_set_approx, make_cantor, make_ex1, make_heater
from .logic import (
    eval_formula,
    eval_qformula,
    eval_state_formula,
    find_distinguishing_formula,
    parse_formula,
    parse_qformula,
    parse_state_formula,
)
from .model import FiniteLmp, SubDist, dirac, dumps_model, load_model, parse_rational, save_model


def _num(x):
    return str(x) if isinstance(x, Fraction) else float(x)


def parse_spec(lmp: FiniteLmp, spec: str) -> SubDist:
    """``dirac:NAME``, ``initial`` or an inline JSON vector."""
    spec = spec.strip()
    if spec == "initial":
        return lmp.initial
    if spec.startswith("dirac:"):
        return dirac(lmp, spec[len("dirac:"):])
    try:
        values = json.loads(spec)
    except json.JSONDecodeError:
        raise ParseError(f"bad subdistribution spec {spec!r}; use dirac:NAME, initial or a JSON list") from None
    if not isinstance(values, list):
        raise ParseError("inline subdistribution must be a JSON list")
    if lmp.exact:
        mu = SubDist(tuple(parse_rational(v) if not isinstance(v, float) else Fraction(repr(v)) for v in values))
    else:
        mu = SubDist(tuple(float(v) for v in values))
    return lmp.check_dist(mu)


def _number(text: str):
    """Parse a CLI number exactly (``0.9`` -> 9/10); the model decides float vs exact."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a number: {text!r}") from None


def _emit(args, payload: dict, human: str | None = None):
    if getattr(args, "human", False) and human is not None:
        print(human)
    else:
        print(json.dumps(payload))


def cmd_check_equiv(args) -> int:
    lmp = load_model(args.model)
    mu, nu = parse_spec(lmp, args.mu), parse_spec(lmp, args.nu)
    w = dbisim_witness(lmp, mu, nu)
    if w is None:
        _emit(args, {"equivalent": True}, "equivalent")
        return 0
    phi = find_distinguishing_formula(lmp, mu, nu)
    _emit(args, {"equivalent": False, "witness": list(w), "formula": str(phi)},
          f"not equivalent\nwitness word: {' '.join(w) or '(empty)'}\ndistinguishing formula: {phi}")
    return 1


def _bounds_payload(b):
    return b.to_json()


def _human_bounds(b):
    return (f"lower   {b.lower}\nupper   {b.upper}\nwitness {' '.join(b.witness) or '(empty)'}\n"
            f"horizon {b.horizon_used}")


def cmd_distance(args) -> int:
    lmp = load_model(args.model)
    mu, nu = parse_spec(lmp, args.mu), parse_spec(lmp, args.nu)
    c = _number(args.c)
    tol = _number(args.tol) if args.tol is not None else None
    try:
        b = distance(lmp, mu, nu, c if lmp.exact else float(c), tol, args.horizon)
    except BudgetExhausted as exc:
        b = exc.bounds
        payload = dict(_bounds_payload(b), exhausted=True)
        _emit(args, payload, _human_bounds(b) + "\n(budget exhausted)")
        return 0
    _emit(args, _bounds_payload(b), _human_bounds(b))
    return 0


def cmd_equiv_metric(args) -> int:
    m1, m2 = load_model(args.model1), load_model(args.model2)
    tol = _number(args.tol) if args.tol is not None else None
    b = equivalence_metric(m1, m2, tol, args.horizon)
    _emit(args, _bounds_payload(b), _human_bounds(b))
    return 0


def cmd_mc(args) -> int:
    lmp = load_model(args.model)
    if args.logic == "state":
        phi = parse_state_formula(args.formula)
        if not args.dist.startswith("dirac:"):
            raise ParseError("the state logic is checked at a state; use --dist dirac:NAME")
        res = eval_state_formula(lmp, args.dist[len("dirac:"):], phi)
        _emit(args, {"formula": str(phi), "holds": res}, str(res).lower())
        return 0
    mu = parse_spec(lmp, args.dist)
    if args.logic == "quant":
        phi = parse_qformula(args.formula)
        c = _number(args.c)
        val = eval_qformula(lmp, mu, phi, c if lmp.exact else float(c))
        _emit(args, {"formula": str(phi), "value": _num(val)}, str(val))
        return 0
    phi = parse_formula(args.formula)
    res = eval_formula(lmp, mu, phi)
    _emit(args, {"formula": str(phi), "holds": res}, str(res).lower())
    return 0


def cmd_compose(args) -> int:
    prod = compose(load_model(args.model1), load_model(args.model2))
    if args.output:
        save_model(prod, args.output)
        _emit(args, {"states": prod.n, "output": args.output}, f"wrote {prod.n} states to {args.output}")
    else:
        print(dumps_model(prod))
    return 0


def cmd_refine(args) -> int:
    part = state_bisim_partition(load_model(args.model))
    _emit(args, {"blocks": part.to_json()}, "\n".join("{" + ", ".join(b) + "}" for b in part.blocks))
    return 0


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",")] if text else []


def cmd_gen(args) -> int:
    if args.family == "ex1":
        lmp = make_ex1(args.cells, initial=args.initial or "0")
    elif args.family == "cantor":
        lmp = make_cantor(args.depth, args.max_action)
        init = args.initial or "x0"
        if init.startswith("interval:"):
            lmp = lmp.with_initial(cantor_interval(lmp, int(init.split(":", 1)[1])))
        elif init.startswith("set:"):
            lmp = lmp.with_initial(cantor_set_approx(lmp, int(init.split(":", 1)[1])))
        else:
            lmp = lmp.with_initial(dirac(lmp, init))
    else:
        k = args.rooms
        a = _floats(args.a) if args.a else [0.0] * (k * k)
        lo, hi, cells = args.grid.split(",")
        p = HeaterParams(
            n_rooms=k,
            x0=args.x0,
            b=_floats(args.b) if args.b else [0.1] * k,
            a=[a[i * k:(i + 1) * k] for i in range(k)],
            c_heat=_floats(args.c_heat) if args.c_heat else [2.0] * k,
            noise_sd=_floats(args.noise_sd) if args.noise_sd else [0.5] * k,
            temp_grid=(float(lo), float(hi), int(cells)),
            seed=args.seed,
            initial_temps=_floats(args.initial_temps) if args.initial_temps else None,
        )
        lmp = make_heater(p)
    if args.output:
        save_model(lmp, args.output)
        _emit(args, {"states": lmp.n, "output": args.output}, f"wrote {lmp.n} states to {args.output}")
    else:
        print(dumps_model(lmp))
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    rows = run_selftest()
    ok = all(r["passed"] for r in rows)
    if args.human:
        width = max(len(r["name"]) for r in rows)
        for r in rows:
            print(f"{r['name']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}  {r['detail']}")
    else:
        print(json.dumps({"passed": ok, "checks": rows}))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmpbisim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--human", action="store_true", help="human-readable output instead of JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-equiv", parents=[common], help="decide subdistribution bisimilarity exactly")
    p.add_argument("model")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.set_defaults(func=cmd_check_equiv)

    p = sub.add_parser("distance", parents=[common], help="bounds on the discounted trace distance")
    p.add_argument("model")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--c", required=True, help="discount in (0, 1]")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--tol")
    g.add_argument("--horizon", type=int)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("equiv-metric", parents=[common], help="bounds on the equivalence metric of two models")
    p.add_argument("model1")
    p.add_argument("model2")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--tol")
    g.add_argument("--horizon", type=int)
    p.set_defaults(func=cmd_equiv_metric)

    p = sub.add_parser("mc", parents=[common], help="model check a formula")
    p.add_argument("model")
    p.add_argument("--dist", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--logic", choices=("l0", "state", "quant"), default="l0")
    p.add_argument("--c", default="1")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("compose", parents=[common], help="synchronous product of two models")
    p.add_argument("model1")
    p.add_argument("model2")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("refine", parents=[common], help="state-bisimulation partition")
    p.add_argument("model")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("gen", parents=[common], help="generate a discretised example model")
    p.add_argument("family", choices=("ex1", "cantor", "heater"))
    p.add_argument("-o", "--output")
    p.add_argument("--initial", help="ex1: 0|1; cantor: x0|interval:N|set:N")
    p.add_argument("--cells", type=int, default=64, help="ex1 grid cells")
    p.add_argument("--depth", type=int, default=6, help="cantor triadic depth")
    p.add_argument("--max-action", type=int, default=3, help="cantor largest action index")
    p.add_argument("--rooms", type=int, default=1)
    p.add_argument("--x0", type=float, default=10.0, help="ambient temperature")
    p.add_argument("--b", help="comma-separated per-room outside transfer rates")
    p.add_argument("--a", help="comma-separated row-major room-to-room rates")
    p.add_argument("--c-heat", help="comma-separated heater gains")
    p.add_argument("--noise-sd", help="comma-separated noise standard deviations")
    p.add_argument("--grid", default="10,30,20", help="lo,hi,cells")
    p.add_argument("--initial-temps", help="comma-separated starting temperatures")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", parents=[common], help="rerun the reference examples")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except LmpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
