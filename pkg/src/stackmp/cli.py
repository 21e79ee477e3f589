"""Command-line front end.

Exit codes: 0 success, 1 domain error (bad input, failed parse, unknown
vertex), 2 resource guard tripped.  Every command accepts --json; report
commands can also write delimited CSV and matplotlib figures next to it.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .model import (
    CertificateError,
    GameFormatError,
    Guards,
    MealyStrategy,
    ModelError,
    ResourceGuardError,
    emit_game,
    format_rational,
    parse_game,
    parse_rational,
)
from .graphs import build_extended_game
from .badness import SYMBOLIC, BadnessQuery, is_bad_vertex, lambda_region
from .zerosum import zs_robustness_check, zs_value
from . import solver
from .fixtures import FIXTURE_ALIASES, FIXTURE_NAMES, build_fixture


def _load_game(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_game(handle.read())


def _load_strategy(path: str, arena):
    with open(path, "r", encoding="utf-8") as handle:
        return MealyStrategy.from_json(json.load(handle), arena)


def _guards(args) -> Guards:
    return Guards(
        max_cycles=args.max_cycles,
        max_extended_vertices=args.max_ext_vertices,
        max_memoryless=args.max_strategies,
    )


def _emit(args, payload: dict, text_lines):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def cmd_solve(args):
    arena = _load_game(args.game)
    if args.closed:
        result = solver.asv(arena, args.vertex, _guards(args))
        label = "ASV"
    else:
        result = solver.asv_epsilon(arena, args.vertex, parse_rational(args.eps), _guards(args))
        label = f"ASV^{args.eps}"
    _emit(
        args,
        result.to_json(),
        [
            f"{label}({args.vertex}) = {format_rational(result.value)}"
            f" ({'attained' if result.attained else 'not attained'})",
            f"achieving SCC: {result.achieving_scc}",
        ],
    )


def cmd_threshold(args):
    arena = _load_game(args.game)
    c = parse_rational(args.c)
    if args.closed:
        decision, cert = solver.threshold(arena, args.vertex, c, Fraction(0), False, _guards(args))
    else:
        decision, cert = solver.threshold(arena, args.vertex, c, parse_rational(args.eps), True, _guards(args))
    payload = {"decision": decision, "certificate": cert.to_json() if cert else None}
    lines = ["yes" if decision else "no"]
    if cert:
        lines.append(json.dumps(cert.to_json()))
    _emit(args, payload, lines)
    if cert and args.cert_out:
        with open(args.cert_out, "w", encoding="utf-8") as handle:
            json.dump(cert.to_json(), handle, indent=2)


def cmd_witness(args):
    arena = _load_game(args.game)
    c = parse_rational(args.c)
    eps = parse_rational(args.eps)
    decision, cert = solver.threshold(arena, args.vertex, c, eps, True, _guards(args))
    if not decision:
        raise ModelError(f"ASV^{args.eps}({args.vertex}) > {args.c} does not hold; no witness")
    witness = solver.build_regular_witness(cert, parse_rational(args.target))
    payload = {"certificate": cert.to_json(), "witness": witness.to_json()}
    lasso = witness.lasso
    _emit(
        args,
        payload,
        [
            f"prefix: {' '.join(lasso.prefix) or '(empty)'}",
            f"cycle:  {' '.join(lasso.cycle)}",
            f"payoffs: ({format_rational(lasso.payoff0)}, {format_rational(lasso.payoff1)})",
            f"k = {format_rational(witness.k) if witness.k is not None else '-'}   "
            f"tau = {format_rational(witness.tau) if witness.tau is not None else '-'}",
        ],
    )


def cmd_maxeps(args):
    arena = _load_game(args.game)
    c = parse_rational(args.c)
    result = solver.max_epsilon(arena, args.vertex, c, _guards(args))
    payload = result.to_json()
    if args.check:
        cross = solver.max_epsilon_bisect(arena, args.vertex, c, _guards(args))
        payload["bisect"] = cross.to_json()
        if (cross.sup, cross.attained) != (result.sup, result.attained):
            raise CertificateError("max-epsilon routes disagree; solver bug")
    _emit(
        args,
        payload,
        [f"sup eps = {format_rational(result.sup)} ({'attained' if result.attained else 'not attained'})"],
    )


def cmd_mlsolve(args):
    arena = _load_game(args.game)
    eps = Fraction(0) if args.closed else parse_rational(args.eps)
    value, sigma = solver.asv_ml_detailed(arena, args.vertex, eps, _guards(args))
    payload = {"value": format_rational(value), "strategy": sigma.to_json()}
    _emit(args, payload, [f"ASV_ML = {format_rational(value)}", json.dumps(sigma.to_json())])


def cmd_eval(args):
    arena = _load_game(args.game)
    sigma = _load_strategy(args.strategy, arena)
    eps = Fraction(0) if args.closed else parse_rational(args.eps)
    result = solver.strategy_value(arena, sigma, args.vertex, eps, _guards(args))
    _emit(
        args,
        result.to_json(),
        [
            f"value = {format_rational(result.inf_mp0)} ({'attained' if result.attained else 'not attained'})",
            f"best follower payoff d* = {format_rational(result.d_star)}",
        ],
    )


def cmd_robust(args):
    arena = _load_game(args.game)
    sigma = _load_strategy(args.strategy, arena)
    report = solver.robustness_harness(
        arena,
        sigma,
        args.vertex,
        parse_rational(args.eps),
        parse_rational(args.delta),
        args.samples,
        args.seed,
        args.granularity,
        _guards(args),
    )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write(report.to_csv())
    if args.plot:
        from .plots import render_margins

        render_margins(args.plot, report.rows)
    payload = report.to_json()
    _emit(
        args,
        payload,
        [
            f"violations: {report.violations}",
            *(f"min margin [{k}]: {v}" for k, v in payload["min_margins"].items()),
        ],
    )


def cmd_zerosum(args):
    arena = _load_game(args.game)
    table = zs_value(arena, 0, _guards(args))
    payload = {
        "values": {v: format_rational(x) for v, x in table.value.items()},
        "optimal0": table.optimal0.to_json(),
        "optimal1": table.optimal1.to_json(),
    }
    lines = [f"value({v}) = {format_rational(table.value[v])}" for v in arena.vertices]
    if args.vertex:
        lines = [f"value({args.vertex}) = {format_rational(table.value[args.vertex])}"]
    _emit(args, payload, lines)


def cmd_zscheck(args):
    arena = _load_game(args.game)
    sigma = _load_strategy(args.strategy, arena)
    report = zs_robustness_check(
        arena, sigma, parse_rational(args.delta), args.samples, args.seed, args.granularity
    )
    if args.csv:
        lines = ["sample,vertex,base_value,perturbed_value,margin"]
        for row in report.rows:
            lines.append(
                f"{row.sample_index},{row.vertex},{format_rational(row.base_value)},"
                f"{format_rational(row.perturbed_value)},{format_rational(row.margin)}"
            )
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
    _emit(
        args,
        report.to_json(),
        [f"violations: {report.violations}", f"min margin: {format_rational(report.min_margin)}"],
    )


def cmd_badvertex(args):
    arena = _load_game(args.game)
    query = BadnessQuery(
        args.vertex,
        parse_rational(args.c),
        parse_rational(args.d),
        Fraction(0) if args.closed else parse_rational(args.eps),
        strict_second=not args.closed,
    )
    bad = is_bad_vertex(arena, query, _guards(args))
    _emit(args, {"bad": bad}, ["bad" if bad else "not bad"])


def cmd_lambda(args):
    arena = _load_game(args.game)
    eps = Fraction(0) if args.closed else parse_rational(args.eps)
    reg = lambda_region(arena, args.vertex, eps, strict_second=not args.closed, guards=_guards(args))
    if args.svg:
        from .plots import render_regions

        render_regions(args.svg, [(f"Lambda({args.vertex})", reg, "tab:blue")], _window(args))
    _emit(args, reg.to_json(), [reg.pretty()])


def cmd_regions(args):
    arena = _load_game(args.game)
    eps = parse_rational(args.eps)
    ext = build_extended_game(arena, args.vertex, _guards(args))
    from .graphs import tarjan_scc

    layers = []
    payload = []
    cache: dict = {}
    palette = ["tab:red", "tab:blue", "tab:green", "tab:orange", "tab:purple", "tab:brown"]
    for scc in (s for s in tarjan_scc(ext.arena) if not s.is_trivial):
        phi = solver.phi_region(ext, scc, _guards(args))
        psi = solver.psi_region(ext, scc, eps, True, _guards(args), _cache=cache)
        payload.append({"scc": scc.id, "phi": phi.to_json(), "psi": psi.to_json()})
        layers.append((f"phi S{scc.id}", phi, palette[(2 * scc.id) % len(palette)]))
        from .geometry import region_rename

        psi_xy = region_rename(region_rename(psi, "c", "x"), "d", "y")
        layers.append((f"psi S{scc.id}", psi_xy, palette[(2 * scc.id + 1) % len(palette)]))
    if args.svg:
        from .plots import render_regions

        render_regions(args.svg, layers, _window(args), title=f"regions from {args.vertex} (eps={args.eps})")
    _emit(
        args,
        {"sccs": payload},
        [f"S{entry['scc']}: phi {len(entry['phi']['cells'])} cell(s), psi {len(entry['psi']['cells'])} cell(s)" for entry in payload],
    )


def cmd_extend(args):
    arena = _load_game(args.game)
    ext = build_extended_game(arena, args.vertex, _guards(args))
    _emit(
        args,
        ext.to_json(),
        [f"{len(ext.arena.vertices)} extended vertices, {len(ext.arena.edges)} edges"],
    )


def cmd_partition(args):
    values = [int(x) for x in args.values.split(",") if x]
    game = solver.make_partition_game(values)
    text = emit_game(game.arena)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    payload = game.to_json()
    payload["game"] = text
    _emit(args, payload, [text.rstrip(), f"# scale {game.scale}, threshold {game.threshold}"])


def cmd_fixtures(args):
    params = {}
    for key in ("mu", "iota", "mu_prime", "delta", "eps"):
        raw = getattr(args, key, None)
        if raw is not None:
            params[key] = parse_rational(raw)
    if args.values:
        params["values"] = [int(x) for x in args.values.split(",") if x]
    fixture = build_fixture(args.name, **params)
    text = emit_game(fixture.arena)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    payload = fixture.to_json()
    payload["game"] = text
    _emit(args, payload, [text.rstrip(), f"# fixture {fixture.name}, scale {fixture.scale}"])


def _window(args):
    if not getattr(args, "window", None):
        return None
    parts = [parse_rational(p) for p in args.window.split(",")]
    if len(parts) != 4:
        raise ModelError("--window expects xmin,xmax,ymin,ymax")
    return tuple(parts)


def _add_common(p, game=True, vertex=True):
    if game:
        p.add_argument("--game", required=True, help="game file path")
    if vertex:
        p.add_argument("--vertex", required=True, help="initial vertex")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--max-cycles", type=int, default=Guards().max_cycles)
    p.add_argument("--max-ext-vertices", type=int, default=Guards().max_extended_vertices)
    p.add_argument("--max-strategies", type=int, default=Guards().max_memoryless)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stackmp",
        description="Exact adversarial Stackelberg values for two-player mean-payoff games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute ASV^eps (or ASV with --closed)")
    _add_common(p)
    p.add_argument("--eps", help="tolerance p/q (required unless --closed)")
    p.add_argument("--closed", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("threshold", help="decide ASV^eps > c with a certificate")
    _add_common(p)
    p.add_argument("--eps")
    p.add_argument("--c", required=True)
    p.add_argument("--closed", action="store_true")
    p.add_argument("--cert-out", help="write the certificate JSON here")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("witness", help="build a regular lasso witness for ASV^eps > c")
    _add_common(p)
    p.add_argument("--eps", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--target", required=True, help="payoff to aim for, c < target < c'")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("maxeps", help="largest eps with ASV^eps > c")
    _add_common(p)
    p.add_argument("--c", required=True)
    p.add_argument("--check", action="store_true", help="cross-check with the bisection route")
    p.set_defaults(func=cmd_maxeps)

    p = sub.add_parser("mlsolve", help="ASV restricted to memoryless Leader strategies")
    _add_common(p)
    p.add_argument("--eps")
    p.add_argument("--closed", action="store_true")
    p.set_defaults(func=cmd_mlsolve)

    p = sub.add_parser("eval", help="value of a finite-memory Leader strategy")
    _add_common(p)
    p.add_argument("--strategy", required=True, help="MealyStrategy JSON path")
    p.add_argument("--eps")
    p.add_argument("--closed", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("robust", help="perturbation sweep for a Leader strategy")
    _add_common(p)
    p.add_argument("--strategy", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--granularity", type=int, default=16)
    p.add_argument("--csv", help="write per-sample rows here")
    p.add_argument("--plot", help="write a margin figure here (svg/png/pdf)")
    p.set_defaults(func=cmd_robust)

    p = sub.add_parser("zerosum", help="zero-sum value and positional strategies (dimension 0)")
    _add_common(p, vertex=False)
    p.add_argument("--vertex", help="print one vertex only")
    p.set_defaults(func=cmd_zerosum)

    p = sub.add_parser("zscheck", help="zero-sum robustness sweep")
    _add_common(p, vertex=False)
    p.add_argument("--strategy", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--granularity", type=int, default=16)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_zscheck)

    p = sub.add_parser("badvertex", help="is the vertex punishable at (c, d)?")
    _add_common(p)
    p.add_argument("--c", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--eps")
    p.add_argument("--closed", action="store_true")
    p.set_defaults(func=cmd_badvertex)

    p = sub.add_parser("lambda", help="full badness region of a vertex")
    _add_common(p)
    p.add_argument("--eps")
    p.add_argument("--closed", action="store_true")
    p.add_argument("--svg", help="render the region here")
    p.add_argument("--window", help="xmin,xmax,ymin,ymax")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("regions", help="per-SCC achievable and punishable regions")
    _add_common(p)
    p.add_argument("--eps", required=True)
    p.add_argument("--svg")
    p.add_argument("--window")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("extend", help="dump the visited-set extended game")
    _add_common(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("partition", help="emit a partition-reduction game")
    p.add_argument("--values", required=True, help="comma-separated positive integers")
    p.add_argument("-o", "--output")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("fixtures", help="emit a named example game")
    p.add_argument("name", choices=FIXTURE_NAMES + tuple(sorted(FIXTURE_ALIASES)))
    p.add_argument("--mu")
    p.add_argument("--iota")
    p.add_argument("--mu-prime", dest="mu_prime")
    p.add_argument("--delta")
    p.add_argument("--eps")
    p.add_argument("--values")
    p.add_argument("-o", "--output")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    needs_eps = args.command in ("threshold", "mlsolve", "eval", "badvertex", "lambda", "solve")
    if needs_eps and not getattr(args, "closed", False) and getattr(args, "eps", None) is None:
        parser.error(f"{args.command}: --eps is required unless --closed")
    try:
        args.func(args)
        return 0
    except ResourceGuardError as exc:
        _fail(args, exc, "resource-guard")
        return 2
    except (ModelError, GameFormatError, CertificateError, FileNotFoundError) as exc:
        _fail(args, exc, type(exc).__name__)
        return 1


def _fail(args, exc, kind):
    if getattr(args, "json", False):
        print(json.dumps({"error": str(exc), "kind": kind}))
    else:
        print(f"error: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
