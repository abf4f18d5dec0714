"""Command line front end: decompose, verify, lift-tree.

Exit codes: 0 success, 1 invalid input or environment, 2 decomposition left
unresolved regions, 3 strict mode hit the level budget, 4 verification
mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import decomposer, engine, oracle, theorems
from .core import IntPolynomial, Prime
from .decomposer import BudgetExhaustedError, Decomposition


def _poly_text(f: IntPolynomial) -> str:
    m = f.monomial_exponent
    if m is not None:
        return f"x^{m}"
    parts = []
    for e, c in enumerate(f.coefficients):
        if c == 0:
            continue
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(f"{c}*x" if c != 1 else "x")
        else:
            parts.append(f"{c}*x^{e}" if c != 1 else f"x^{e}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# serialization


def _ball_doc(ball: decomposer.Ball) -> dict:
    return {"center": str(ball.center.value), "level": ball.level}


def decomposition_document(dec: Decomposition) -> dict:
    poly = dec.polynomial
    m = poly.monomial_exponent
    poly_doc = (
        {"monomial_exponent": m}
        if m is not None
        else {"coefficients": list(poly.coefficients)}
    )
    orbit_index = {orb: i for i, orb in enumerate(dec.periodic_orbits)}
    return {
        "p": dec.prime.value,
        "polynomial": poly_doc,
        "max_level": dec.max_level,
        "periodic_orbits": [
            {
                "period": orb.period,
                "points": [
                    {"center": str(pt.value), "level": pt.level.value} for pt in orb.points
                ],
            }
            for orb in dec.periodic_orbits
        ],
        "components": [
            {
                "balls": [_ball_doc(b) for b in comp.balls],
                "certificate": {
                    "kind": comp.certificate.kind,
                    "param": comp.certificate.param,
                },
                "verified_level": comp.verified_level,
            }
            for comp in dec.components
        ],
        "basins": [
            {
                "attractor_index": orbit_index[rec.attractor]
                if rec.attractor is not None
                else None,
                "region": [_ball_doc(b) for b in rec.region],
            }
            for rec in dec.basins
        ],
        "unresolved": [_ball_doc(b) for b in dec.unresolved],
    }


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_text(dec: Decomposition) -> str:
    p = dec.prime.value
    lines = [f"p={p} f={_poly_text(dec.polynomial)} max_level={dec.max_level}"]
    lines.append(f"periodic orbits ({len(dec.periodic_orbits)}):")
    for orb in dec.periodic_orbits:
        pts = " -> ".join(str(pt.value) for pt in orb.points)
        lines.append(f"  period {orb.period}: {pts} (mod {p}^{dec.max_level})")
    lines.append(f"minimal components ({len(dec.components)}):")
    for comp in dec.components:
        centers = ", ".join(str(b.center.value) for b in comp.balls)
        cert = comp.certificate
        tag = cert.kind if cert.param is None else f"{cert.kind}: {cert.param}"
        lines.append(
            f"  level {comp.level}: {{{centers}}} mod {p}^{comp.level}"
            f" [{tag}, verified to {comp.verified_level}]"
        )
    lines.append(f"basins ({len(dec.basins)}):")
    for rec in dec.basins:
        centers = ", ".join(f"{b.center.value}+{p}^{b.level}Z" for b in rec.region)
        if rec.attractor is None:
            lines.append(f"  absorbed, no attractor: {centers}")
        else:
            at = " -> ".join(str(pt.value) for pt in rec.attractor.points)
            lines.append(f"  attractor {at}: {centers}")
    lines.append(f"unresolved ({len(dec.unresolved)}):")
    for ball in dec.unresolved:
        lines.append(f"  {ball.center.value}+{p}^{ball.level}Z")
    return "\n".join(lines) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# verification


def _region_residues(balls, p: int, n: int) -> frozenset[int]:
    out: set[int] = set()
    for ball in balls:
        if ball.level <= n:
            out.update(ball.residues(n))
        else:
            raise ValueError("region ball finer than the comparison level")
    return frozenset(out)


def compare_decompositions(a: Decomposition, b: Decomposition) -> list[str]:
    """Structural differences between two decompositions at the same level.

    Orbits and components must match exactly; basin regions and unresolved
    remainders are compared as residue sets, since equal regions may be cut
    into balls differently.
    """
    diffs: list[str] = []
    if a.prime != b.prime or a.max_level != b.max_level:
        return ["different prime or level budget"]
    p, n = a.prime.value, a.max_level

    orbs_a = {frozenset(pt.value for pt in o.points) for o in a.periodic_orbits}
    orbs_b = {frozenset(pt.value for pt in o.points) for o in b.periodic_orbits}
    for miss in sorted(map(sorted, orbs_a - orbs_b)):
        diffs.append(f"orbit {miss} missing from second decomposition")
    for miss in sorted(map(sorted, orbs_b - orbs_a)):
        diffs.append(f"orbit {miss} missing from first decomposition")

    comps_a = {frozenset((bl.center.value, bl.level) for bl in c.balls) for c in a.components}
    comps_b = {frozenset((bl.center.value, bl.level) for bl in c.balls) for c in b.components}
    for miss in sorted(map(sorted, comps_a - comps_b))[:6]:
        diffs.append(f"component {miss} missing from second decomposition")
    for miss in sorted(map(sorted, comps_b - comps_a))[:6]:
        diffs.append(f"component {miss} missing from first decomposition")

    def basin_map(dec: Decomposition) -> dict:
        out = {}
        for rec in dec.basins:
            key = (
                frozenset(pt.value for pt in rec.attractor.points)
                if rec.attractor is not None
                else None
            )
            out[key] = _region_residues(rec.region, p, n)
        return out

    bas_a, bas_b = basin_map(a), basin_map(b)
    keys = set(bas_a) | set(bas_b)
    for key in keys:
        name = "absorbed" if key is None else f"attractor {sorted(key)}"
        if key not in bas_a or key not in bas_b:
            diffs.append(f"basin {name} present on one side only")
        elif bas_a[key] != bas_b[key]:
            diffs.append(f"basin {name} covers different regions")

    una = _region_residues(a.unresolved, p, n)
    unb = _region_residues(b.unresolved, p, n)
    if una != unb:
        diffs.append("unresolved remainders cover different regions")
    return diffs


# ---------------------------------------------------------------------------
# subcommands


def _polynomial_from(args) -> IntPolynomial:
    if args.m is not None and args.coeffs is not None:
        raise ValueError("give either --m or --coeffs, not both")
    if args.m is not None:
        return IntPolynomial.monomial(args.m)
    if args.coeffs is not None:
        return IntPolynomial(tuple(int(c) for c in args.coeffs.split(",")))
    raise ValueError("one of --m or --coeffs is required")


def cmd_decompose(args) -> int:
    prime = Prime(args.p)
    f = _polynomial_from(args)
    code = 0
    try:
        dec = decomposer.decompose(
            f, prime, args.max_level, working=args.working_precision, strict=args.strict
        )
    except BudgetExhaustedError as err:
        dec = err.partial
        code = 3
    else:
        if dec.unresolved:
            code = 2
    text = (
        canonical_json(decomposition_document(dec))
        if args.format == "json"
        else render_text(dec)
    )
    _write(text, args.output)
    return code


def cmd_verify(args) -> int:
    prime = Prime(args.p)
    if args.m is None:
        raise ValueError("verify works on monomials; give --m")
    case = theorems.classify_case(prime, args.m)
    n_max = args.max_level

    if case.conjectural:
        report = theorems.conjecture_check(args.m, n_max)
        print(
            f"conjectural case {case.label}: t={report.t}, expecting"
            f" {report.expected_per_level} growing {report.cycle_length}-cycles per level"
        )
        for level, count in report.observed:
            print(f"  level {level}: {count}")
        if report.match:
            print("Conjectural-pass")
            return 0
        print("Conjectural-FAIL: counts deviate from the conjecture (possible refutation)")
        return 4

    f = IntPolynomial.monomial(args.m)
    predicted = theorems.predict(case, n_max)
    computed = decomposer.decompose(f, prime, n_max, working=args.working_precision)
    problems = compare_decompositions(predicted, computed)
    checked = 0
    for n in range(1, n_max + 1):
        try:
            g = oracle.build_graph(f, prime, n)
        except oracle.CapExceededError:
            break
        problems += [f"[engine level {n}] {v}" for v in oracle.crosscheck(computed, g)]
        problems += [f"[closed form level {n}] {v}" for v in oracle.crosscheck(predicted, g)]
        checked = n
    if problems:
        print(f"verify p={prime.value} m={args.m}: MISMATCH")
        for msg in problems[:30]:
            print(f"  {msg}")
        return 4
    print(
        f"verify p={prime.value} m={args.m}: PASS"
        f" (closed form = engine; oracle crosschecked to level {checked})"
    )
    return 0


def cmd_lift_tree(args) -> int:
    prime = Prime(args.p)
    f = _polynomial_from(args)
    n_max = args.max_level
    working = args.working_precision or n_max + 8
    lines = [
        "digraph lifts {",
        "  rankdir=TB;",
        '  node [shape=box, fontname="monospace"];',
    ]
    count = 0

    def node_id(cyc: engine.Cycle) -> str:
        return f"c{cyc.level}_{cyc.base}"

    def visit(cyc: engine.Cycle) -> None:
        nonlocal count
        count += 1
        mult = engine.multiplier(f, cyc, working)
        disp = engine.displacement(f, cyc, working)
        beh = engine.classify(cyc, mult, disp)
        tag = beh.tag.value
        if beh.order is not None:
            tag += f"({beh.order})"
        lines.append(
            f'  {node_id(cyc)} [label="L{cyc.level} x={cyc.base}'
            f' len={cyc.length} {tag}"];'
        )
        if cyc.level >= n_max:
            return
        for child in engine.lift(f, cyc).children:
            visit(child)
            lines.append(f"  {node_id(cyc)} -> {node_id(child)};")

    for cyc in engine.find_cycles(f, prime, 1):
        visit(cyc)
    lines.append("}")
    with open(args.dot, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote lift tree with {count} nodes to {args.dot}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padicdyn",
        description="Minimal decompositions of polynomial dynamics on the p-adic integers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_strict=False):
        sp.add_argument("--p", type=int, required=True, help="prime modulus base")
        sp.add_argument("--m", type=int, default=None, help="monomial exponent (f = x^m)")
        sp.add_argument(
            "--coeffs",
            default=None,
            help="comma-separated integer coefficients, ascending degree",
        )
        sp.add_argument("--max-level", type=int, default=6, help="analysis depth")
        sp.add_argument("--working-precision", type=int, default=None)
        if with_strict:
            sp.add_argument("--format", choices=("json", "text"), default="json")
            sp.add_argument("--output", default=None, help="write here instead of stdout")
            sp.add_argument("--strict", action="store_true", help="fail on unresolved regions")

    sp = sub.add_parser("decompose", help="compute a decomposition")
    common(sp, with_strict=True)
    sp = sub.add_parser("verify", help="closed forms vs engine vs brute force")
    common(sp)
    sp = sub.add_parser("lift-tree", help="export the cycle lifting tree as DOT")
    common(sp)
    sp.add_argument("--dot", required=True, help="output DOT path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "decompose": cmd_decompose,
        "verify": cmd_verify,
        "lift-tree": cmd_lift_tree,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, theorems.UnsupportedPrimeError, oracle.CapExceededError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
