"""Command line front end.

Every subcommand prints a JSON report (or a flat ``key: value`` text
rendering of it).  Exit status: 0 when all checks pass, 1 when a
mathematical check fails, 2 on usage or input errors.

Usage:
  morselimits homology --builtin appendix_z --depth 6 --ring Z --window -3.5 0
  morselimits theorem-a --builtin intro_lines --ring F2 --grids 4
  morselimits example appendix_z --depth 4 --output appendix.floer
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .exact_linalg import Matrix, ModuleMap, PresentedModule, Submodule, parse_ring
from .floer_triple import (
    BUILTIN_FAMILIES, FloerFormatError, builtin_family, format_fraction, lazy_family, load,
    serialize, to_fraction, validate,
)
from .window_complex import (
    build_complex, chain_inclusion, chain_projection, check_d_squared, classify_square, homology,
    induced_hom_map,
)
from .tower_limits import (
    DEFAULT_WINDOW, DIRECT, INVERSE, build_tower, grid_direct_limit, grid_inverse_limit, lim1,
    mittag_leffler,
)
from .bidirect_system import build_grid, canonical_kappa, kappa_kernel_evidence, theorem_a_harness
from .novikov import (
    SequenceRejected, boundary_obstruction, candidate_boundary, cycle_check, validate_sequence,
    witness_cycle, witness_sequence,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_MERGE_ONE = ("--a-grid", "--b-grid", "--grid", "--values")
_MERGE_TWO = ("--window",)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization

def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not emitted")
    if isinstance(x, dict):
        return {str(format_fraction(k) if isinstance(k, Fraction) else k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, Matrix):
        return [[jsonable(v) for v in row] for row in x.data]
    if isinstance(x, PresentedModule):
        return module_json(x)
    if isinstance(x, ModuleMap):
        return map_json(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def module_json(m: PresentedModule) -> dict:
    out = {"describe": m.describe(), "generators": m.ngens, "rank": m.free_rank,
           "invariant_factors": list(m.invariant_factors)}
    if m.ring.is_field:
        out["dimension"] = m.dimension
    return out


def map_json(f: ModuleMap) -> dict:
    return {"matrix": jsonable(f.matrix), "injective": f.is_injective(),
            "surjective": f.is_surjective(), "rank": f.rank()}


def image_json(im: Submodule) -> dict:
    if im.ambient.ring.is_field:
        return {"dimension": im.dimension}
    return {"rank": im.free_rank, "elementary_divisors": list(im.elementary_divisors())}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield f"{prefix}: {json.dumps(obj)}"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    return "\n".join(_flatten(report)) + "\n"


# ---------------------------------------------------------------------------
# argument helpers

def _rational(text):
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _grid(text):
    if text is None:
        return None
    vals = [_rational(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise UsageError("empty grid")
    pairs = list(zip(vals, vals[1:]))
    if not (all(x < y for x, y in pairs) or all(x > y for x, y in pairs)):
        raise UsageError(f"grid {text!r} is not strictly ordered")
    return sorted(vals)


def _window(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError("--window needs two values a b")
    a, b = (_rational(p) for p in parts)
    if a > b:
        raise UsageError(f"window [{a}, {b}] has a > b")
    return a, b


def _merge_argv(argv):
    """Let grid and window values start with '-' without '=' syntax."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _MERGE_ONE and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        elif tok in _MERGE_TWO and i + 1 < len(argv):
            vals = argv[i + 1:i + 3]
            if len(vals) == 2 and not vals[1].startswith("--"):
                out.append(f"{tok}={vals[0]},{vals[1]}")
                i += 3
            else:
                out.append(f"{tok}={vals[0]}")
                i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _ring(args):
    try:
        return parse_ring(args.ring)
    except ValueError as e:
        raise UsageError(str(e)) from None


def load_triple(args):
    """Exactly one of a file path or --builtin; --depth truncates a built-in family."""
    ring = _ring(args)
    if bool(args.input) == bool(args.builtin):
        raise UsageError("give exactly one of an input file or --builtin")
    if args.input:
        try:
            triple = load(args.input)
        except FloerFormatError as e:
            raise UsageError(f"{args.input}: {e}") from None
        except OSError as e:
            raise UsageError(str(e)) from None
        return triple.with_ring(ring) if args.ring_given else triple
    if args.builtin not in BUILTIN_FAMILIES:
        raise UsageError(f"unknown built-in family {args.builtin!r}")
    if args.depth is None:
        return lazy_family(args.builtin, ring)
    try:
        return builtin_family(args.builtin, args.depth, ring)
    except ValueError as e:
        raise UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args):
    triple = load_triple(args)
    window = _window(args.window) if args.window else None
    if triple.is_lazy and window is None:
        raise UsageError("lazy families need --window")
    rep = validate(triple, window=window, morse_mode=args.morse)
    checks = [{"axiom": c.axiom, "passed": c.passed, "witness": c.witness, "detail": c.detail}
              for c in rep.checks]
    return {"command": "validate", "ok": rep.ok, "triple": triple.name, "checks": checks}


def cmd_homology(args):
    triple = load_triple(args)
    a, b = _window(args.window)
    cx = build_complex(triple, a, b)
    d2, witness = check_d_squared(cx)
    if not d2:
        return {"command": "homology", "ok": False, "d_squared": False, "witness": witness}
    H = homology(cx)
    out = {"command": "homology", "ok": H.verify(), "window": [a, b], "ring": str(triple.ring),
           "basis": list(cx.names)}
    out.update(module_json(H.module))
    out["representatives"] = [cx.chain(r) for r in H.representatives]
    return out


def cmd_map(args):
    triple = load_triple(args)
    p = [_rational(x) for x in args.params]
    if len(p) != 3:
        raise UsageError("map needs three parameters")
    try:
        if args.kind == "projection":
            cm = chain_projection(triple, p[0], p[1], p[2])
        else:
            cm = chain_inclusion(triple, p[0], p[1], p[2])
    except ValueError as e:
        raise UsageError(str(e)) from None
    f = induced_hom_map(cm, homology(cm.source), homology(cm.target))
    return {"command": "map", "ok": cm.commutes(), "kind": args.kind, "params": p,
            "chain_matrix": cm.matrix, "source": f.source, "target": f.target, "homology_map": f}


def _tower(args, triple, direction):
    grid = _grid(args.grid)
    if grid is None or args.fixed is None:
        raise UsageError("towers need --fixed and --grid")
    try:
        return build_tower(triple, _rational(args.fixed), grid, direction, args.level)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_tower(args):
    triple = load_triple(args)
    direction = DIRECT if args.direction == "direct" else INVERSE
    t = _tower(args, triple, direction)
    lim = grid_inverse_limit(t) if direction == INVERSE else grid_direct_limit(t)
    return {"command": "tower", "ok": t.check_composition(), "direction": direction,
            "grid": list(t.index_grid), "modules": list(t.modules),
            "transitions": [tr.matrix for tr in t.transitions],
            "grid_limit": {"module": lim.module, "label": lim.label,
                           "oracle_checked": lim.oracle_checked}}


def _ml_json(ml):
    rep = ml.report
    return {
        "certificate": ml.kind,
        "stabilized": rep.stabilized,
        "stable_from": ml.stable_from,
        "window": rep.window,
        "levels": [{"index": c.index, "sources": list(c.sources), "stabilized": c.stabilized,
                    "stable_from": c.stable_from, "images": [image_json(i) for i in c.images]}
                   for c in rep.chains],
    }


def cmd_ml(args):
    triple = load_triple(args)
    t = _tower(args, triple, INVERSE)
    ml = mittag_leffler(t, args.stabilization)
    return dict({"command": "ml", "ok": True}, **_ml_json(ml))


def cmd_lim1(args):
    triple = load_triple(args)
    t = _tower(args, triple, INVERSE)
    res = lim1(t, args.stabilization)
    return {"command": "lim1", "ok": res.module.is_zero(), "module": res.module,
            "certificate": res.certificate, "ml_certificate": res.ml.kind,
            "full_tower_vanishes": res.full_tower_vanishes}


def cmd_square(args):
    triple = load_triple(args)
    a1, a2, b1, b2 = (_rational(x) for x in args.params)
    if not a1 <= a2 <= b1 <= b2:
        raise UsageError("square needs a1 <= a2 <= b1 <= b2")
    p1 = chain_projection(triple, a1, a2, b1)
    i1 = chain_inclusion(triple, a1, b1, b2)
    i2 = chain_inclusion(triple, a2, b1, b2, source=p1.target)
    p2 = chain_projection(triple, a1, a2, b2, source=i1.target, target=i2.target)
    maps = [p1, i1, i2, p2]
    if args.level == "homology":
        H = {}
        for cm in maps:
            for cx in (cm.source, cm.target):
                H.setdefault(id(cx), homology(cx))
        maps = [induced_hom_map(cm, H[id(cm.source)], H[id(cm.target)]) for cm in maps]
    cls = classify_square(*maps)
    return {"command": "square", "ok": cls.commutative, "level": args.level,
            "params": [a1, a2, b1, b2], "classification": cls.as_dict()}


def cmd_grid(args):
    triple = load_triple(args)
    A, B = _grid(args.a_grid), _grid(args.b_grid)
    if A is None or B is None:
        raise UsageError("grid needs --a-grid and --b-grid")
    try:
        g = build_grid(triple, A, B, check=False)
    except ValueError as e:
        raise UsageError(str(e)) from None
    squares, laws = g.check_squares(), g.check_laws()
    kap = canonical_kappa(g)
    groups = [{"a": a, "b": b, "module": g.group(a, b).module} for a in g.a_grid for b in g.b_grid]
    return {"command": "grid", "ok": squares and laws and kap.ok, "a_grid": list(g.a_grid),
            "b_grid": list(g.b_grid), "groups": groups, "squares_commute": squares, "laws": laws,
            "kappa": {"ok": kap.ok, "unique": kap.unique, "surjective": kap.kappa.is_surjective(),
                      "kernel_evidence": kappa_kernel_evidence(g)}}


def cmd_theorem_a(args):
    triple = load_triple(args)
    if args.grids is not None:
        schedule = list(range(1, args.grids + 1))
    else:
        A, B = _grid(args.a_grid), _grid(args.b_grid)
        if A is None or B is None:
            raise UsageError("theorem-a needs --grids N or --a-grid and --b-grid")
        schedule = [(A, B)]
    try:
        rep = theorem_a_harness(triple, schedule=schedule, window=args.stabilization)
    except ValueError as e:
        raise UsageError(str(e)) from None
    consistent = all(all(d.checks.values()) for d in rep.depths)
    if triple.ring.is_field:
        ok = rep.certified
    else:
        # a non-field run is expected to withhold certification
        ok = consistent and not rep.certified and bool(rep.diagnostics)
    return dict({"command": "theorem-a", "ok": ok}, **rep.as_dict())


def cmd_novikov(args):
    values = [int(v) for v in args.values.split(",")] if args.values else None
    try:
        seq = witness_sequence(args.sequence, args.length, values, validate=False)
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = {"command": "novikov", "sequence": args.sequence, "length": seq.depth}
    try:
        validate_sequence(seq)
        out["validation"] = {"passed": True}
    except SequenceRejected as e:
        out["validation"] = {"passed": False, "condition": e.condition, "k": e.k, "detail": str(e)}
    xi = witness_cycle(seq)
    out["cycle_check"] = cycle_check(xi)
    rep = boundary_obstruction(seq, args.bound, args.depth)
    out["obstruction"] = rep.as_dict()
    if not rep.success:
        b0 = rep.inconclusive[0]
        eta = candidate_boundary(seq, b0)
        out["boundary_found"] = {"b0": b0, "d_eta_equals_xi": eta is not None and eta.boundary() == xi}
    out["ok"] = out["validation"]["passed"] and out["cycle_check"] and rep.success
    return out


def cmd_example(args):
    if args.name not in BUILTIN_FAMILIES:
        raise UsageError(f"unknown built-in family {args.name!r}")
    try:
        triple = builtin_family(args.name, args.depth, _ring(args))
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = serialize(triple)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as e:
            raise UsageError(str(e)) from None
    return {"command": "example", "ok": True, "name": args.name, "depth": args.depth,
            "points": len(triple.points), "flows": len(triple.flows),
            "output": args.output, "text": None if args.output else text}


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="morselimits", description="Window homology and limit comparisons")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", nargs="?", help="a .floer file")
        p.add_argument("--builtin", help="built-in family name")
        p.add_argument("--depth", type=int, help="truncate the built-in family")
        p.add_argument("--ring", default=None, help="Q, Z or F<p> (default Z)")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--output-report", dest="report_path", help="write the report here")

    p = sub.add_parser("validate", help="check the axioms of a triple")
    common(p)
    p.add_argument("--window")
    p.add_argument("--morse", action="store_true", help="also check the grading condition")

    p = sub.add_parser("homology", help="homology of one window")
    common(p)
    p.add_argument("--window", required=True)

    p = sub.add_parser("map", help="projection or inclusion and its homology map")
    common(p)
    p.add_argument("--kind", choices=("projection", "inclusion"), required=True)
    p.add_argument("params", nargs=3, metavar="X",
                   help="projection: a1 a2 b; inclusion: a b1 b2")

    for name, help_ in (("tower", "one-parameter tower and its grid limit"),
                        ("ml", "eventual images and Mittag-Leffler certificate"),
                        ("lim1", "cokernel of Delta on the grid tower")):
        p = sub.add_parser(name, help=help_)
        common(p)
        p.add_argument("--fixed", required=True, help="the fixed b (inverse) or a (direct)")
        p.add_argument("--grid", required=True, help="comma separated index grid")
        p.add_argument("--level", choices=("homology", "chain"), default="homology")
        p.add_argument("--stabilization", type=int, default=DEFAULT_WINDOW)
        if name == "tower":
            p.add_argument("--direction", choices=("inverse", "direct"), default="inverse")

    p = sub.add_parser("square", help="classify the projection/inclusion square")
    common(p)
    p.add_argument("params", nargs=4, metavar="X", help="a1 a2 b1 b2")
    p.add_argument("--level", choices=("chain", "homology"), default="chain")

    p = sub.add_parser("grid", help="bidirect grid, squares and kappa")
    common(p)
    p.add_argument("--a-grid", dest="a_grid", required=True)
    p.add_argument("--b-grid", dest="b_grid", required=True)

    p = sub.add_parser("theorem-a", help="comparison harness on deepening grids")
    common(p)
    p.add_argument("--grids", type=int, help="canonical grids of depth 1..N")
    p.add_argument("--a-grid", dest="a_grid")
    p.add_argument("--b-grid", dest="b_grid")
    p.add_argument("--stabilization", type=int, default=DEFAULT_WINDOW)

    p = sub.add_parser("novikov", help="witness sequence, cycle and boundary obstruction")
    p.add_argument("--sequence", choices=("alternating", "ones", "zeros", "custom"), default="alternating")
    p.add_argument("--values", help="comma separated entries for a custom sequence")
    p.add_argument("--length", type=int, default=40, help="prefix length K of the sequence")
    p.add_argument("--bound", type=int, default=1000, help="check all |b0| <= bound")
    p.add_argument("--depth", type=int, default=40, help="search obstructions up to this k")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output-report", dest="report_path")

    p = sub.add_parser("example", help="write a built-in family as a .floer file")
    p.add_argument("name")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--ring", default=None)
    p.add_argument("--output", help="path of the .floer file (default: print it)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output-report", dest="report_path")
    return ap


COMMANDS = {
    "validate": cmd_validate, "homology": cmd_homology, "map": cmd_map, "tower": cmd_tower,
    "ml": cmd_ml, "lim1": cmd_lim1, "square": cmd_square, "grid": cmd_grid,
    "theorem-a": cmd_theorem_a, "novikov": cmd_novikov, "example": cmd_example,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(_merge_argv(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if hasattr(args, "ring"):
        args.ring_given = args.ring is not None
        args.ring = args.ring or "Z"
    try:
        report = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE
    text = render(jsonable(report), args.format)
    if args.report_path:
        try:
            Path(args.report_path).write_text(text)
        except OSError as e:
            print(f"error: {e}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return EXIT_OK if report.get("ok") else EXIT_FAIL


def main():
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
