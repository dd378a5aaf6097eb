"""Command-line front end.

Exit codes: 0 = SAT / check passed, 1 = UNSAT / check failed, 2 = error.
Every command accepts ``--json`` to print its run report as JSON instead of
text.  Wall-clock timings are only included with ``--timings`` so that
reports stay byte-identical across runs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import warnings
from collections.abc import Sequence

import numpy as np

from . import __version__
from .contexts import check_unique_commuting_context, context_from_basis
from .errors import ContextualityError
from .hilbert import Ket, inner_product, random_ket
from .ndi import check_vidp, check_vinp, ndi_witness
from .operators import random_hermitian, random_unitary
from .raysets import (
    BUILTIN_NAMES,
    RaySet,
    builtin_rayset,
    load_rayset,
    orthogonality_graph,
    problem_from_rayset,
)
from .valuations import (
    ConstraintStyle,
    LocalValuation,
    Status,
    ValuationMode,
    enumerate_local_valuations,
    search_global_valuation,
    to_dimacs,
    verify_witness,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


class CliError(Exception):
    pass


def _digest(*chunks: bytes) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(len(c).to_bytes(8, "big"))
        h.update(c)
    return "sha256:" + h.hexdigest()


def _read_rayset(source: str, fmt: str, *, allow_builtin: bool) -> tuple[RaySet, bytes, list[str]]:
    """Load a ray set from a path (or built-in name); returns set, digest input, warnings."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if os.path.exists(source):
            try:
                with open(source, "rb") as fh:
                    raw = fh.read()
            except OSError as exc:
                raise CliError(f"cannot read {source}: {exc.strerror}") from None
            rs = load_rayset(raw, fmt, source_name=os.path.basename(source))
        elif allow_builtin and source in BUILTIN_NAMES:
            raw = f"builtin:{source}".encode()
            rs = builtin_rayset(source)
        else:
            hint = f" (built-in sets: {', '.join(BUILTIN_NAMES)})" if allow_builtin else ""
            raise CliError(f"no such file: {source}{hint}")
    return rs, raw, [str(w.message) for w in caught]


def _emit(report: dict, as_json: bool, text_lines: list[str]) -> None:
    if as_json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def cmd_ks_check(args) -> int:
    t0 = time.perf_counter()
    rs, raw, notes = _read_rayset(args.rayset, args.format, allow_builtin=True)
    style = ConstraintStyle(args.style)
    problem = problem_from_rayset(rs, style)
    graph_edges = len(orthogonality_graph(rs).edges)
    t1 = time.perf_counter()
    result = search_global_valuation(problem)
    t2 = time.perf_counter()
    if args.export_cnf:
        try:
            with open(args.export_cnf, "w", encoding="utf-8") as fh:
                fh.write(to_dimacs(problem))
        except OSError as exc:
            raise CliError(f"cannot write {args.export_cnf}: {exc.strerror}") from None
    witness_ok = verify_witness(problem, result.witness) if result.witness is not None else None

    verdicts = {"status": result.status.value}
    if witness_ok is not None:
        verdicts["witness_verified"] = witness_ok
    report = {
        "command": "ks-check",
        "inputs_digest": _digest(raw, style.value.encode()),
        "input": {
            "source": rs.source,
            "dimension": rs.dimension,
            "rays": len(rs.rays),
            "style": style.value,
        },
        "verdicts": verdicts,
        "statistics": {
            "bases": len(problem.bases),
            "orthogonal_pairs": graph_edges,
            "nodes_explored": result.nodes_explored,
        },
        "witness_ones": (
            [i for i, v in enumerate(result.witness) if v == 1] if result.witness is not None else None
        ),
        "proof_note": result.proof_note,
        "warnings": notes,
    }
    if args.timings:
        report["timings"] = {"setup_s": t1 - t0, "search_s": t2 - t1}

    lines = [
        f"ray set: {rs.source} ({len(rs.rays)} rays, dimension {rs.dimension})",
        f"style: {style.value}",
        f"bases: {len(problem.bases)}",
        f"orthogonal pairs: {graph_edges}",
        f"status: {result.status.value}",
        f"nodes explored: {result.nodes_explored}",
    ]
    if result.witness is not None:
        lines.append(f"witness (rays valued 1): {report['witness_ones']}")
        lines.append(f"witness verified: {_fmt_bool(witness_ok)}")
    if result.proof_note:
        lines.append(f"note: {result.proof_note}")
    lines += [f"warning: {n}" for n in notes]
    if args.timings:
        lines.append(f"search time: {t2 - t1:.4f} s")
    _emit(report, args.json, lines)
    if result.status is Status.SAT:
        return EXIT_OK if witness_ok else EXIT_ERROR
    return EXIT_FAIL


def _load_basis(path: str, fmt: str) -> tuple[list[Ket], bytes, list[str]]:
    rs, raw, notes = _read_rayset(path, fmt, allow_builtin=False)
    # rays are scale-free; contexts need unit vectors
    return [r.normalized() for r in rs.rays], raw, notes


def cmd_commute_check(args) -> int:
    t0 = time.perf_counter()
    basis_a, raw_a, notes_a = _load_basis(args.basis_a, args.format)
    basis_b, raw_b, notes_b = _load_basis(args.basis_b, args.format)
    if basis_a[0].dim != basis_b[0].dim:
        raise CliError(f"bases have different dimensions ({basis_a[0].dim} vs {basis_b[0].dim})")
    ctx_a = context_from_basis(basis_a)
    ctx_b = context_from_basis(basis_b)
    verdict = check_unique_commuting_context(ctx_a, ctx_b)
    t1 = time.perf_counter()
    report = {
        "command": "commute-check",
        "inputs_digest": _digest(raw_a, raw_b),
        "input": {"dimension": ctx_a.dim},
        "verdicts": {
            "equal": verdict.equal,
            "commute": verdict.commute,
            "theorem_holds": verdict.theorem_holds,
        },
        "warnings": notes_a + notes_b,
    }
    if args.timings:
        report["timings"] = {"total_s": t1 - t0}
    lines = [
        f"dimension: {ctx_a.dim}",
        f"equal: {_fmt_bool(verdict.equal)}",
        f"commute: {_fmt_bool(verdict.commute)}",
        f"theorem_holds: {_fmt_bool(verdict.theorem_holds)}",
    ]
    _emit(report, args.json, lines)
    return EXIT_OK if verdict.theorem_holds else EXIT_FAIL


def _values_in_file_order(v: LocalValuation, basis: list[Ket]) -> list[int]:
    """Map context-ordered values back onto the rays as listed in the file."""
    out = [0] * len(basis)
    for p, val in zip(v.context.projectors, v.values):
        u = p.unit_vector()
        k = max(range(len(basis)), key=lambda i: abs(inner_product(u, basis[i])))
        out[k] = val
    return out


def cmd_valuations(args) -> int:
    basis, raw, notes = _load_basis(args.basis, args.format)
    ctx = context_from_basis(basis)
    mode = ValuationMode(args.mode)
    vals = enumerate_local_valuations(ctx, mode)
    rows = [_values_in_file_order(v, basis) for v in vals]
    report = {
        "command": "valuations",
        "inputs_digest": _digest(raw, mode.value.encode()),
        "input": {"dimension": ctx.dim, "mode": mode.value},
        "verdicts": {"count": len(rows)},
        "valuations": rows,
        "warnings": notes,
    }
    header = "  ".join(f"P{k + 1}" for k in range(len(basis)))
    lines = [
        f"dimension: {ctx.dim}",
        f"mode: {mode.value}",
        f"count: {len(rows)}",
        f"#   {header}",
    ]
    lines += [f"{i:<3} " + "  ".join(f"{x:>2}" for x in row) for i, row in enumerate(rows)]
    _emit(report, args.json, lines)
    return EXIT_OK


def _r(x: float) -> float:
    return float(f"{x:.6e}")


def cmd_ndi_demo(args) -> int:
    d = args.dim
    if d < 2:
        raise CliError("ndi-demo needs --dim >= 2")
    if args.trials < 0:
        raise CliError("--trials must be nonnegative")
    rng = np.random.default_rng(args.seed)
    u = random_unitary(d, rng)
    ctx = context_from_basis([Ket(u[:, k]) for k in range(d)])
    v = enumerate_local_valuations(ctx, ValuationMode.FUNC)[int(rng.integers(d))]
    x = random_ket(d, rng)
    a = random_hermitian(d, rng)

    w = ndi_witness(ctx, v, x)
    res = w.residuals()
    vinp = [check_vinp(x, a, w.U_defined), check_vinp(x, a, w.U_undefined)]
    vidp = check_vidp(ctx, v, x, args.trials, args.seed)
    checks = {
        "unitarity": max(res["defined_unitarity"], res["undefined_unitarity"]) <= 1e-10,
        "mapped_residual": max(res["defined_map"], res["undefined_map"]) <= 1e-9,
        "norm_preserved": max(res["norm_z"], res["norm_y"]) <= 1e-10,
        "defined_on_z": w.defined_on_z,
        "undefined_on_y": not w.defined_on_y,
        "vinp_holds": all(c.norm_invariant and c.spectrum_invariant for c in vinp),
        "vidp_fails": vidp.vidp_fails,
    }
    ok = all(checks.values())
    report = {
        "command": "ndi-demo",
        "inputs_digest": _digest(f"dim={d};seed={args.seed};trials={args.trials}".encode()),
        "input": {"dim": d, "seed": args.seed, "trials": args.trials},
        "verdicts": {**checks, "all_verified": ok},
        "witness": {
            "valuation": list(v.values),
            "x_norm": _r(float(np.linalg.norm(x.components))),
            "residuals": {k: _r(val) for k, val in res.items()},
        },
        "vidp": {
            "random_trials": vidp.trials,
            "random_defined": vidp.random_defined,
            "random_defined_fraction": vidp.random_defined_fraction,
            "defined_total": vidp.defined,
            "undefined_total": vidp.undefined,
        },
    }
    lines = [
        f"dimension: {d}  seed: {args.seed}  trials: {args.trials}",
        f"valuation (context order): {list(v.values)}",
        f"|x| = {report['witness']['x_norm']:.6g}",
        f"defined rotation: residual {res['defined_map']:.2e}, unitarity {res['defined_unitarity']:.2e}, "
        f"defined on target: {_fmt_bool(w.defined_on_z)}",
        f"undefined rotation: residual {res['undefined_map']:.2e}, unitarity {res['undefined_unitarity']:.2e}, "
        f"defined on target: {_fmt_bool(w.defined_on_y)}",
        f"random rotations defined: {vidp.random_defined}/{vidp.trials}",
        f"totals with witness pair: defined {vidp.defined}, undefined {vidp.undefined}",
    ]
    lines += [f"{k}: {_fmt_bool(val)}" for k, val in checks.items()]
    lines.append(f"all_verified: {_fmt_bool(ok)}")
    _emit(report, args.json, lines)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contextuality", description="Contextuality and Kochen-Specker verification tools."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the run report as JSON")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")
    common.add_argument(
        "--format", choices=["auto", "structured", "plain"], default="auto", help="input file format"
    )

    p = sub.add_parser("ks-check", parents=[common], help="search for a global {0,1} valuation")
    p.add_argument("rayset", help=f"ray-set file or built-in name ({', '.join(BUILTIN_NAMES)})")
    p.add_argument(
        "--style", choices=[s.value for s in ConstraintStyle], default=ConstraintStyle.BASES_PLUS_PAIRS.value
    )
    p.add_argument("--export-cnf", metavar="PATH", help="also write the problem in DIMACS CNF")
    p.set_defaults(func=cmd_ks_check)

    p = sub.add_parser("ndi-demo", parents=[common], help="exhibit the rotation witness pair")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_ndi_demo)

    p = sub.add_parser("commute-check", parents=[common], help="compare two maximal contexts")
    p.add_argument("basis_a")
    p.add_argument("basis_b")
    p.set_defaults(func=cmd_commute_check)

    p = sub.add_parser("valuations", parents=[common], help="list local valuations of a basis")
    p.add_argument("basis")
    p.add_argument("--mode", choices=[m.value for m in ValuationMode], default=ValuationMode.FUNC.value)
    p.set_defaults(func=cmd_valuations)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (CliError, ContextualityError, OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
