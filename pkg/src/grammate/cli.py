"""Command-line frontend.

Every subcommand reads matrices in the .mtxt text format and reports either
plain text or (where it makes sense) JSON with a "schema": 1 field.  Exit
codes: 0 affirmative, 3 negative verdict, 2 usage or input error, 4 a search
hit its cap and the question is undecided.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import combinators, gale_ryser, iso, numerics, oracle
from .gram import is_gram_pair, convertibility
from .matrix_core import (
    BinaryMatrix,
    MatrixFormatError,
    load_matrix,
    rank_exact,
    save_matrix,
    serialize_matrix,
)
from .rank_forms import (
    NotRealizableError,
    classify_rank1,
    classify_rank2,
    rank1_complete,
    rank1_gram_data,
    rank2_complete,
    rank2_gram_data,
    rank2_realizable,
    rank2_witness_check,
    NotConvertibleError,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO = 3
EXIT_UNDECIDED = 4


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _load_binary(path) -> BinaryMatrix:
    M = load_matrix(path)
    if not isinstance(M, BinaryMatrix):
        raise UsageError(f"{path}: expected a (0,1) matrix")
    return M


def _load_gram(path) -> np.ndarray:
    """Gram matrices have entries beyond {-1,0,1}, so they get their own
    reader for the same line format."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines()
                 if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MatrixFormatError("empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise MatrixFormatError(f"malformed dimension line: {lines[0]!r}")
    rows, cols = int(head[0]), int(head[1])
    if len(lines) - 1 != rows:
        raise MatrixFormatError(f"expected {rows} rows, found {len(lines) - 1}")
    out = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != cols:
            raise MatrixFormatError(f"row length mismatch: {ln!r}")
        out.append([int(p) for p in parts])
    return np.array(out, dtype=np.int64)


def _emit_json(payload: dict) -> None:
    print(json.dumps({"schema": 1, **payload}))


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"bad integer list: {text!r}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    A = _load_binary(args.A)
    B = _load_binary(args.B)
    if A.shape != B.shape:
        raise UsageError("dimension mismatch")
    pair = is_gram_pair(A, B)
    if args.json:
        _emit_json({"command": "verify", "mates": pair is not None,
                    "diff_rank": None if pair is None else pair.diff_rank})
    elif pair is None:
        print("not Gram mates")
    else:
        print(f"Gram mates (difference rank {pair.diff_rank})")
    return EXIT_OK if pair is not None else EXIT_NO


def cmd_convertible(args) -> int:
    pair = is_gram_pair(_load_binary(args.A), _load_binary(args.B))
    if pair is None:
        raise UsageError("not Gram mates")
    rep = convertibility(pair, tol=args.tol)
    values = [] if rep.gram_singular is None else list(rep.gram_singular.values)
    if args.json:
        _emit_json({"command": "convertible", "convertible": rep.convertible,
                    "checks": rep.checks, "gram_singular_values": values})
    else:
        print(f"convertible: {'yes' if rep.convertible else 'no'}")
        width = max(len(n) for n in rep.checks)
        for name, ok in rep.checks.items():
            print(f"  {name:<{width}}  {'yes' if ok else 'no'}")
        if values:
            print("gram singular values: " + " ".join(_fmt(v) for v in values))
    return EXIT_OK if rep.convertible else EXIT_NO


def _classify(E):
    r = rank_exact(E)
    if r == 1:
        f = classify_rank1(E)
        if f is not None:
            return r, f
    elif r == 2:
        f = classify_rank2(E)
        if f is not None:
            return r, f
    return r, None


def cmd_classify(args) -> int:
    E = load_matrix(args.E)
    r, form = _classify(E)
    if form is None:
        if args.json:
            _emit_json({"command": "classify", "rank": r, "form": None})
        else:
            print(f"rank {r}, no canonical form")
        return EXIT_NO
    if r == 1:
        if args.json:
            _emit_json({"command": "classify", "rank": 1,
                        "indices": {"k1": form.k1, "k2": form.k2}, "realizable": True})
        else:
            print(f"rank 1, k1={form.k1} k2={form.k2}, realizable")
        return EXIT_OK
    ok = rank2_realizable(form)
    idx = form.as_dict()
    if args.json:
        _emit_json({"command": "classify", "rank": 2, "form": form.mtype,
                    "indices": idx, "realizable": ok})
    else:
        pretty = " ".join(f"{n}={v}" for n, v in idx.items())
        print(f"rank 2, {form.mtype}, {pretty}, "
              f"{'realizable' if ok else 'not realizable'}")
    return EXIT_OK if ok else EXIT_NO


def cmd_complete(args) -> int:
    E = load_matrix(args.E)
    r, form = _classify(E)
    if form is None:
        print(f"rank {r}, no canonical form")
        return EXIT_NO
    try:
        A = rank1_complete(form) if r == 1 else rank2_complete(form)
    except NotRealizableError:
        print("not realizable")
        return EXIT_NO
    if args.out:
        save_matrix(A, args.out)
    else:
        sys.stdout.write(serialize_matrix(A))
    return EXIT_OK


def cmd_gram_data(args) -> int:
    E = load_matrix(args.E)
    r, form = _classify(E)
    if form is None:
        print(f"rank {r}, no canonical form")
        return EXIT_NO
    if r == 1:
        rep = rank1_gram_data(form)
    elif form.mtype == "M5":
        if not args.witness:
            raise UsageError("M5 Gram data needs --witness")
        res = rank2_witness_check(_load_binary(args.witness), form)
        ok, profile = res if isinstance(res, tuple) else (res, None)
        if not ok or profile is None:
            print("witness rejected")
            return EXIT_NO
        try:
            rep = rank2_gram_data(form, profile)
        except NotConvertibleError:
            print("not convertible")
            return EXIT_NO
    else:
        rep = rank2_gram_data(form)
    if args.json:
        _emit_json({"command": "gram-data", "values": [float(v) for v in rep.values],
                    "source": rep.source})
    else:
        print("gram singular values: " + " ".join(_fmt(v) for v in rep.values))
        print(f"source: {rep.source}")
    return EXIT_OK


def cmd_urs(args) -> int:
    R = _int_list(args.rows)
    S = _int_list(args.cols)
    try:
        M = gale_ryser.construct_urs(R, S)
    except gale_ryser.InfeasibleError:
        print("infeasible")
        return EXIT_NO
    sys.stdout.write(serialize_matrix(M))
    return EXIT_OK


_CONSTRUCT_ARITY = {
    "complement": 2, "dirsum": 4, "join": 4, "kron": 4,
    "kron-swap": 2, "block-swap": 2,
}


def cmd_construct(args) -> int:
    mats = [_load_binary(p) for p in args.inputs]
    if len(mats) != _CONSTRUCT_ARITY[args.op]:
        raise UsageError(
            f"--op {args.op} takes {_CONSTRUCT_ARITY[args.op]} input files")
    try:
        if args.op == "block-swap":
            pair = combinators.block_swap_pair(mats[0], mats[1])
        else:
            p1 = is_gram_pair(mats[0], mats[1])
            if p1 is None:
                raise UsageError("first input pair is not Gram mates")
            if args.op == "complement":
                pair = combinators.complement_pair(p1)
            elif args.op == "kron-swap":
                pair = combinators.kron_swap(p1)
            else:
                p2 = is_gram_pair(mats[2], mats[3])
                if p2 is None:
                    raise UsageError("second input pair is not Gram mates")
                pair = {"dirsum": combinators.direct_sum_pair,
                        "join": combinators.join_pair,
                        "kron": combinators.kron_pair}[args.op](p1, p2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out_prefix:
        save_matrix(pair.A, args.out_prefix + "_A.mtxt")
        save_matrix(pair.B, args.out_prefix + "_B.mtxt")
    else:
        sys.stdout.write(serialize_matrix(pair.A))
        print()
        sys.stdout.write(serialize_matrix(pair.B))
    return EXIT_OK


def _report_witness(w: iso.IsoWitness) -> None:
    print("isomorphic")
    print("P: " + " ".join(str(i) for i in w.P.image))
    print("Q: " + " ".join(str(i) for i in w.Q.image))


def cmd_isomorphic(args) -> int:
    A = _load_binary(args.A)
    B = _load_binary(args.B)
    if args.distinct_sv:
        pair = is_gram_pair(A, B)
        if pair is None:
            raise UsageError("not Gram mates")
        try:
            verdict = iso.iso_distinct_sv(pair, rel_tol=args.rel_tol, node_cap=args.cap)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        verdict = iso.are_isomorphic(A, B, node_cap=args.cap)
    if isinstance(verdict, iso.IsoWitness):
        _report_witness(verdict)
        return EXIT_OK
    if verdict == iso.UNDECIDED:
        print(iso.UNDECIDED)
        return EXIT_UNDECIDED
    print("non-isomorphic")
    return EXIT_NO


def cmd_fixable(args) -> int:
    pair = is_gram_pair(_load_binary(args.A), _load_binary(args.B))
    if pair is None:
        raise UsageError("not Gram mates")
    try:
        ctx = iso.remaining_context(pair)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    verdict = iso.is_fixable(ctx, node_cap=args.cap)
    if verdict is True:
        print("fixable")
        return EXIT_OK
    if verdict == iso.UNDECIDED:
        print(iso.UNDECIDED)
        return EXIT_UNDECIDED
    print("not fixable")
    return EXIT_NO


def cmd_enumerate(args) -> int:
    try:
        pairs = oracle.enumerate_gram_pairs(
            args.M, args.N,
            row_sums_filter=_int_list(args.rowsums) if args.rowsums else None,
            col_sums_filter=_int_list(args.colsums) if args.colsums else None,
            diff_rank=args.rank,
        )
    except oracle.OracleCapError as exc:
        print(str(exc))
        return EXIT_UNDECIDED
    if args.json:
        _emit_json({"command": "enumerate", "count": len(pairs),
                    "pairs": [{"A": p.A.int64().tolist(), "B": p.B.int64().tolist(),
                               "diff_rank": p.diff_rank} for p in pairs]})
        return EXIT_OK
    print(f"pairs: {len(pairs)}")
    for i, p in enumerate(pairs):
        print(f"pair {i} (difference rank {p.diff_rank}):")
        sys.stdout.write(serialize_matrix(p.A))
        sys.stdout.write(serialize_matrix(p.B))
    return EXIT_OK


def cmd_mates_of(args) -> int:
    A = _load_binary(args.A)
    try:
        mates = oracle.enumerate_mates_of(A, node_cap=args.cap)
    except oracle.OracleCapError as exc:
        print(str(exc))
        return EXIT_UNDECIDED
    print(f"mates: {len(mates)}")
    for M in mates:
        sys.stdout.write(serialize_matrix(M))
    return EXIT_OK if mates else EXIT_NO


def cmd_reconstruct(args) -> int:
    Gr = _load_gram(args.grow)
    Gc = _load_gram(args.gcol)
    try:
        found = numerics.reconstruct_from_grams(Gr, Gc, tol=args.tol)
    except numerics.SpectraMismatchError:
        print("none")
        return EXIT_NO
    except (numerics.DegenerateSpectrumError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if not found:
        print("none")
        return EXIT_NO
    for i, M in enumerate(found):
        if i:
            print()
        sys.stdout.write(serialize_matrix(M))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="grammate",
        description="Decide, classify, construct, and audit Gram mates.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        return p

    p = add("verify", cmd_verify, help="check whether two matrices are Gram mates")
    p.add_argument("A"); p.add_argument("B")
    p.add_argument("--json", action="store_true")

    p = add("convertible", cmd_convertible,
            help="evaluate the convertibility conditions for a Gram pair")
    p.add_argument("A"); p.add_argument("B")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--json", action="store_true")

    p = add("classify", cmd_classify,
            help="classify a rank-1 or rank-2 difference matrix")
    p.add_argument("E")
    p.add_argument("--json", action="store_true")

    p = add("complete", cmd_complete, help="build a witness A with (A, A+E) Gram mates")
    p.add_argument("E")
    p.add_argument("--out", default=None)

    p = add("gram-data", cmd_gram_data,
            help="closed-form Gram singular data of a difference matrix")
    p.add_argument("E")
    p.add_argument("--witness", default=None)
    p.add_argument("--json", action="store_true")

    p = add("urs", cmd_urs, help="binary matrix with given row and column sums")
    p.add_argument("--rows", required=True)
    p.add_argument("--cols", required=True)

    p = add("construct", cmd_construct, help="combine Gram pairs into new ones")
    p.add_argument("--op", required=True, choices=sorted(_CONSTRUCT_ARITY))
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out-prefix", default=None)

    p = add("isomorphic", cmd_isomorphic,
            help="search for P, Q with B = PAQ")
    p.add_argument("A"); p.add_argument("B")
    p.add_argument("--cap", type=int, default=iso.DEFAULT_NODE_CAP)
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--distinct-sv", action="store_true")

    p = add("fixable", cmd_fixable,
            help="fixability of a rank-1 Gram pair")
    p.add_argument("A"); p.add_argument("B")
    p.add_argument("--cap", type=int, default=iso.DEFAULT_NODE_CAP)

    p = add("enumerate", cmd_enumerate, help="all Gram pairs of a given shape")
    p.add_argument("M", type=int); p.add_argument("N", type=int)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--rowsums", default=None)
    p.add_argument("--colsums", default=None)
    p.add_argument("--json", action="store_true")

    p = add("mates-of", cmd_mates_of, help="every mate of a given matrix")
    p.add_argument("A")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_MATE_NODE_CAP)

    p = add("reconstruct", cmd_reconstruct,
            help="all (0,1) matrices with the given Gram matrices")
    p.add_argument("--grow", required=True)
    p.add_argument("--gcol", required=True)
    p.add_argument("--tol", type=float, default=None)

    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (UsageError, MatrixFormatError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
