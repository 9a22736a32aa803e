"""Command-line front end.

Exit codes: 0 partition (or success), 10 model / long-path certificate,
2 input or parse error, 3 size cap or search budget exceeded, 4 validation failure.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import gadgets, results
from .decompositions import (
    PATHWIDTH_CAP,
    TREEDEPTH_CAP,
    TREEWIDTH_CAP,
    TreeDecomposition,
    exact_pathwidth,
    exact_treedepth,
    exact_treewidth,
    read_td,
)
from .errors import BudgetExceeded, CapExceeded, CertificateError, GraphError
from .excluded_path import LongPath, decompose_excluded_path
from .excluded_tree import TreePartitionResult, decompose_excluded_tree, decompose_excluded_tree_theorem
from .graph import (
    Graph,
    Partition,
    check_product_embedding,
    complete_graph,
    format_graph,
    partition_to_product,
    product_embedding_to_partition,
    read_graph,
    strong_product,
)
from .minors import LONGEST_PATH_CAP, longest_path

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_INVALID = 4
EXIT_CERTIFICATE = 10

GADGET_CAP = 64


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_graph(path: str) -> Graph:
    try:
        return read_graph(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from None


def _decomposition(g: Graph, args) -> TreeDecomposition:
    if args.td_file:
        try:
            n, dec = read_td(args.td_file)
        except OSError as exc:
            raise CliError(f"cannot read {args.td_file}: {exc.strerror}", EXIT_PARSE) from None
        if n != g.n:
            raise CliError(f"decomposition is for {n} vertices, graph has {g.n}", EXIT_PARSE)
        return dec
    return exact_pathwidth(g, cap=args.max_n)[1].to_tree()


def _cap(args, default: int) -> int:
    if args.max_n is None:
        args.max_n = default
    return args.max_n


def _check_size(g: Graph, args):
    if g.n > _cap(args, PATHWIDTH_CAP):
        raise CapExceeded(f"graph has {g.n} vertices, --max-n is {args.max_n}")


def _emit(text: str, args):
    if args.out:
        results.atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _emit_doc(doc: dict, args) -> int:
    text = results.to_dot(doc) if args.format == "dot" else results.dumps(doc)
    _emit(text, args)
    if doc["verdicts"]["status"] != "ok":
        return EXIT_INVALID
    if doc["kind"] in ("tree-model", "long-path"):
        return EXIT_CERTIFICATE
    return EXIT_OK


def _seeded(args) -> dict:
    return {"seed": args.seed} if args.seed is not None else {}


def tree_document(g: Graph, dec: TreeDecomposition | None, h: int, d: int, root, extra: dict) -> dict:
    outcome = decompose_excluded_tree(g, dec, root, h, d)
    if isinstance(outcome, TreePartitionResult):
        return results.tree_partition_document(g, dec, outcome, extra)
    return results.model_document(g, outcome, {"h": h, "d": d, "root": root, **extra})


def cmd_decompose_tree(args) -> int:
    g = _load_graph(args.graph)
    _check_size(g, args)
    dec = _decomposition(g, args)
    if args.hd:
        h, d = args.hd
        if h < 1 or d < 2:
            raise CliError("--hd needs h >= 1 and d >= 2 (use decompose-path for paths)", EXIT_PARSE)
        doc = tree_document(g, dec, h, d, args.root, _seeded(args))
        return _emit_doc(doc, args)
    tree = _load_graph(args.tree_file)
    res = decompose_excluded_tree_theorem(g, tree, dec=dec, r=args.root, pathwidth_cap=args.max_n)
    extra = {"t": res.t, "tree_h": res.h, "tree_d": res.d, **_seeded(args)}
    if isinstance(res.outcome, TreePartitionResult):
        doc = results.tree_partition_document(g, dec, res.outcome, extra)
        doc["payload"]["part_bound"] = res.part_bound
    else:
        doc = results.model_document(g, res.outcome, {"h": res.h, "d": res.d, "root": args.root, **extra})
    return _emit_doc(doc, args)


def path_document(g: Graph, dec: TreeDecomposition, h: int, extra: dict) -> dict:
    outcome = decompose_excluded_path(g, dec, h)
    if isinstance(outcome, LongPath):
        return results.long_path_document(g, outcome, extra)
    return results.path_partition_document(g, dec, outcome, extra)


def cmd_decompose_path(args) -> int:
    g = _load_graph(args.graph)
    _check_size(g, args)
    if args.h < 1:
        raise CliError("--h must be positive", EXIT_PARSE)
    dec = _decomposition(g, args)
    return _emit_doc(path_document(g, dec, args.h, _seeded(args)), args)


def cmd_gadget(args) -> int:
    if args.h < 1 or args.c < 1:
        raise CliError("--h and --c must be positive", EXIT_PARSE)
    size = gadgets.gadget_size(args.h, args.c)
    if args.preview:
        _emit(json.dumps({"h": args.h, "c": args.c, "n": size}, sort_keys=True) + "\n", args)
        return EXIT_OK
    if size > _cap(args, GADGET_CAP):
        raise CapExceeded(f"gadget would have {size} vertices, --max-n is {args.max_n}")
    g, spine = gadgets.lower_bound_graph(args.h, args.c)
    if args.graph_out:
        results.atomic_write(args.graph_out, format_graph(g))
    report = gadgets.verify_gadget_claims(g, args.h, args.c)
    doc = results.gadget_document(g, spine, report, {"h": args.h, "c": args.c})
    return _emit_doc(doc, args)


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    code = EXIT_OK
    for path in args.documents:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from None
        except json.JSONDecodeError as exc:
            raise CliError(f"{path}: not JSON ({exc.msg})", EXIT_PARSE) from None
        problems = results.verify_document(doc, g)
        if problems:
            code = EXIT_INVALID
            print(f"{path}: FAILED")
            for p in problems:
                print(f"  - {p}")
        else:
            print(f"{path}: ok ({doc['kind']})")
    return code


def cmd_exact(args) -> int:
    g = _load_graph(args.graph)
    m = args.measure
    caps = {"pathwidth": PATHWIDTH_CAP, "treewidth": TREEWIDTH_CAP, "treedepth": TREEDEPTH_CAP,
            "longest-path": LONGEST_PATH_CAP, "clique-number": GADGET_CAP}
    cap = _cap(args, caps[m])
    if g.n > cap:
        raise CapExceeded(f"{m}: {g.n} vertices exceeds cap {cap}")
    if m == "pathwidth":
        value, pd = exact_pathwidth(g, cap=cap)
        witness = {"bags": results._sets(pd.bags)}
    elif m == "treewidth":
        value, td = exact_treewidth(g, cap=cap)
        witness = {"bags": results._sets(td.bags), "edges": [list(e) for e in td.edges]}
    elif m == "treedepth":
        value, forest = exact_treedepth(g, cap=cap)
        witness = {"parent": list(forest.parent)}
    elif m == "longest-path":
        path = longest_path(g, cap=cap)
        value, witness = len(path), {"path": path}
    else:
        value, witness = gadgets.clique_number(g), {}
    doc = {"input": results.fingerprint(g), "measure": m, "value": value, "witness": witness}
    _emit(results.dumps(doc), args)
    return EXIT_OK


def cmd_product(args) -> int:
    g = _load_graph(args.graph)
    if args.result is None:
        if args.c is None or args.c < 1:
            raise CliError("product needs --c >= 1 or --result", EXIT_PARSE)
        _emit(format_graph(strong_product(g, complete_graph(args.c))), args)
        return EXIT_OK
    with open(args.result) as fh:
        doc = json.load(fh)
    if doc.get("kind") not in ("tree-partition", "path-partition"):
        raise CliError("--result must hold a partition document", EXIT_PARSE)
    try:
        partition = Partition(g.n, tuple(frozenset(p) for p in doc["payload"]["parts"]))
    except GraphError as exc:
        raise CliError(f"partition in {args.result} is invalid: {exc}", EXIT_INVALID) from None
    h, width, emb = partition_to_product(g, partition)
    problems = check_product_embedding(g, h, width, emb)
    back = product_embedding_to_partition(g, emb)
    if sorted(map(sorted, back.parts)) != sorted(map(sorted, partition.parts)):
        problems.append("partition read back from the embedding differs")
    if back.width > width:
        problems.append(f"read-back width {back.width} exceeds {width}")
    if args.c is not None and width > args.c:
        problems.append(f"partition width {width} exceeds --c {args.c}")
    report = {
        "input": results.fingerprint(g),
        "quotient_n": h.n,
        "width": width,
        "embedding": {str(v): list(emb[v]) for v in sorted(emb)},
        "problems": problems,
        "status": "ok" if not problems else "failed",
    }
    _emit(results.dumps(report), args)
    return EXIT_OK if not problems else EXIT_INVALID


def _batch_one(job: tuple) -> tuple[int, str, str]:
    i, h, d, n, p, seed, screened, max_n = job
    if screened:
        g = gadgets.random_screened_instance(h, d, n, p, seed)
    else:
        g = gadgets.random_connected_graph(n, p, random.Random(seed))
    dec = exact_pathwidth(g, cap=max_n)[1].to_tree()
    doc = tree_document(g, dec, h, d, 0, {"seed": seed})
    return i, format_graph(g), results.dumps(doc)


def cmd_batch(args) -> int:
    h, d = args.hd
    if h < 1 or d < 2:
        raise CliError("--hd needs h >= 1 and d >= 2", EXIT_PARSE)
    if args.n > _cap(args, PATHWIDTH_CAP):
        raise CapExceeded(f"--n {args.n} exceeds --max-n {args.max_n}")
    os.makedirs(args.out_dir, exist_ok=True)
    seed = args.seed or 0
    jobs = [(i, h, d, args.n, args.p, seed * 1_000_003 + i, args.screened, args.max_n)
            for i in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outputs = list(pool.map(_batch_one, jobs))
    else:
        outputs = [_batch_one(j) for j in jobs]
    summary = {"kinds": {}, "instances": []}
    for i, graph_text, doc_text in sorted(outputs):
        results.atomic_write(os.path.join(args.out_dir, f"graph_{i:04d}.txt"), graph_text)
        results.atomic_write(os.path.join(args.out_dir, f"result_{i:04d}.json"), doc_text)
        kind = json.loads(doc_text)["kind"]
        summary["kinds"][kind] = summary["kinds"].get(kind, 0) + 1
        summary["instances"].append({"index": i, "kind": kind})
    results.atomic_write(os.path.join(args.out_dir, "summary.json"), results.dumps(summary))
    print(json.dumps(summary["kinds"], sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here (atomically) instead of stdout")
    common.add_argument("--max-n", type=int, help="size cap for exact solvers (default depends on the command)")
    common.add_argument("--seed", type=int, help="seed recorded in the result parameters")

    parser = argparse.ArgumentParser(prog="tmpk", description="Certified tree-minor decompositions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose-tree", parents=[common], help="partition or T-model certificate")
    p.add_argument("graph")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--hd", type=int, nargs=2, metavar=("H", "D"), help="exclude the complete tree T_{h,d}")
    which.add_argument("--tree-file", help="exclude an arbitrary tree (graph file)")
    p.add_argument("--root", type=int, help="root vertex (default 0)")
    p.add_argument("--td-file", help="tree-decomposition in PACE .td format")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_decompose_tree)

    p = sub.add_parser("decompose-path", parents=[common], help="partition or long-path certificate")
    p.add_argument("graph")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--td-file")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_decompose_path)

    p = sub.add_parser("gadget", parents=[common], help="lower-bound construction and its report")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--graph-out", help="also write the gadget graph here")
    p.add_argument("--preview", action="store_true", help="only print the vertex count")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("verify", help="re-validate result documents against their graph")
    p.add_argument("graph")
    p.add_argument("documents", nargs="+")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("exact", parents=[common], help="exact width parameters")
    p.add_argument("graph")
    p.add_argument("--measure", required=True,
                   choices=("pathwidth", "treewidth", "treedepth", "longest-path", "clique-number"))
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("product", parents=[common], help="H x K_c, or check a partition as a product embedding")
    p.add_argument("graph")
    p.add_argument("--c", type=int)
    p.add_argument("--result", help="partition document for the graph")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("batch", parents=[common], help="run the tree engine over random instances")
    p.add_argument("--hd", type=int, nargs=2, metavar=("H", "D"), required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=float, default=0.2)
    p.add_argument("--screened", action="store_true", help="only T_{h,d}-minor-free instances")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"tmpk: {exc}", file=sys.stderr)
        return exc.code
    except (CapExceeded, BudgetExceeded) as exc:
        print(f"tmpk: {exc}", file=sys.stderr)
        return EXIT_CAP
    except CertificateError as exc:
        print(f"tmpk: validation failure: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GraphError as exc:
        print(f"tmpk: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
