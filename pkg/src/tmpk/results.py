"""JSON result documents: canonical serialization, fingerprints and re-validation."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile

from .decompositions import EliminationForest, TreeDecomposition
from .errors import GraphError
from .excluded_path import (
    LongPath,
    PathPartitionResult,
    validate_long_path,
    validate_path_partition,
)
from .excluded_tree import TreePartitionResult, validate_tree_partition
from .graph import Graph, MinorModel, RootedTree, format_graph, quotient_of_parts
from .minors import validate_model

FORMAT_VERSION = 1

KINDS = ("tree-partition", "tree-model", "path-partition", "long-path", "gadget-report")

VALIDATORS = {
    "tree-partition": "validate_tree_partition",
    "tree-model": "validate_model",
    "path-partition": "validate_path_partition",
    "long-path": "validate_long_path",
    "gadget-report": "verify_gadget_claims",
}


def fingerprint(g: Graph) -> dict:
    digest = hashlib.sha256(format_graph(g).encode()).hexdigest()
    return {"n": g.n, "m": g.m, "sha256": digest}


def _sets(seq) -> list[list[int]]:
    return [sorted(s) for s in seq]


def _decomposition_payload(dec: TreeDecomposition) -> dict:
    return {"bags": _sets(dec.bags), "edges": [list(e) for e in dec.edges]}


def _decomposition_from(payload: dict) -> TreeDecomposition:
    return TreeDecomposition(tuple(frozenset(b) for b in payload["bags"]),
                             tuple(tuple(e) for e in payload["edges"]))


def _verdict(name: str, problems: list[str]) -> dict:
    return {"validator": name, "status": "ok" if not problems else "failed", "problems": list(problems)}


def make_document(kind: str, g: Graph, parameters: dict, payload: dict, problems: list[str]) -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown result kind {kind!r}")
    params = {"h": None, "d": None, "c": None, "seed": None}
    params.update(parameters)
    return {
        "format": FORMAT_VERSION,
        "kind": kind,
        "input": fingerprint(g),
        "parameters": params,
        "payload": payload,
        "verdicts": _verdict(VALIDATORS[kind], problems),
    }


def tree_partition_document(g: Graph, dec: TreeDecomposition, res: TreePartitionResult,
                            parameters: dict) -> dict:
    payload = {
        "root": res.root,
        "parts": _sets(res.parts),
        "quotient_edges": [list(e) for e in res.quotient.edges],
        "quotient_bags": _sets(res.bags),
        "provenance": [list(p) for p in res.provenance],
        "width": res.width,
        "quotient_width": res.quotient_width,
        "decomposition": _decomposition_payload(dec),
    }
    params = {"h": res.h, "d": res.d, "root": res.root, **parameters}
    return make_document("tree-partition", g, params, payload, validate_tree_partition(g, dec, res))


def model_document(g: Graph, model: MinorModel, parameters: dict) -> dict:
    pattern = model.pattern
    payload = {
        "pattern_n": pattern.n,
        "pattern_edges": [list(e) for e in pattern.graph.edges],
        "pattern_root": pattern.root,
        "branch_sets": _sets(model.branch_sets),
    }
    return make_document("tree-model", g, parameters, payload, validate_model(g, pattern, model))


def path_partition_document(g: Graph, dec: TreeDecomposition, res: PathPartitionResult,
                            parameters: dict) -> dict:
    payload = {
        "parts": _sets(res.parts),
        "quotient_edges": [list(e) for e in res.quotient.edges],
        "forest_parent": list(res.forest.parent),
        "forest_height": res.forest.height,
        "provenance": [list(p) for p in res.provenance],
        "width": res.width,
        "decomposition": _decomposition_payload(dec),
    }
    params = {"h": res.h, **parameters}
    return make_document("path-partition", g, params, payload, validate_path_partition(g, dec, res))


def long_path_document(g: Graph, res: LongPath, parameters: dict) -> dict:
    params = {"h": res.h, **parameters}
    return make_document("long-path", g, params, {"path": list(res.path)}, validate_long_path(g, res))


def gadget_document(g: Graph, spine: list[int], report: dict, parameters: dict) -> dict:
    problems = [f"{key}: violated" for key in ("minor_free", "clique", "partitions")
                if report.get(key, {}).get("status") == "violated"]
    payload = {"spine": list(spine), "edges": [list(e) for e in g.edges], "report": report}
    return make_document("gadget-report", g, parameters, payload, problems)


# ---------------------------------------------------------------------------
# reading documents back


def rebuild(doc: dict, g: Graph):
    """Reconstruct the result object a document describes (for re-validation)."""
    kind, p, params = doc["kind"], doc["payload"], doc["parameters"]
    if kind == "tree-partition":
        parts = tuple(frozenset(x) for x in p["parts"])
        dec = _decomposition_from(p["decomposition"])
        res = TreePartitionResult(
            parts=parts,
            quotient=Graph(len(parts), [tuple(e) for e in p["quotient_edges"]]),
            bags=tuple(frozenset(b) for b in p["quotient_bags"]),
            provenance=tuple(tuple(x) for x in p["provenance"]),
            root=p["root"],
            h=params["h"],
            d=params["d"],
        )
        return dec, res
    if kind == "path-partition":
        parts = tuple(frozenset(x) for x in p["parts"])
        dec = _decomposition_from(p["decomposition"])
        res = PathPartitionResult(
            parts=parts,
            quotient=Graph(len(parts), [tuple(e) for e in p["quotient_edges"]]),
            forest=EliminationForest(tuple(p["forest_parent"])),
            provenance=tuple(tuple(x) for x in p["provenance"]),
            h=params["h"],
        )
        return dec, res
    if kind == "tree-model":
        pattern = RootedTree(Graph(p["pattern_n"], [tuple(e) for e in p["pattern_edges"]]), p["pattern_root"])
        return None, MinorModel(pattern, tuple(frozenset(b) for b in p["branch_sets"]))
    if kind == "long-path":
        return None, LongPath(tuple(p["path"]), params["h"])
    raise GraphError(f"cannot rebuild documents of kind {kind!r}")


def verify_document(doc: dict, g: Graph) -> list[str]:
    """Re-run the validator named in ``doc`` against ``g``; empty means the document holds."""
    problems = []
    if doc.get("input") != fingerprint(g):
        problems.append("input fingerprint does not match the graph")
    kind = doc.get("kind")
    if kind not in KINDS:
        return problems + [f"unknown kind {kind!r}"]
    if doc.get("verdicts", {}).get("validator") != VALIDATORS[kind]:
        problems.append("verdict block names the wrong validator")
    if kind == "gadget-report":
        edges = sorted(tuple(e) for e in doc["payload"]["edges"])
        if edges != list(g.edges):
            problems.append("gadget edges differ from the graph")
        return problems
    try:
        dec, res = rebuild(doc, g)
    except (KeyError, TypeError, ValueError) as exc:
        return problems + [f"malformed payload: {exc}"]
    if kind == "tree-partition":
        problems += validate_tree_partition(g, dec, res)
        if quotient_of_parts(g, res.parts) != res.quotient:
            problems.append("quotient edges do not match the parts")
    elif kind == "path-partition":
        problems += validate_path_partition(g, dec, res)
    elif kind == "tree-model":
        problems += validate_model(g, res.pattern, res)
    else:
        problems += validate_long_path(g, res)
    return problems


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def atomic_write(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmpk-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_dot(doc: dict) -> str:
    """Graphviz rendering: the quotient for partitions, the graph otherwise."""
    kind, p = doc["kind"], doc["payload"]
    lines = [f'graph "{kind}" {{', "  node [shape=box];"]
    if kind in ("tree-partition", "path-partition"):
        for i, part in enumerate(p["parts"]):
            label = "{" + ",".join(map(str, part)) + "}"
            lines.append(f'  p{i} [label="P{i} {label}"];')
        lines.extend(f"  p{a} -- p{b};" for a, b in p["quotient_edges"])
    elif kind == "tree-model":
        for x, bs in enumerate(p["branch_sets"]):
            lines.append(f'  t{x} [label="t{x} {{{",".join(map(str, bs))}}}"];')
        lines.extend(f"  t{a} -- t{b};" for a, b in p["pattern_edges"])
    elif kind == "long-path":
        path = p["path"]
        lines.extend(f'  v{v} [label="{v}"];' for v in path)
        lines.extend(f"  v{a} -- v{b};" for a, b in zip(path, path[1:]))
    else:
        lines.extend(f"  v{a} -- v{b};" for a, b in p["edges"])
    lines.append("}")
    return "\n".join(lines) + "\n"
