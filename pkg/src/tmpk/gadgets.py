"""Instance generators: the clique-forcing lower-bound graphs and random screened graphs."""
from __future__ import annotations

import random
from dataclasses import dataclass

import networkx as nx

from .errors import BudgetExceeded, GraphError
from .graph import Graph, complete_dary_tree, quotient_of_parts
from .minors import find_rooted_tree_model

SPINE_READING = {
    "h=1": "path on c+1 vertices",
    "h>=2": "spine path with c+1 edges (c+2 vertices)",
}


@dataclass(frozen=True)
class GadgetSpec:
    h: int
    c: int

    def __post_init__(self):
        if self.h < 1 or self.c < 1:
            raise GraphError("gadget needs h >= 1 and c >= 1")

    @property
    def vertex_count(self) -> int:
        return gadget_size(self.h, self.c)


def gadget_size(h: int, c: int) -> int:
    n = c + 1
    for _ in range(h - 1):
        n = (c + 2) + (c + 1) * 2 * c * n
    return n


def lower_bound_graph(h: int, c: int) -> tuple[Graph, list[int]]:
    """The graph forcing a ``2h``-clique in every host ``H`` with ``G`` in ``H x K_c``.

    Returns the graph and its spine path (vertex ids in path order).  For
    ``h >= 2`` every spine edge carries ``2c`` copies of the ``(h-1)`` graph,
    each joined completely to both ends of the edge.
    """
    GadgetSpec(h, c)
    if h == 1:
        return Graph(c + 1, ((i, i + 1) for i in range(c))), list(range(c + 1))
    inner, _ = lower_bound_graph(h - 1, c)
    spine = list(range(c + 2))
    edges = [(i, i + 1) for i in range(c + 1)]
    n = c + 2
    for v, w in zip(spine, spine[1:]):
        for _ in range(2 * c):
            edges.extend((a + n, b + n) for a, b in inner.edges)
            for x in range(n, n + inner.n):
                edges.append((v, x))
                edges.append((w, x))
            n += inner.n
    return Graph(n, edges), spine


def to_networkx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(g.vertices())
    out.add_edges_from(g.edges)
    return out


def clique_number(g: Graph) -> int:
    if g.n == 0:
        return 0
    clique, _ = nx.max_weight_clique(to_networkx(g), weight=None)
    return len(clique)


def bounded_partitions(items: list[int], cap: int):
    """Set partitions of ``items`` whose blocks have at most ``cap`` elements."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in bounded_partitions(rest, cap):
        yield [[first]] + part
        for i, block in enumerate(part):
            if len(block) < cap:
                yield part[:i] + [[first] + block] + part[i + 1:]


def verify_gadget_claims(g: Graph, h: int, c: int, minor_cap: int = 40,
                         partition_cap: int = 9, max_steps: int | None = None) -> dict:
    """Check the lower-bound claims on ``g`` as far as the exact oracles reach.

    Every sub-check reports ``ok``, ``violated`` or ``skipped`` (with the reason).
    """
    report: dict = {"h": h, "c": c, "n": g.n, "m": g.m, "spine_reading": dict(SPINE_READING)}

    pattern = complete_dary_tree(h, 3)
    if g.n > minor_cap:
        report["minor_free"] = {"status": "skipped", "reason": f"n={g.n} exceeds cap {minor_cap}"}
    else:
        try:
            model = find_rooted_tree_model(g, pattern, max_steps=max_steps)
        except BudgetExceeded as exc:
            report["minor_free"] = {"status": "skipped", "reason": str(exc)}
        else:
            if model is None:
                report["minor_free"] = {"status": "ok", "pattern": f"T_{{{h},3}}"}
            else:
                report["minor_free"] = {
                    "status": "violated",
                    "branch_sets": [sorted(b) for b in model.branch_sets],
                }

    omega = clique_number(g)
    report["clique"] = {
        "clique_number": omega,
        "required": 2 * h,
        "status": "ok" if omega >= 2 * h else "violated",
    }

    if c == 1:
        # width-1 partitions are the singleton partition, whose quotient is g
        report["partitions"] = {
            "status": report["clique"]["status"],
            "method": "singleton partition (quotient = G)",
            "checked": 1,
        }
    elif g.n > partition_cap:
        report["partitions"] = {"status": "skipped", "reason": f"n={g.n} exceeds cap {partition_cap}"}
    else:
        checked = 0
        worst = None
        for blocks in bounded_partitions(list(g.vertices()), c):
            checked += 1
            size = clique_number(quotient_of_parts(g, blocks))
            if size < 2 * h:
                worst = {"parts": sorted(sorted(b) for b in blocks), "clique_number": size}
                break
        report["partitions"] = {
            "status": "ok" if worst is None else "violated",
            "method": f"all partitions with parts of size <= {c}",
            "checked": checked,
        }
        if worst is not None:
            report["partitions"]["counterexample"] = worst
    return report


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_connected_graph(n: int, p: float, rng: random.Random, attempts: int = 100_000) -> Graph:
    for _ in range(attempts):
        g = random_graph(n, p, rng)
        if g.is_connected():
            return g
    raise BudgetExceeded(f"no connected G({n}, {p}) sample within {attempts} attempts")


def random_screened_instance(h: int, d: int, n: int, edge_probability: float, seed: int,
                             attempts: int = 10_000, max_steps: int | None = None) -> Graph:
    """Random connected graph without a ``T_{h,d}`` minor, deterministic in ``seed``."""
    rng = random.Random(seed)
    pattern = complete_dary_tree(h, d)
    for _ in range(attempts):
        g = random_graph(n, edge_probability, rng)
        if not g.is_connected():
            continue
        if find_rooted_tree_model(g, pattern, max_steps=max_steps) is None:
            return g
    raise BudgetExceeded(f"no T_{{{h},{d}}}-minor-free sample within {attempts} attempts")
