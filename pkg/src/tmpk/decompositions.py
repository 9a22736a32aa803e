"""Tree/path decompositions, elimination forests and exact width solvers.

The solvers are exponential and meant for desk-scale oracles: each one has
a vertex cap and raises :class:`CapExceeded` instead of degrading to a
heuristic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, GraphError
from .graph import Graph, bits, lowest, to_mask

PATHWIDTH_CAP = 20
TREEWIDTH_CAP = 16
TREEDEPTH_CAP = 14


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by the nodes ``0..k-1`` of a tree; rooted at node 0."""

    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        object.__setattr__(self, "edges", tuple(sorted((min(e), max(e)) for e in self.edges)))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @cached_property
    def index_tree(self) -> Graph:
        return Graph(len(self.bags), self.edges)

    def index_tree_problems(self) -> list[str]:
        k = len(self.bags)
        if k == 0:
            return ["decomposition has no bags"]
        try:
            t = self.index_tree
        except GraphError as exc:
            return [f"index tree: {exc}"]
        if t.m != k - 1 or not t.is_connected():
            return ["index graph is not a tree"]
        return []

    @cached_property
    def parent(self) -> tuple:
        t = self.index_tree
        parent: list = [None] * t.n
        seen = {0}
        order = [0]
        for u in order:
            for w in t.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    order.append(w)
        return tuple(parent)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        depth = [0] * len(self.bags)
        for x in self.bfs_order:
            if self.parent[x] is not None:
                depth[x] = depth[self.parent[x]] + 1
        return tuple(depth)

    @cached_property
    def bfs_order(self) -> tuple[int, ...]:
        t = self.index_tree
        order = [0]
        seen = {0}
        for u in order:
            for w in t.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        return tuple(order)

    @cached_property
    def bag_masks(self) -> tuple[int, ...]:
        return tuple(to_mask(b) for b in self.bags)

    @cached_property
    def subtree_masks(self) -> tuple[int, ...]:
        """Union of the bags in the subtree below each node."""
        masks = list(self.bag_masks)
        for x in reversed(self.bfs_order):
            p = self.parent[x]
            if p is not None:
                masks[p] |= masks[x]
        return tuple(masks)

    def deepest_first(self) -> list[int]:
        return sorted(range(len(self.bags)), key=lambda x: (-self.depth[x], x))

    def restrict(self, vertices: Iterable[int]) -> "TreeDecomposition":
        keep = frozenset(vertices)
        return TreeDecomposition(tuple(b & keep for b in self.bags), self.edges)

    def union_of(self, nodes: Iterable[int]) -> frozenset[int]:
        return frozenset().union(*(self.bags[x] for x in nodes))


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def stripped(self) -> "PathDecomposition":
        return PathDecomposition(tuple(b for b in self.bags if b))

    def to_tree(self) -> TreeDecomposition:
        bags = self.bags or (frozenset(),)
        return TreeDecomposition(bags, tuple((i, i + 1) for i in range(len(bags) - 1)))


@dataclass(frozen=True)
class EliminationForest:
    """Rooted forest given by a parent array (``None`` marks a root)."""

    parent: tuple
    height: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "parent", tuple(self.parent))
        object.__setattr__(self, "height", _forest_height(self.parent))

    def ancestors(self, v: int) -> list[int]:
        out = []
        while self.parent[v] is not None:
            v = self.parent[v]
            out.append(v)
        return out


def _forest_height(parent: Sequence) -> int:
    n = len(parent)
    height = 0
    for v in range(n):
        steps, u = 1, v
        while parent[u] is not None:
            u = parent[u]
            steps += 1
            if steps > n:
                return -1
        height = max(height, steps)
    return height


# ---------------------------------------------------------------------------
# validators

def validate_tree_decomposition(g: Graph, d: TreeDecomposition) -> list[str]:
    """Violations of the two tree-decomposition conditions; empty list means ok."""
    problems = d.index_tree_problems()
    if problems:
        return problems
    for x, bag in enumerate(d.bags):
        stray = [v for v in bag if not 0 <= v < g.n]
        if stray:
            problems.append(f"bag {x} holds non-vertices {sorted(stray)}")
    masks = d.bag_masks
    for u, v in g.edges:
        pair = 1 << u | 1 << v
        if not any(m & pair == pair for m in masks):
            problems.append(f"edge {u}-{v} is not covered by any bag")
    t = d.index_tree
    for v in g.vertices():
        occ = to_mask(x for x, m in enumerate(masks) if m >> v & 1)
        if not occ:
            problems.append(f"vertex {v} is in no bag")
        elif not t.is_connected_mask(occ):
            problems.append(f"bags containing vertex {v} do not form a subtree")
    return problems


def validate_path_decomposition(g: Graph, bags: Sequence[Iterable[int]]) -> list[str]:
    return validate_tree_decomposition(g, PathDecomposition(tuple(bags)).to_tree())


def validate_elimination_forest(g: Graph, forest: EliminationForest) -> list[str]:
    if len(forest.parent) != g.n:
        return [f"forest spans {len(forest.parent)} vertices, graph has {g.n}"]
    if forest.height < 0:
        return ["parent array contains a cycle"]
    problems = []
    for u, v in g.edges:
        if u not in forest.ancestors(v) and v not in forest.ancestors(u):
            problems.append(f"edge {u}-{v} does not join an ancestor-descendant pair")
    return problems


# ---------------------------------------------------------------------------
# exact pathwidth: vertex separation over prefixes

def _check_cap(g: Graph, cap: int, what: str):
    if g.n > cap:
        raise CapExceeded(f"{what}: {g.n} vertices exceeds cap {cap}")


def vertex_separation_bags(g: Graph, order: Sequence[int]) -> list[frozenset[int]]:
    """Path-decomposition bags induced by a linear vertex order."""
    pos = {v: i for i, v in enumerate(order)}
    last = [pos[v] for v in range(g.n)]
    for u, v in g.edges:
        last[u] = max(last[u], pos[v])
        last[v] = max(last[v], pos[u])
    return [frozenset(u for u in order[: i + 1] if last[u] >= i) for i in range(len(order))]


def exact_pathwidth(g: Graph, cap: int = PATHWIDTH_CAP) -> tuple[int, PathDecomposition]:
    _check_cap(g, cap, "exact_pathwidth")
    n = g.n
    if n == 0:
        return -1, PathDecomposition(())
    size = 1 << n
    full = size - 1
    masks = np.arange(size, dtype=np.int64)
    outside = full & ~masks
    boundary = np.zeros(size, dtype=np.int16)
    for v in range(n):
        inside = (masks >> v) & 1
        leaks = (outside & g.adj[v]) != 0
        boundary += (inside.astype(bool) & leaks).astype(np.int16)

    popcount = np.zeros(size, dtype=np.int16)
    for v in range(n):
        popcount += ((masks >> v) & 1).astype(np.int16)

    best = np.zeros(size, dtype=np.int16)
    choice = np.zeros(size, dtype=np.int8)
    layer_order = np.argsort(popcount, kind="stable")
    starts = np.searchsorted(popcount[layer_order], np.arange(n + 2))
    big = np.int16(n + 1)
    for k in range(1, n + 1):
        idx = layer_order[starts[k]:starts[k + 1]]
        cur = np.full(idx.shape, big, dtype=np.int16)
        arg = np.zeros(idx.shape, dtype=np.int8)
        for v in range(n):
            has = ((idx >> v) & 1).astype(bool)
            cand = np.where(has, best[idx ^ (1 << v)], big)
            better = cand < cur
            cur = np.where(better, cand, cur)
            arg = np.where(better, np.int8(v), arg)
        best[idx] = np.maximum(cur, boundary[idx])
        choice[idx] = arg

    order = []
    s = full
    while s:
        v = int(choice[s])
        order.append(v)
        s ^= 1 << v
    order.reverse()
    width = int(best[full])
    pd = PathDecomposition(tuple(vertex_separation_bags(g, order)))
    assert pd.width == width, (pd.width, width)
    return width, pd


# ---------------------------------------------------------------------------
# exact treewidth: elimination orderings over subsets

def _reach_outside(g: Graph, eliminated: int, v: int) -> int:
    """Vertices outside ``eliminated + v`` reachable from ``v`` through ``eliminated``."""
    within = eliminated | 1 << v
    comp = g.component_of(v, within)
    return g.boundary(comp)


def exact_treewidth(g: Graph, cap: int = TREEWIDTH_CAP) -> tuple[int, TreeDecomposition]:
    _check_cap(g, cap, "exact_treewidth")
    n = g.n
    if n == 0:
        return -1, TreeDecomposition((frozenset(),))
    size = 1 << n
    best = [0] * size
    choice = [0] * size
    best[0] = -1
    for s in range(1, size):
        top = n + 1
        arg = -1
        for v in bits(s):
            rest = s ^ (1 << v)
            if best[rest] >= top:
                continue
            q = _reach_outside(g, rest, v).bit_count()
            val = max(best[rest], q)
            if val < top:
                top, arg = val, v
        best[s] = top
        choice[s] = arg
    order = []
    s = size - 1
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    width = best[size - 1]
    td = elimination_order_decomposition(g, order)
    assert td.width == width, (td.width, width)
    return width, td


def elimination_order_decomposition(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Tree decomposition from an elimination order; node 0 holds the last vertex."""
    n = len(order)
    pos = {v: i for i, v in enumerate(order)}
    eliminated = 0
    raw_bags = []
    parent_pos = []
    for i, v in enumerate(order):
        later = _reach_outside(g, eliminated, v)
        raw_bags.append(frozenset([v, *bits(later)]))
        parent_pos.append(min((pos[u] for u in bits(later)), default=None))
        eliminated |= 1 << v
    # node id = n-1-position, so the last eliminated vertex sits at the root
    bags = tuple(raw_bags[n - 1 - x] for x in range(n))
    edges = []
    for i, p in enumerate(parent_pos):
        if i == n - 1:
            continue
        # roots of separate components hang off the final bag
        target = p if p is not None else n - 1
        edges.append((n - 1 - i, n - 1 - target))
    return TreeDecomposition(bags, tuple(edges))


# ---------------------------------------------------------------------------
# exact treedepth: recursive root choice with subset memo

def exact_treedepth(g: Graph, cap: int = TREEDEPTH_CAP) -> tuple[int, EliminationForest]:
    _check_cap(g, cap, "exact_treedepth")
    memo: dict[int, tuple[int, int]] = {}

    def td(mask: int) -> int:
        if not mask:
            return 0
        comps = g.component_masks(mask)
        if len(comps) > 1:
            return max(td(c) for c in comps)
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        if mask & (mask - 1) == 0:
            memo[mask] = (1, lowest(mask))
            return 1
        best, arg = mask.bit_count() + 1, -1
        for v in bits(mask):
            val = 1 + td(mask ^ (1 << v))
            if val < best:
                best, arg = val, v
                if best == 2:
                    break
        memo[mask] = (best, arg)
        return best

    depth = td(g.full_mask)
    parent: list = [None] * g.n

    def build(mask: int, above):
        for comp in g.component_masks(mask):
            td(comp)
            root = memo[comp][1]
            parent[root] = above
            build(comp ^ (1 << root), root)

    build(g.full_mask, None)
    forest = EliminationForest(tuple(parent))
    assert forest.height == depth or g.n == 0, (forest.height, depth)
    return depth, forest


# ---------------------------------------------------------------------------
# PACE .td files

def parse_td(text: str) -> tuple[int, TreeDecomposition]:
    """Parse a PACE-2017 ``.td`` file; returns ``(n, decomposition)`` 0-indexed."""
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        try:
            if tok[0] == "s":
                if header is not None or len(tok) != 5 or tok[1] != "td":
                    raise GraphError(f"line {lineno}: bad solution line")
                header = tuple(int(x) for x in tok[2:])
            elif tok[0] == "b":
                if header is None:
                    raise GraphError(f"line {lineno}: bag before solution line")
                bag_id = int(tok[1])
                if bag_id in bags or not 1 <= bag_id <= header[0]:
                    raise GraphError(f"line {lineno}: bad bag id {bag_id}")
                verts = [int(x) - 1 for x in tok[2:]]
                if any(not 0 <= v < header[2] for v in verts):
                    raise GraphError(f"line {lineno}: vertex out of range")
                bags[bag_id] = frozenset(verts)
            else:
                if header is None or len(tok) != 2:
                    raise GraphError(f"line {lineno}: bad edge line")
                edges.append((int(tok[0]) - 1, int(tok[1]) - 1))
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer token") from None
    if header is None:
        raise GraphError("missing 's td' line")
    nbags, maxbag, n = header
    if set(bags) != set(range(1, nbags + 1)):
        raise GraphError(f"expected bags 1..{nbags}")
    ordered = tuple(bags[i] for i in range(1, nbags + 1))
    if max((len(b) for b in ordered), default=0) != maxbag:
        raise GraphError("declared max bag size does not match bags")
    return n, TreeDecomposition(ordered, tuple(edges))


def format_td(d: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(d.bags)} {d.width + 1} {n}"]
    for i, bag in enumerate(d.bags, 1):
        lines.append(" ".join(["b", str(i), *(str(v + 1) for v in sorted(bag))]))
    lines.extend(f"{a + 1} {b + 1}" for a, b in d.edges)
    return "\n".join(lines) + "\n"


def read_td(path) -> tuple[int, TreeDecomposition]:
    with open(path) as fh:
        return parse_td(fh.read())
