"""Core graph, rooted tree, partition and minor-model types.

Graphs are immutable, have dense integer vertex ids ``0..n-1`` and keep one
adjacency bitmask per vertex.  Most algorithms in the package work on those
masks directly; the public API speaks in ``frozenset`` of vertex ids.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import GraphError


# ---------------------------------------------------------------------------
# bitmask helpers

def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def from_mask(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# ---------------------------------------------------------------------------
# graphs

class Graph:
    """Finite simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError(f"negative vertex count {n}")
        adj = [0] * n
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.edges = tuple(sorted(seen))
        self.adj = tuple(adj)

    @classmethod
    def from_masks(cls, adj: Sequence[int]) -> "Graph":
        n = len(adj)
        return cls(n, ((u, v) for u in range(n) for v in bits(adj[u]) if u < v))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def boundary(self, mask: int) -> int:
        """Vertices outside ``mask`` adjacent to some vertex of ``mask``."""
        out = 0
        for v in bits(mask):
            out |= self.adj[v]
        return out & ~mask

    def component_of(self, v: int, within: int | None = None) -> int:
        """Mask of the component of ``v`` in the subgraph induced by ``within``."""
        if within is None:
            within = self.full_mask
        comp = frontier = 1 << v
        while frontier:
            nxt = 0
            for u in bits(frontier):
                nxt |= self.adj[u]
            frontier = nxt & within & ~comp
            comp |= frontier
        return comp

    def component_masks(self, within: int | None = None) -> list[int]:
        """Component masks of the induced subgraph, ordered by lowest vertex."""
        if within is None:
            within = self.full_mask
        comps = []
        rest = within
        while rest:
            comp = self.component_of(lowest(rest), within)
            comps.append(comp)
            rest &= ~comp
        return comps

    def components(self, vertices: Iterable[int] | None = None) -> list[frozenset[int]]:
        within = None if vertices is None else to_mask(vertices)
        return [from_mask(c) for c in self.component_masks(within)]

    def is_connected_mask(self, mask: int) -> bool:
        if not mask:
            return False
        return self.component_of(lowest(mask), mask) == mask

    def is_connected(self, vertices: Iterable[int] | None = None) -> bool:
        mask = self.full_mask if vertices is None else to_mask(vertices)
        return self.is_connected_mask(mask)

    def subgraph(self, vertices: Iterable[int]) -> tuple["Graph", dict[int, int]]:
        """Induced subgraph relabelled densely; returns the old->new mapping."""
        order = sorted(set(vertices))
        mapping = {v: i for i, v in enumerate(order)}
        edges = [(mapping[u], mapping[v]) for u, v in self.edges if u in mapping and v in mapping]
        return Graph(len(order), edges), mapping

    def shortest_path(self, sources: int, targets: int, within: int) -> list[int] | None:
        """Shortest path from a vertex of ``sources`` to one of ``targets`` inside ``within``.

        Ties are broken towards lower vertex ids.
        """
        sources &= within
        targets &= within
        if not sources or not targets:
            return None
        hit = sources & targets
        if hit:
            return [lowest(hit)]
        parent = {v: None for v in bits(sources)}
        queue = deque(sorted(parent))
        while queue:
            u = queue.popleft()
            for w in bits(self.adj[u] & within):
                if w in parent:
                    continue
                parent[w] = u
                if targets >> w & 1:
                    path = [w]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(w)
        return None


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, edges)


# ---------------------------------------------------------------------------
# rooted trees

@dataclass(frozen=True)
class RootedTree:
    graph: Graph
    root: int
    parent: tuple = field(init=False, repr=False, compare=False)
    children: tuple = field(init=False, repr=False, compare=False)
    depth: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = self.graph
        if g.n == 0 or not (0 <= self.root < g.n):
            raise GraphError("root must be a vertex of a non-empty tree")
        if g.m != g.n - 1 or not g.is_connected():
            raise GraphError("not a tree")
        parent: list = [None] * g.n
        depth = [0] * g.n
        children: list[list[int]] = [[] for _ in range(g.n)]
        order = [self.root]
        seen = {self.root}
        for u in order:
            for w in g.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    children[u].append(w)
                    order.append(w)
        object.__setattr__(self, "parent", tuple(parent))
        object.__setattr__(self, "children", tuple(tuple(c) for c in children))
        object.__setattr__(self, "depth", tuple(depth))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def height(self) -> int:
        return max(self.depth)

    def preorder(self) -> list[int]:
        out, stack = [], [self.root]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def subtree(self, x: int) -> list[int]:
        out, stack = [], [x]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def ancestors(self, x: int) -> list[int]:
        """Path from the root down to ``x`` inclusive."""
        path = [x]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return path[::-1]


def complete_dary_tree(h: int, d: int) -> RootedTree:
    """Complete d-ary tree of radius ``h`` labelled in BFS order, root 0."""
    if h < 0 or d < 1:
        raise GraphError("need h >= 0 and d >= 1")
    edges = []
    level = [0]
    n = 1
    for _ in range(h):
        nxt = []
        for u in level:
            for _ in range(d):
                edges.append((u, n))
                nxt.append(n)
                n += 1
        level = nxt
    return RootedTree(Graph(n, edges), 0)


def eccentricities(g: Graph) -> list[int]:
    out = []
    for v in g.vertices():
        layers = bfs_layers(g, v)
        out.append(len(layers) - 1)
    return out


def tree_params(tree: RootedTree | Graph) -> tuple[int, int, int, int]:
    """Return ``(t, h, d, center)``: vertex count, radius, max degree, a center.

    The center is the lowest-id vertex of minimum eccentricity.
    """
    g = tree.graph if isinstance(tree, RootedTree) else tree
    if g.n == 0 or g.m != g.n - 1 or not g.is_connected():
        raise GraphError("not a tree")
    ecc = eccentricities(g)
    h = min(ecc)
    center = ecc.index(h)
    d = max(g.degree(v) for v in g.vertices())
    return g.n, h, d, center


def strong_product(a: Graph, b: Graph) -> Graph:
    """Strong product; vertex ``(x, y)`` gets id ``x * b.n + y``."""
    edges = []
    for x in a.vertices():
        for y in b.vertices():
            i = x * b.n + y
            for x2 in [x, *a.neighbors(x)]:
                for y2 in [y, *b.neighbors(y)]:
                    j = x2 * b.n + y2
                    if i < j:
                        edges.append((i, j))
    return Graph(a.n * b.n, edges)


def contract_connected_set(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Contract the connected set ``s`` into one vertex.

    New ids follow the old order, the merged vertex taking the slot of ``min(s)``.
    Returns the contracted graph and the old->new vertex mapping.
    """
    s = set(s)
    if not s:
        raise GraphError("cannot contract an empty set")
    if not g.is_connected(s):
        raise GraphError("contracted set must induce a connected subgraph")
    anchor = min(s)
    mapping: dict[int, int] = {}
    nxt = 0
    for v in g.vertices():
        if v in s and v != anchor:
            continue
        mapping[v] = nxt
        nxt += 1
    for v in s:
        mapping[v] = mapping[anchor]
    edges = {tuple(sorted((mapping[u], mapping[v]))) for u, v in g.edges}
    edges = {e for e in edges if e[0] != e[1]}
    return Graph(nxt, edges), mapping


def bfs_layers(g: Graph, r: int, within: int | None = None) -> list[frozenset[int]]:
    """Distance layers ``V_0 = {r}, V_1, ...`` of the component of ``r``."""
    if within is None:
        within = g.full_mask
    layers = []
    seen = frontier = 1 << r
    while frontier:
        layers.append(from_mask(frontier))
        nxt = 0
        for u in bits(frontier):
            nxt |= g.adj[u]
        frontier = nxt & within & ~seen
        seen |= frontier
    return layers


# ---------------------------------------------------------------------------
# partitions and products

@dataclass(frozen=True)
class Partition:
    """A partition of ``V(G)`` into non-empty parts."""

    n: int
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        seen: set[int] = set()
        for p in parts:
            if not p:
                raise GraphError("empty part")
            if seen & p:
                raise GraphError(f"vertex {min(seen & p)} in two parts")
            seen |= p
        if seen != set(range(self.n)):
            raise GraphError("parts do not cover the vertex set exactly")

    @property
    def width(self) -> int:
        return max((len(p) for p in self.parts), default=0)

    def part_of(self) -> list[int]:
        index = [0] * self.n
        for i, p in enumerate(self.parts):
            for v in p:
                index[v] = i
        return index


def quotient_of_parts(g: Graph, parts: Sequence[Iterable[int]]) -> Graph:
    """Quotient graph for disjoint vertex sets (not necessarily covering)."""
    owner = {}
    for i, p in enumerate(parts):
        for v in p:
            owner[v] = i
    edges = set()
    for u, v in g.edges:
        a, b = owner.get(u), owner.get(v)
        if a is not None and b is not None and a != b:
            edges.add((a, b) if a < b else (b, a))
    return Graph(len(parts), edges)


def quotient(g: Graph, partition: Partition | Sequence[Iterable[int]]) -> Graph:
    if not isinstance(partition, Partition):
        partition = Partition(g.n, tuple(frozenset(p) for p in partition))
    if partition.n != g.n:
        raise GraphError("partition is over a different vertex set")
    return quotient_of_parts(g, partition.parts)


def partition_to_product(g: Graph, partition: Partition) -> tuple[Graph, int, dict[int, tuple[int, int]]]:
    """Embed ``g`` into ``(G/P) x K_width``: vertex -> (part index, slot in part)."""
    h = quotient(g, partition)
    p = partition.width
    emb = {}
    for i, part in enumerate(partition.parts):
        for slot, v in enumerate(sorted(part)):
            emb[v] = (i, slot)
    return h, p, emb


def check_product_embedding(g: Graph, h: Graph, p: int, emb: dict[int, tuple[int, int]]) -> list[str]:
    """Violations of ``emb`` being an injective homomorphism of ``g`` into ``h x K_p``."""
    problems = []
    if set(emb) != set(g.vertices()):
        problems.append("embedding does not cover every vertex")
        return problems
    images = {}
    for v, (x, y) in sorted(emb.items()):
        if not (0 <= x < h.n and 0 <= y < p):
            problems.append(f"vertex {v} mapped outside the product: {(x, y)}")
        elif (x, y) in images:
            problems.append(f"vertices {images[(x, y)]} and {v} share image {(x, y)}")
        images[(x, y)] = v
    for u, v in g.edges:
        (x1, _), (x2, _) = emb[u], emb[v]
        if x1 != x2 and not h.has_edge(x1, x2):
            problems.append(f"edge {u}-{v} maps to non-adjacent product vertices")
    return problems


def product_embedding_to_partition(g: Graph, emb: dict[int, tuple[int, int]]) -> Partition:
    """Read an H-partition back from an embedding into ``H x K_p`` (first coordinate)."""
    groups: dict[int, set[int]] = {}
    for v, (x, _) in emb.items():
        groups.setdefault(x, set()).add(v)
    return Partition(g.n, tuple(frozenset(groups[x]) for x in sorted(groups)))


# ---------------------------------------------------------------------------
# minor models

@dataclass(frozen=True)
class MinorModel:
    """Branch sets indexed by the vertices of ``pattern``."""

    pattern: RootedTree
    branch_sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "branch_sets", tuple(frozenset(b) for b in self.branch_sets))
        if len(self.branch_sets) != self.pattern.n:
            raise GraphError("one branch set per pattern vertex required")

    def vertices(self) -> frozenset[int]:
        return frozenset().union(*self.branch_sets)


# ---------------------------------------------------------------------------
# text format

def parse_graph(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v`` (0-indexed, ``#`` comments)."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append((lineno, [int(tok) for tok in line.split()]))
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer token") from None
    if not rows:
        raise GraphError("missing header line")
    lineno, header = rows[0]
    if len(header) != 2:
        raise GraphError(f"line {lineno}: header must be 'n m'")
    n, m = header
    if len(rows) - 1 != m:
        raise GraphError(f"header announces {m} edges, found {len(rows) - 1}")
    edges = []
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise GraphError(f"line {lineno}: edge line must be 'u v'")
        edges.append((row[0], row[1]))
    try:
        return Graph(n, edges)
    except GraphError as exc:
        raise GraphError(f"invalid edge list: {exc}") from None


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())
