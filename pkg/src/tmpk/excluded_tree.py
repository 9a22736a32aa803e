"""Partitions with small-pathwidth quotients for graphs excluding a complete tree.

For a graph ``G``, a tree-decomposition ``D``, a vertex ``r`` and parameters
``h, d`` the engine returns either

* a partition ``P`` of ``V(G)`` with ``{r}`` as a part, every part inside the
  union of at most ``d + h - 2`` bags of ``D``, and a path-decomposition of
  ``G/P`` of width at most ``2h - 1`` whose first bag holds ``{r}``; or
* a model of the complete ``d``-ary tree of radius ``h`` in ``G``.

Both outcomes are validated against the input graph before they are returned.

Internally every recursion level works in original vertex ids.  The root of
a level is a connected set of original vertices (the preimage of the
contracted root); all other vertices of a level are untouched originals.
That way the surgered decomposition of a contracted graph is just the
original decomposition restricted to the level's vertex set, node ids never
change, and models lift back to ``G`` by expanding the root set.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .covering import Hitting, MemberFinder, Packing, packing_or_hitting
from .decompositions import (
    TreeDecomposition,
    exact_pathwidth,
    validate_path_decomposition,
    validate_tree_decomposition,
)
from .errors import CertificateError, GraphError
from .graph import (
    Graph,
    MinorModel,
    RootedTree,
    bits,
    complete_dary_tree,
    from_mask,
    lowest,
    quotient_of_parts,
    to_mask,
    tree_params,
)
from .minors import RootConstraint, find_rooted_tree_model, validate_model


@dataclass(frozen=True)
class TreePartitionResult:
    parts: tuple[frozenset[int], ...]
    quotient: Graph
    bags: tuple[frozenset[int], ...]
    provenance: tuple[tuple[int, ...], ...]
    root: int
    h: int
    d: int

    @property
    def width(self) -> int:
        return max(len(p) for p in self.parts)

    @property
    def quotient_width(self) -> int:
        return max(len(b) for b in self.bags) - 1


@lru_cache(maxsize=None)
def _pattern(h: int, d: int) -> RootedTree:
    return complete_dary_tree(h, d)


def _graft(small: RootedTree, big: RootedTree, small_start: int, big_start: int) -> dict[int, int]:
    """Map the subtree of ``small`` at ``small_start`` onto ``big`` below ``big_start``."""
    mapping = {}
    stack = [(small_start, big_start)]
    while stack:
        a, b = stack.pop()
        mapping[a] = b
        kids_a, kids_b = small.children[a], big.children[b]
        if len(kids_a) > len(kids_b):
            raise CertificateError("graft target has too few children")
        stack.extend(zip(kids_a, kids_b))
    return mapping


def lift_rooted_model(model: MinorModel, touch) -> MinorModel:
    """Turn a model of ``T_{k,a}`` into a model of ``T_{k,a-1}`` whose root set meets ``touch``.

    The branch sets on the path from the root down to the first node (BFS
    order) meeting ``touch`` are merged into the new root set; below it one
    child is dropped at every node.
    """
    pattern = model.pattern
    touch = frozenset(touch)
    hit = next((x for x in pattern_bfs(pattern) if model.branch_sets[x] & touch), None)
    if hit is None:
        raise GraphError("no branch set meets the required set")
    arity = len(pattern.children[pattern.root])
    k = pattern.height
    if arity < 1:
        raise GraphError("pattern has no children to select from")
    target = _pattern(k, arity - 1)
    spine = pattern.ancestors(hit)
    sets = [frozenset()] * target.n
    sets[target.root] = frozenset().union(*(model.branch_sets[x] for x in spine))
    off_spine = [c for c in pattern.children[pattern.root] if c not in spine][: arity - 1]
    for new_child, old_child in zip(target.children[target.root], off_spine):
        for new, old in _graft(target, pattern, new_child, old_child).items():
            sets[new] = model.branch_sets[old]
    return MinorModel(target, tuple(sets))


def pattern_bfs(pattern: RootedTree) -> list[int]:
    order = [pattern.root]
    for u in order:
        order.extend(pattern.children[u])
    return order


class TreeMinorFamily(MemberFinder):
    """Connected subgraphs of the available region that certify a rooted ``T_{k,d}`` at ``touch``.

    A member contains a model of ``T_{k,d}`` whose root branch set meets
    ``touch``.  Every connected subgraph meeting ``touch`` with a
    ``T_{k,d+1}`` minor is a member (lift the model), so the finder looks for
    that wider pattern first and only then for the rooted one.
    """

    def __init__(self, g: Graph, touch: int, k: int, d: int, max_steps=None):
        super().__init__()
        self.g = g
        self.touch = touch
        self.wide = _pattern(k, d + 1)
        self.rooted = _pattern(k, d)
        self.max_steps = max_steps

    def _wide_model(self, region: int) -> MinorModel | None:
        return find_rooted_tree_model(self.g, self.wide, available=from_mask(region),
                                      max_steps=self.max_steps)

    def _rooted_model(self, region: int) -> MinorModel | None:
        return find_rooted_tree_model(self.g, self.rooted, RootConstraint(from_mask(self.touch)),
                                      available=from_mask(region), max_steps=self.max_steps)

    def find(self, available):
        g = self.g
        for comp in g.component_masks(to_mask(available)):
            if not comp & self.touch:
                continue
            model = self._wide_model(comp)
            if model is not None:
                member = to_mask(model.vertices())
                if not member & self.touch:
                    member |= to_mask(g.shortest_path(member, self.touch, comp))
                return from_mask(member)
            model = self._rooted_model(comp)
            if model is not None:
                return model.vertices()
        return None

    def is_member(self, vertices):
        mask = to_mask(vertices)
        return self.g.is_connected_mask(mask) and self._rooted_model(mask) is not None

    def rooted_model(self, member: frozenset[int]) -> MinorModel:
        """A ``T_{k,d}`` model inside ``member`` whose root set meets ``touch``."""
        g = self.g
        region = to_mask(member)
        model = self._wide_model(region)
        if model is None:
            model = self._rooted_model(region)
            if model is None:
                raise CertificateError("packing member lost its minor")
            return model
        sets = [to_mask(b) for b in model.branch_sets]
        used = 0
        for s in sets:
            used |= s
        if not used & self.touch:
            path = g.shortest_path(used, self.touch, region)
            owner = next(i for i, s in enumerate(sets) if s >> path[0] & 1)
            sets[owner] |= to_mask(path)
        widened = MinorModel(self.wide, tuple(from_mask(s) for s in sets))
        return lift_rooted_model(widened, from_mask(self.touch))


def trim_to_minimal_hitting_set(universe, x0, finder: MemberFinder):
    """Shrink ``x0`` to an inclusion-minimal hitting set inside ``universe``.

    Vertices are tried in descending id order.  Returns ``(X, witnesses)``
    where ``witnesses[v]`` is a member of ``universe - (X - {v})``; every such
    member necessarily contains ``v``.
    """
    universe = frozenset(universe)
    x = set(x0)
    if finder(universe - x) is not None:
        raise GraphError("initial set does not hit every member")
    for v in sorted(x0, reverse=True):
        if finder(universe - (x - {v})) is None:
            x.discard(v)
    witnesses = {}
    for v in sorted(x):
        member = finder(universe - (x - {v}))
        if member is None or v not in member:
            raise CertificateError(f"minimality witness for {v} missing")
        witnesses[v] = member
    return frozenset(x), witnesses


@dataclass
class _Level:
    parts: list[int]
    bags: list[set[int]]
    prov: list[tuple[int, ...]]


class _Model(Exception):
    """Carries a found model up through the recursion."""

    def __init__(self, model: MinorModel):
        self.model = model


class _Engine:
    def __init__(self, g: Graph, d: TreeDecomposition, max_steps=None):
        self.g = g
        self.dec = d
        self.max_steps = max_steps
        self.first_bag = {}
        for x, bag in enumerate(d.bags):
            for v in bag:
                self.first_bag.setdefault(v, x)

    def cover(self, mask: int) -> tuple[int, ...]:
        return tuple(sorted({self.first_bag[v] for v in bits(mask)}))

    def run(self, root: int, rest: int, h: int, d: int) -> _Level:
        if not rest:
            return _Level([root], [{0}], [self.cover(root)[:1]])
        if h == 1:
            level = self.layering(root, rest, d)
        else:
            level = self.step(root, rest, h, d)
        self.check_level(level, root, rest, h, d)
        return level

    def layering(self, root: int, rest: int, d: int) -> _Level:
        g = self.g
        layers = [root]
        seen = root
        frontier = g.boundary(root) & rest
        while frontier:
            if frontier.bit_count() >= d:
                leaves = list(bits(frontier))[:d]
                ball = 0
                for layer in layers:
                    ball |= layer
                pattern = _pattern(1, d)
                sets = [from_mask(ball)] + [frozenset([v]) for v in leaves]
                raise _Model(MinorModel(pattern, tuple(sets)))
            layers.append(frontier)
            seen |= frontier
            frontier = g.boundary(frontier) & rest & ~seen
        bags = [{i, i + 1} for i in range(len(layers) - 1)] or [{0}]
        prov = [self.cover(root)[:1]] + [self.cover(layer) for layer in layers[1:]]
        return _Level(layers, bags, prov)

    def step(self, root: int, rest: int, h: int, d: int) -> _Level:
        g = self.g
        touch = g.boundary(root) & rest
        family = TreeMinorFamily(g, touch, h - 1, d, self.max_steps)
        outcome = packing_or_hitting(g, self.dec.restrict(from_mask(rest)), family, d)
        if isinstance(outcome, Packing):
            raise _Model(self.build_model(root, touch, outcome, family, h, d))
        assert isinstance(outcome, Hitting)

        x, witnesses = trim_to_minimal_hitting_set(from_mask(rest), outcome.vertices, family)
        xmask = to_mask(x)
        pieces, leftover = [], 0
        for comp in g.component_masks(rest & ~xmask):
            if comp & touch:
                pieces.append(comp)
            else:
                leftover |= comp

        subs = []
        for comp in pieces:
            r_i = lowest(comp & touch)
            try:
                subs.append(self.run(1 << r_i, comp & ~(1 << r_i), h - 1, d + 1))
            except _Model as found:
                raise CertificateError(
                    "component below the hitting set contains the forbidden minor") from found

        contracted = root
        for v in sorted(x):
            member = to_mask(witnesses[v])
            path = g.shortest_path(1 << v, touch & member, member)
            contracted |= to_mask(path)
        if not g.is_connected_mask(contracted):
            raise CertificateError("rescue paths do not form a connected set")
        upper = self.run(contracted, leftover, h, d)
        return self.assemble(root, xmask, outcome.nodes, subs, upper)

    def build_model(self, root: int, touch: int, packing: Packing, family: TreeMinorFamily,
                    h: int, d: int) -> MinorModel:
        big = _pattern(h, d)
        sets = [frozenset()] * big.n
        sets[big.root] = from_mask(root)
        for member, child in zip(packing.members, big.children[big.root]):
            lifted = family.rooted_model(member)
            for small, node in _graft(lifted.pattern, big, lifted.pattern.root, child).items():
                sets[node] = lifted.branch_sets[small]
        return MinorModel(big, tuple(sets))

    def assemble(self, root: int, xmask: int, xnodes, subs: list[_Level], upper: _Level) -> _Level:
        parts = [root]
        prov = [self.cover(root)[:1]]
        x_index = None
        if xmask:
            x_index = len(parts)
            parts.append(xmask)
            prov.append(tuple(sorted(set(xnodes))))
        glue = {0} | ({x_index} if x_index is not None else set())
        bags: list[set[int]] = []
        if not subs:
            bags.append(set(glue))
        blocks = []
        for sub in subs:
            offset = len(parts)
            blocks.append(range(offset, offset + len(sub.parts)))
            parts.extend(sub.parts)
            prov.extend(sub.prov)
            bags.extend(glue | {offset + i for i in bag} for bag in sub.bags)
        remap = {0: x_index}
        for i in range(1, len(upper.parts)):
            remap[i] = len(parts)
            parts.append(upper.parts[i])
            prov.append(upper.prov[i])
        for bag in upper.bags:
            mapped = {remap[i] for i in bag if remap[i] is not None}
            if mapped:
                bags.append(mapped)
        self.check_neighbourhoods(parts, blocks, glue)
        return _Level(parts, bags, prov)

    def check_neighbourhoods(self, parts: list[int], blocks: list[range], glue: set[int]):
        q = quotient_of_parts(self.g, [from_mask(p) for p in parts])
        for block in blocks:
            allowed = set(block) | glue
            for i in block:
                stray = set(q.neighbors(i)) - allowed
                if stray:
                    raise CertificateError(f"part {i} of a lower component has stray neighbours {stray}")

    def check_level(self, level: _Level, root: int, rest: int, h: int, d: int):
        problems = _level_problems(self.g, self.dec, level, root, rest, h, d)
        if problems:
            raise CertificateError("; ".join(problems))


def _level_problems(g: Graph, dec: TreeDecomposition, level: _Level, root: int, rest: int,
                    h: int, d: int) -> list[str]:
    problems = []
    covered = 0
    for p in level.parts:
        if not p or covered & p:
            problems.append("parts are empty or overlap")
        covered |= p
    if covered != root | rest or level.parts[0] != root:
        problems.append("parts do not partition the level's vertex set")
    q = quotient_of_parts(g, [from_mask(p) for p in level.parts])
    problems += validate_path_decomposition(q, level.bags)
    if max(len(b) for b in level.bags) - 1 > 2 * h - 1:
        problems.append("quotient path-decomposition too wide")
    if 0 not in level.bags[0]:
        problems.append("first bag misses the root part")
    for i, (p, nodes) in enumerate(zip(level.parts, level.prov)):
        if i == 0:
            continue
        if len(nodes) > d + h - 2:
            problems.append(f"part {i} needs {len(nodes)} bags")
        if p & ~to_mask(dec.union_of(nodes)):
            problems.append(f"part {i} is not covered by its bags")
    return problems


def validate_tree_partition(g: Graph, dec: TreeDecomposition, result: TreePartitionResult) -> list[str]:
    """Check every claim of a partition outcome against the original graph."""
    problems = []
    h, d, r = result.h, result.d, result.root
    seen: set[int] = set()
    for i, p in enumerate(result.parts):
        if not p:
            problems.append(f"part {i} is empty")
        if seen & p:
            problems.append(f"part {i} overlaps an earlier part at {sorted(seen & p)}")
        seen |= p
    if seen != set(range(g.n)):
        problems.append("parts do not cover V(G) exactly")
        return problems
    if not result.parts or result.parts[0] != frozenset([r]):
        problems.append("part 0 is not {r}")
    q = quotient_of_parts(g, result.parts)
    if q != result.quotient:
        problems.append("stored quotient differs from G/P")
    problems += [f"quotient decomposition: {p}" for p in validate_path_decomposition(q, result.bags)]
    if result.quotient_width > 2 * h - 1:
        problems.append(f"quotient width {result.quotient_width} exceeds {2 * h - 1}")
    if not result.bags or 0 not in result.bags[0]:
        problems.append("first quotient bag does not contain {r}")
    if len(result.provenance) != len(result.parts):
        problems.append("provenance list has the wrong length")
        return problems
    for i, (p, nodes) in enumerate(zip(result.parts, result.provenance)):
        if len(nodes) > d + h - 2:
            problems.append(f"part {i} names {len(nodes)} bags, limit {d + h - 2}")
        if any(not 0 <= x < len(dec.bags) for x in nodes):
            problems.append(f"part {i} names unknown decomposition nodes")
        elif not p <= dec.union_of(nodes):
            problems.append(f"part {i} is not inside the union of its named bags")
    return problems


def layering_base_case(g: Graph, r: int, d: int, dec: TreeDecomposition | None = None):
    """The radius-one case: BFS layers from ``r`` or a ``T_{1,d}`` model."""
    if d < 2:
        raise GraphError("base case needs d >= 2")
    if not g.is_connected():
        raise GraphError("base case expects a connected graph")
    if dec is None:
        dec = TreeDecomposition((frozenset(g.vertices()),))
    return decompose_excluded_tree(g, dec, r, 1, d)


def decompose_excluded_tree(g: Graph, dec: TreeDecomposition, r: int | None, h: int, d: int,
                            max_steps: int | None = None,
                            probe_roots: bool = True) -> TreePartitionResult | MinorModel:
    """Certified partition of ``g`` rooted at ``r`` or a model of ``T_{h,d}`` in ``g``.

    Disconnected graphs are handled per component (the component of ``r``
    first, others rooted at their lowest vertex); their quotient
    path-decompositions are concatenated.

    With ``probe_roots`` a partition outcome triggers reruns from every other
    root, in id order; the first model produced that way is returned instead.
    """
    if h < 1 or d < 2:
        raise GraphError("need h >= 1 and d >= 2 (route d = 1 to the excluded-path engine)")
    if g.n == 0:
        raise GraphError("empty graph")
    problems = validate_tree_decomposition(g, dec)
    if problems:
        raise GraphError("invalid tree-decomposition: " + "; ".join(problems))
    if r is None:
        r = 0
    if not 0 <= r < g.n:
        raise GraphError(f"root {r} is not a vertex")
    engine = _Engine(g, dec, max_steps)
    outcome = _decompose_at(engine, r, h, d)
    if probe_roots and isinstance(outcome, TreePartitionResult):
        for other in range(g.n):
            if other == r:
                continue
            probe = _decompose_at(engine, other, h, d)
            if isinstance(probe, MinorModel):
                return probe
    return outcome


def _decompose_at(engine: _Engine, r: int, h: int, d: int) -> TreePartitionResult | MinorModel:
    g, dec = engine.g, engine.dec
    comps = g.component_masks()
    comps.sort(key=lambda c: (not c >> r & 1, lowest(c)))
    parts: list[int] = []
    bags: list[set[int]] = []
    prov: list[tuple[int, ...]] = []
    for comp in comps:
        c_root = r if comp >> r & 1 else lowest(comp)
        try:
            level = engine.run(1 << c_root, comp & ~(1 << c_root), h, d)
        except _Model as found:
            model = found.model
            problems = validate_model(g, model.pattern, model)
            if problems:
                raise CertificateError("model failed validation: " + "; ".join(problems))
            return model
        offset = len(parts)
        parts.extend(level.parts)
        prov.extend(level.prov)
        bags.extend({offset + i for i in b} for b in level.bags)
    part_sets = tuple(from_mask(p) for p in parts)
    result = TreePartitionResult(
        parts=part_sets,
        quotient=quotient_of_parts(g, part_sets),
        bags=tuple(frozenset(b) for b in bags),
        provenance=tuple(prov),
        root=r,
        h=h,
        d=d,
    )
    problems = validate_tree_partition(g, dec, result)
    if problems:
        raise CertificateError("partition failed validation: " + "; ".join(problems))
    return result


def embed_tree(tree: RootedTree, big: RootedTree) -> dict[int, int]:
    """Greedy embedding of a rooted tree into ``big`` preserving parent links."""
    mapping = {tree.root: big.root}
    stack = [tree.root]
    while stack:
        u = stack.pop()
        slots = list(big.children[mapping[u]])
        kids = tree.children[u]
        if len(kids) > len(slots):
            raise CertificateError(f"cannot embed: vertex {u} has {len(kids)} children")
        for c, s in zip(kids, slots):
            mapping[c] = s
            stack.append(c)
    return mapping


@dataclass(frozen=True)
class TheoremOutcome:
    """Outcome of the arbitrary-tree wrapper together with the part-size bound it meets."""

    outcome: TreePartitionResult | MinorModel
    t: int
    h: int
    d: int
    decomposition: TreeDecomposition
    part_bound: int | None


def decompose_excluded_tree_theorem(g: Graph, tree, dec: TreeDecomposition | None = None,
                                    r: int | None = None, max_steps: int | None = None,
                                    pathwidth_cap: int = 20, probe_roots: bool = True) -> TheoremOutcome:
    """Partition with parts of size ``<= (d+h-2)(width(D)+1)`` or a model of ``tree``.

    ``tree`` is a tree given as a :class:`Graph` or :class:`RootedTree`.  When
    no decomposition is supplied an exact path-decomposition is used.
    """
    t, h, d, center = tree_params(tree)
    tgraph = tree.graph if isinstance(tree, RootedTree) else tree
    rooted = RootedTree(tgraph, center)
    if dec is None:
        dec = exact_pathwidth(g, cap=pathwidth_cap)[1].to_tree()
    if t == 1 or (d == 1 and g.m > 0):
        # a single vertex or a single edge
        sets = [frozenset([0])] if t == 1 else [frozenset([g.edges[0][i]]) for i in (0, 1)]
        if t == 2 and rooted.root == 1:
            sets.reverse()
        model = MinorModel(rooted, tuple(sets))
        return TheoremOutcome(model, t, h, d, dec, None)
    d_eff = max(d, 2)
    h_eff = max(h, 1)
    outcome = decompose_excluded_tree(g, dec, r, h_eff, d_eff, max_steps=max_steps,
                                      probe_roots=probe_roots)
    if isinstance(outcome, MinorModel):
        mapping = embed_tree(rooted, outcome.pattern)
        sets = tuple(outcome.branch_sets[mapping[x]] for x in range(t))
        model = MinorModel(rooted, sets)
        problems = validate_model(g, rooted, model)
        if problems:
            raise CertificateError("restricted model failed validation: " + "; ".join(problems))
        return TheoremOutcome(model, t, h, d, dec, None)
    bound = (d_eff + h_eff - 2) * (dec.width + 1)
    if outcome.width > bound:
        raise CertificateError(f"part of size {outcome.width} exceeds bound {bound}")
    return TheoremOutcome(outcome, t, h, d, dec, bound)
