"""Exhaustive rooted tree-minor search and exact long-path search.

``find_rooted_tree_model`` is complete: it returns ``None`` only after the
whole search space has been explored.  Running out of the step budget is an
error (:class:`BudgetExceeded`), never a silent "no model".
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BudgetExceeded, CapExceeded
from .graph import Graph, MinorModel, RootedTree, bits, from_mask, lowest, to_mask

DEFAULT_MAX_STEPS = 5_000_000
LONGEST_PATH_CAP = 18


def max_steps_default() -> int:
    env = os.environ.get("TMPK_MAX_STEPS")
    return int(env) if env else DEFAULT_MAX_STEPS


@dataclass(frozen=True)
class RootConstraint:
    """When set, the root branch set must meet ``required_touch``."""

    required_touch: frozenset[int] | None = None


class _Budget:
    __slots__ = ("left", "limit")

    def __init__(self, limit: int):
        self.left = self.limit = limit

    def spend(self, k: int = 1):
        self.left -= k
        if self.left < 0:
            raise BudgetExceeded(f"model search exceeded {self.limit} steps")


def _match_leaves(attach: Sequence[int], free: int) -> list[int] | None:
    """Distinct representatives: one free vertex per leaf from its attach mask."""
    owner: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for v in bits(attach[i] & free):
            if v in seen:
                continue
            seen.add(v)
            if v not in owner or augment(owner[v], seen):
                owner[v] = i
                return True
        return False

    for i in range(len(attach)):
        if not augment(i, set()):
            return None
    chosen = [0] * len(attach)
    for v, i in owner.items():
        chosen[i] = v
    return chosen


class _ModelSearch:
    def __init__(self, g: Graph, pattern: RootedTree, budget: _Budget):
        self.g = g
        self.pattern = pattern
        self.budget = budget
        self.size = [len(pattern.subtree(x)) for x in range(pattern.n)]
        self.shape = self._shapes()
        self.failed: set = set()

    def _shapes(self) -> list[int]:
        # isomorphism class ids for rooted subtrees, used for sibling symmetry
        canon: dict = {}
        shape = [0] * self.pattern.n
        for x in reversed(self.pattern.preorder()):
            key = tuple(sorted(shape[c] for c in self.pattern.children[x]))
            shape[x] = canon.setdefault(key, len(canon))
        return shape

    def _connected_sets(self, u: int, region: int):
        """Every connected set containing ``u`` inside ``region``, each once."""
        adj = self.g.adj

        def rec(s: int, nbr: int, banned: int):
            yield s, nbr
            cand = nbr & region & ~banned
            while cand:
                low = cand & -cand
                cand ^= low
                w = low.bit_length() - 1
                yield from rec(s | low, (nbr | adj[w]) & ~(s | low), banned)
                banned |= low

        yield from rec(1 << u, adj[u] & ~(1 << u), 0)

    def solve(self, free: int, pending: tuple) -> list | None:
        """Place every pending ``(node, attach)`` item disjointly inside ``free``."""
        if not pending:
            return []
        key = (free, pending)
        if key in self.failed:
            return None
        self.budget.spend()
        need = 0
        for node, attach in pending:
            if not attach & free:
                self.failed.add(key)
                return None
            need += self.size[node]
        if need > free.bit_count():
            self.failed.add(key)
            return None

        children = self.pattern.children
        if all(not children[node] for node, _ in pending):
            chosen = _match_leaves([a for _, a in pending], free)
            if chosen is None:
                self.failed.add(key)
                return None
            return [(node, 1 << v) for (node, _), v in zip(pending, chosen)]

        (node, attach), rest = pending[0], pending[1:]
        attach &= free
        twin = (
            rest
            and self.pattern.parent[rest[0][0]] == self.pattern.parent[node]
            and self.pattern.parent[node] is not None
            and self.shape[rest[0][0]] == self.shape[node]
        )

        if not children[node]:
            for u in bits(attach):
                nxt = rest
                if twin:
                    nxt = ((rest[0][0], rest[0][1] & ~((2 << u) - 1)),) + rest[1:]
                found = self.solve(free & ~(1 << u), nxt)
                if found is not None:
                    return [(node, 1 << u)] + found
            self.failed.add(key)
            return None

        kids = children[node]
        room = free.bit_count() - (need - self.size[node]) - (self.size[node] - 1)
        seen_attach = 0
        for u in bits(attach):
            region = free & ~seen_attach
            seen_attach |= 1 << u
            for w_mask, nbr in self._connected_sets(u, region):
                self.budget.spend()
                if w_mask.bit_count() > room:
                    continue
                left = free & ~w_mask
                nbr &= left
                if nbr.bit_count() < len(kids):
                    continue
                nxt = rest
                if twin:
                    nxt = ((rest[0][0], rest[0][1] & ~((2 << u) - 1)),) + rest[1:]
                found = self.solve(left, tuple((c, nbr) for c in kids) + nxt)
                if found is not None:
                    return [(node, w_mask)] + found
        self.failed.add(key)
        return None


def find_rooted_tree_model(
    g: Graph,
    pattern: RootedTree,
    constraint: RootConstraint | None = None,
    available: Iterable[int] | None = None,
    max_steps: int | None = None,
    shrink: bool = True,
) -> MinorModel | None:
    """Search ``g[available]`` for a model of ``pattern``.

    With a constraint, the root branch set must contain a vertex of
    ``constraint.required_touch``.  Returns ``None`` only after exhaustive search.
    """
    avail = g.full_mask if available is None else to_mask(available)
    touch = avail
    if constraint is not None and constraint.required_touch is not None:
        touch &= to_mask(constraint.required_touch)
    if avail.bit_count() < pattern.n or not touch:
        return None
    budget = _Budget(max_steps if max_steps is not None else max_steps_default())
    search = _ModelSearch(g, pattern, budget)
    found = search.solve(avail, ((pattern.root, touch),))
    if found is None:
        return None
    sets = [0] * pattern.n
    for node, mask in found:
        sets[node] = mask
    if shrink:
        _shrink(g, pattern, sets, touch)
    model = MinorModel(pattern, tuple(from_mask(s) for s in sets))
    problems = validate_model(g, pattern, model)
    assert not problems, problems
    return model


def _edges_witnessed(g: Graph, pattern: RootedTree, sets: list[int], x: int) -> bool:
    for y in pattern.graph.neighbors(x):
        if not g.boundary(sets[x]) & sets[y]:
            return False
    return True


def _shrink(g: Graph, pattern: RootedTree, sets: list[int], touch: int):
    for x in pattern.preorder():
        for v in sorted(bits(sets[x]), reverse=True):
            smaller = sets[x] & ~(1 << v)
            if not smaller or not g.is_connected_mask(smaller):
                continue
            if x == pattern.root and not smaller & touch:
                continue
            old = sets[x]
            sets[x] = smaller
            if not _edges_witnessed(g, pattern, sets, x):
                sets[x] = old


def validate_model(g: Graph, pattern: RootedTree, model: MinorModel) -> list[str]:
    """Disjointness, connectivity and edge-witness violations; empty means ok."""
    problems = []
    if model.pattern.graph != pattern.graph:
        problems.append("model is for a different pattern")
    if len(model.branch_sets) != pattern.n:
        return problems + ["wrong number of branch sets"]
    owner: dict[int, int] = {}
    for x, bs in enumerate(model.branch_sets):
        if not bs:
            problems.append(f"branch set {x} is empty")
            continue
        for v in bs:
            if not 0 <= v < g.n:
                problems.append(f"branch set {x} holds non-vertex {v}")
            elif v in owner:
                problems.append(f"vertex {v} in branch sets {owner[v]} and {x} (disjointness)")
            else:
                owner[v] = x
        if all(0 <= v < g.n for v in bs) and not g.is_connected(bs):
            problems.append(f"branch set {x} is not connected")
    if problems:
        return problems
    masks = [to_mask(b) for b in model.branch_sets]
    for x, y in pattern.graph.edges:
        if not g.boundary(masks[x]) & masks[y]:
            problems.append(f"pattern edge {x}-{y} has no host edge witness")
    return problems


# ---------------------------------------------------------------------------
# paths

def validate_path(g: Graph, path: Sequence[int], min_vertices: int = 1) -> list[str]:
    problems = []
    if len(set(path)) != len(path):
        problems.append("path repeats a vertex")
    if any(not 0 <= v < g.n for v in path):
        problems.append("path holds a non-vertex")
        return problems
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            problems.append(f"{a}-{b} is not an edge")
    if len(path) < min_vertices:
        problems.append(f"path has {len(path)} vertices, need at least {min_vertices}")
    return problems


def find_path(g: Graph, k: int, available: Iterable[int] | None = None,
              max_steps: int | None = None) -> list[int] | None:
    """A simple path on exactly ``k`` vertices inside ``available``, or ``None``."""
    avail = g.full_mask if available is None else to_mask(available)
    if k <= 0:
        return []
    if avail.bit_count() < k:
        return None
    budget = _Budget(max_steps if max_steps is not None else max_steps_default())
    adj = g.adj
    dead: set[tuple[int, int]] = set()

    def extend(used: int, end: int, length: int) -> list[int] | None:
        if length == k:
            return [end]
        if (used, end) in dead:
            return None
        budget.spend()
        reach = g.component_of(end, avail & ~used | 1 << end)
        if reach.bit_count() < k - length + 1:
            dead.add((used, end))
            return None
        for w in bits(adj[end] & avail & ~used):
            rest = extend(used | 1 << w, w, length + 1)
            if rest is not None:
                return [end] + rest
        dead.add((used, end))
        return None

    for comp in g.component_masks(avail):
        if comp.bit_count() < k:
            continue
        for s in bits(comp):
            found = extend(1 << s, s, 1)
            if found is not None:
                return found
    return None


def longest_path(g: Graph, cap: int = LONGEST_PATH_CAP, max_steps: int | None = None) -> list[int]:
    """An exact longest simple path (vertex sequence)."""
    if g.n > cap:
        raise CapExceeded(f"longest_path: {g.n} vertices exceeds cap {cap}")
    if g.n == 0:
        return []
    best: list[int] = [0]
    biggest = max(c.bit_count() for c in g.component_masks())
    for k in range(2, biggest + 1):
        p = find_path(g, k, max_steps=max_steps)
        if p is None:
            break
        best = p
    return best
