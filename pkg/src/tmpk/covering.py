"""Packing versus hitting for families of connected subgraphs.

Given a tree-decomposition and a complete member finder, either return
``ell`` pairwise disjoint family members or a vertex set made of at most
``ell - 1`` bags that meets every member.

The construction scans decomposition nodes deepest-first and queries the
finder on the part of the graph below each node that is still free.  The
first hit is recorded and its node's bag joins the hitting set; because a
bag separates its subtree from the rest, later members can never touch an
earlier one.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterable

from .decompositions import TreeDecomposition
from .graph import Graph, from_mask, to_mask


class MemberFinder(ABC):
    """Complete finder for a family of connected subgraphs.

    ``find`` must return ``None`` only when no member lies inside the
    available set; a heuristic finder breaks the packing/hitting dichotomy.
    Query results are cached for the lifetime of the finder object.
    """

    def __init__(self):
        self._cache: dict[frozenset[int], frozenset[int] | None] = {}
        self.queries = 0

    def __call__(self, available: Iterable[int]) -> frozenset[int] | None:
        key = frozenset(available)
        if key not in self._cache:
            self.queries += 1
            self._cache[key] = self.find(key)
        return self._cache[key]

    @abstractmethod
    def find(self, available: frozenset[int]) -> frozenset[int] | None:
        ...

    @abstractmethod
    def is_member(self, vertices: frozenset[int]) -> bool:
        ...


class FunctionFinder(MemberFinder):
    """Adapter for a pair of plain functions (the caller vouches for completeness)."""

    def __init__(self, find: Callable, is_member: Callable):
        super().__init__()
        self._find = find
        self._is_member = is_member

    def find(self, available):
        return self._find(available)

    def is_member(self, vertices):
        return self._is_member(vertices)


@dataclass(frozen=True)
class Packing:
    members: tuple[frozenset[int], ...]
    nodes: tuple[int, ...]


@dataclass(frozen=True)
class Hitting:
    vertices: frozenset[int]
    nodes: tuple[int, ...]


def packing_or_hitting(g: Graph, d: TreeDecomposition, finder: MemberFinder, ell: int) -> Packing | Hitting:
    """Return ``ell`` disjoint members or a hitting set from at most ``ell - 1`` bags.

    The universe is the union of the bags of ``d`` (``V(G)`` for a full
    decomposition, or a restriction of one).
    """
    if not isinstance(finder, MemberFinder):
        raise TypeError("finder must be a MemberFinder (complete by contract)")
    if ell < 1:
        raise ValueError("ell must be positive")
    subtree = d.subtree_masks
    bag = d.bag_masks
    scan = d.deepest_first()
    taken = 0
    members: list[frozenset[int]] = []
    nodes: list[int] = []
    while len(members) < ell:
        for x in scan:
            region = subtree[x] & ~taken
            if not region:
                continue
            found = finder(from_mask(region))
            if found is not None:
                members.append(found)
                nodes.append(x)
                taken |= bag[x]
                break
        else:
            return Hitting(from_mask(taken & subtree[0]), tuple(nodes))
    return Packing(tuple(members), tuple(nodes))


def validate_packing_or_hitting(g: Graph, d: TreeDecomposition, finder: MemberFinder, ell: int,
                                result: Packing | Hitting) -> list[str]:
    problems = []
    universe = d.subtree_masks[0]
    if isinstance(result, Packing):
        if len(result.members) != ell:
            problems.append(f"packing has {len(result.members)} members, expected {ell}")
        owner: dict[int, int] = {}
        for i, member in enumerate(result.members):
            if to_mask(member) & ~universe:
                problems.append(f"member {i} leaves the decomposition's vertex set")
            if not g.is_connected(member):
                problems.append(f"member {i} is not connected")
            elif not finder.is_member(member):
                problems.append(f"member {i} is not in the family")
            for v in sorted(member):
                if v in owner:
                    problems.append(f"members {owner[v]} and {i} share vertex {v}")
                owner[v] = i
    elif isinstance(result, Hitting):
        if len(result.nodes) > ell - 1:
            problems.append(f"hitting set uses {len(result.nodes)} bags, limit {ell - 1}")
        if set(result.nodes) - set(range(len(d.bags))):
            problems.append("hitting set names unknown nodes")
        elif result.vertices != d.union_of(result.nodes):
            problems.append("hitting set is not the union of its named bags")
        witness = finder(from_mask(universe & ~to_mask(result.vertices)))
        if witness is not None:
            problems.append(f"member {sorted(witness)} avoids the hitting set")
    else:
        problems.append(f"unknown result type {type(result).__name__}")
    return problems
