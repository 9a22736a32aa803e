import random

import pytest

from oracles import brute_longest_path, naive_has_model, rand_graph
from tmpk.errors import BudgetExceeded, CapExceeded
from tmpk.graph import (
    Graph,
    MinorModel,
    RootedTree,
    complete_dary_tree,
    complete_graph,
    cycle_graph,
    disjoint_union,
    path_graph,
    star_graph,
)
from tmpk.minors import (
    RootConstraint,
    find_path,
    find_rooted_tree_model,
    longest_path,
    validate_model,
    validate_path,
)

PATTERNS = [
    complete_dary_tree(1, 3),
    complete_dary_tree(1, 2),
    RootedTree(path_graph(4), 0),
    RootedTree(path_graph(5), 2),
    complete_dary_tree(2, 1),
    RootedTree(star_graph(3), 1),
]


def test_model_examples():
    m = find_rooted_tree_model(path_graph(3), RootedTree(path_graph(3), 0))
    assert m is not None and all(len(b) == 1 for b in m.branch_sets)
    assert find_rooted_tree_model(path_graph(9), complete_dary_tree(1, 3)) is None
    m = find_rooted_tree_model(complete_graph(4), complete_dary_tree(1, 3))
    assert m is not None and validate_model(complete_graph(4), m.pattern, m) == []


def test_too_few_vertices_means_no_model():
    assert find_rooted_tree_model(complete_graph(12), complete_dary_tree(2, 3)) is None


def test_root_constraint_is_honoured():
    g = disjoint_union(star_graph(3), path_graph(3))
    star = complete_dary_tree(1, 3)
    assert find_rooted_tree_model(g, star, RootConstraint(frozenset({5}))) is None
    # a leaf of the star cannot host the root: growing it to the hub leaves two neighbours
    assert find_rooted_tree_model(g, star, RootConstraint(frozenset({1}))) is None
    m = find_rooted_tree_model(g, star, RootConstraint(frozenset({0, 6})))
    assert m is not None and 0 in m.branch_sets[0]


def test_contraction_needed():
    # subdivided claw: the T_{1,3} model must grow the centre or the legs
    g = Graph(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
    m = find_rooted_tree_model(g, complete_dary_tree(1, 3), RootConstraint(frozenset({3})))
    assert m is not None and m.branch_sets[0] == frozenset({0, 3})
    assert find_rooted_tree_model(g, complete_dary_tree(1, 3), RootConstraint(frozenset({2}))) is None
    assert find_rooted_tree_model(cycle_graph(7), complete_dary_tree(1, 3)) is None


def test_agrees_with_naive_oracle():
    rng = random.Random(3)
    for _ in range(45):
        g = rand_graph(rng, rng.randint(3, 8), 0.4)
        for pattern in PATTERNS:
            touch = frozenset(rng.sample(range(g.n), rng.randint(1, 2))) if rng.random() < 0.5 else None
            ours = find_rooted_tree_model(g, pattern, RootConstraint(touch))
            assert (ours is not None) == naive_has_model(g, pattern, touch), (g.edges, pattern.graph.edges, touch)
            if ours is not None:
                assert validate_model(g, pattern, ours) == []
                if touch is not None:
                    assert ours.branch_sets[pattern.root] & touch


def test_model_restricted_to_subtree_is_valid():
    rng = random.Random(12)
    pattern = complete_dary_tree(2, 2)
    sub = RootedTree(Graph(4, [(0, 1), (1, 2), (1, 3)]), 0)   # root - child - two grandchildren
    keep = [0, 1, 3, 4]
    checked = 0
    while checked < 10:
        g = rand_graph(rng, 11, 0.3, connected=True)
        m = find_rooted_tree_model(g, pattern)
        if m is None:
            continue
        restricted = MinorModel(sub, tuple(m.branch_sets[x] for x in keep))
        assert validate_model(g, sub, restricted) == []
        checked += 1


def test_validate_model_examples():
    g = path_graph(4)
    pattern = RootedTree(path_graph(3), 0)
    assert validate_model(g, pattern, MinorModel(pattern, ({0}, {1}, {2}))) == []
    overlap = validate_model(g, pattern, MinorModel(pattern, ({0, 1}, {1}, {2})))
    assert any("disjointness" in p for p in overlap)
    missing = validate_model(g, pattern, MinorModel(pattern, ({0}, {1}, {3})))
    assert missing == ["pattern edge 1-2 has no host edge witness"]
    broken = validate_model(g, pattern, MinorModel(pattern, ({0, 2}, {1}, {3})))
    assert any("not connected" in p for p in broken)


def test_budget_exceeded_is_loud():
    g = rand_graph(random.Random(1), 16, 0.35, connected=True)
    with pytest.raises(BudgetExceeded):
        find_rooted_tree_model(g, complete_dary_tree(2, 3), max_steps=5)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("TMPK_MAX_STEPS", "3")
    g = rand_graph(random.Random(1), 16, 0.35, connected=True)
    with pytest.raises(BudgetExceeded):
        find_rooted_tree_model(g, complete_dary_tree(2, 3))


@pytest.mark.parametrize("g,expected", [
    (path_graph(5), 5),
    (disjoint_union(Graph(1, []), path_graph(2)), 2),
    (cycle_graph(5), 5),
    (star_graph(4), 3),
])
def test_longest_path_examples(g, expected):
    p = longest_path(g)
    assert len(p) == expected
    assert validate_path(g, p) == []


def test_longest_path_matches_enumeration():
    rng = random.Random(21)
    for _ in range(40):
        g = rand_graph(rng, rng.randint(1, 8), rng.choice([0.2, 0.35, 0.5]))
        p = longest_path(g)
        assert validate_path(g, p) == []
        assert len(p) == brute_longest_path(g)


def test_longest_path_monotone_under_edge_addition():
    rng = random.Random(5)
    for _ in range(30):
        g = rand_graph(rng, 9, 0.25)
        missing = [(u, v) for u in range(9) for v in range(u + 1, 9) if not g.has_edge(u, v)]
        if not missing:
            continue
        bigger = Graph(9, list(g.edges) + [rng.choice(missing)])
        assert len(longest_path(bigger)) >= len(longest_path(g))


def test_longest_path_cap():
    with pytest.raises(CapExceeded):
        longest_path(path_graph(19))


def test_find_path_respects_available_set():
    g = cycle_graph(6)
    assert find_path(g, 4, {0, 1, 2, 4}) is None
    p = find_path(g, 4, {0, 1, 2, 3})
    assert p is not None and set(p) == {0, 1, 2, 3}


def test_validate_path():
    g = path_graph(4)
    assert validate_path(g, [0, 1, 2], 3) == []
    assert validate_path(g, [0, 2]) == ["0-2 is not an edge"]
    assert validate_path(g, [0, 1, 0])
    assert validate_path(g, [0, 1], 3)
