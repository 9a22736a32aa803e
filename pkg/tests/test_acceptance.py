"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import hashlib
import os
import random
import subprocess
import sys
import time

import networkx as nx

from oracles import (
    PATTERNS,
    SubgraphFamily,
    brute_pathwidth,
    brute_treedepth,
    brute_treewidth,
    max_disjoint,
    rand_graph,
)
from tmpk import results
from tmpk.covering import Packing, packing_or_hitting, validate_packing_or_hitting
from tmpk.decompositions import exact_pathwidth, exact_treedepth, exact_treewidth
from tmpk.excluded_path import (
    LongPath,
    PathFamily,
    PathPartitionResult,
    decompose_excluded_path,
    validate_long_path,
    validate_path_partition,
)
from tmpk.excluded_tree import (
    TreePartitionResult,
    decompose_excluded_tree,
    decompose_excluded_tree_theorem,
    validate_tree_partition,
)
from tmpk.gadgets import clique_number, lower_bound_graph, random_screened_instance, verify_gadget_claims
from tmpk.graph import Graph, RootedTree, complete_dary_tree, complete_graph, path_graph, star_graph, strong_product, tree_params
from tmpk.minors import find_rooted_tree_model, longest_path, validate_model

LINES = []
PARAMS = [(1, 2), (1, 3), (2, 2), (2, 3)]


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({title}): {detail}"
    LINES.append(line)
    print(line)
    return ok


def tree_run_problems(g, dec, out, h, d):
    if isinstance(out, TreePartitionResult):
        problems = validate_tree_partition(g, dec, out)
        if out.parts[0] != frozenset({0}) or 0 not in out.bags[0]:
            problems.append("root part misplaced")
        if any(len(p) > d + h - 2 for p in out.provenance):
            problems.append("too many bags for a part")
        return problems
    problems = validate_model(g, out.pattern, out)
    if out.pattern.graph != complete_dary_tree(h, d).graph:
        problems.append("model of the wrong pattern")
    return problems


# ---------------------------------------------------------------------------


def test_criterion_1_dichotomy_soundness():
    rng = random.Random(1001)
    start = time.time()
    runs = invalid = screened = screened_ok = 0
    for _ in range(220):
        g = rand_graph(rng, rng.randint(4, 12), rng.choice([0.15, 0.3]), connected=True)
        dec = exact_treewidth(g)[1]
        for h, d in PARAMS:
            out = decompose_excluded_tree(g, dec, 0, h, d)
            runs += 1
            if tree_run_problems(g, dec, out, h, d):
                invalid += 1
            if find_rooted_tree_model(g, complete_dary_tree(h, d)) is None:
                screened += 1
                if isinstance(out, TreePartitionResult) and out.quotient_width <= 2 * h - 1:
                    screened_ok += 1
    elapsed = time.time() - start
    ok = invalid == 0 and screened == screened_ok and screened > 0 and elapsed < 600
    assert report(1, "dichotomy soundness", ok,
                  f"{runs} runs on 220 graphs, {invalid} invalid; minor-free subset "
                  f"{screened_ok}/{screened} valid partitions; {elapsed:.1f}s")


def _screen(rng, pattern, want, lo, hi):
    found = []
    while len(found) < want:
        g = rand_graph(rng, rng.randint(lo, hi), rng.choice([0.15, 0.25, 0.4]), connected=True)
        if find_rooted_tree_model(g, pattern) is None:
            found.append(g)
    return found


def test_criterion_2_theorem_width_bound():
    rng = random.Random(2002)
    details, ok = [], True
    for name, tree, bound in [("P_5", path_graph(5), 8), ("K_{1,3}", star_graph(3), 6)]:
        t, h, d, center = tree_params(tree)
        pattern = RootedTree(tree, center)
        worst, count = 0, 0
        for g in _screen(rng, pattern, 60, 3, 12):
            res = decompose_excluded_tree_theorem(g, tree)
            if not isinstance(res.outcome, TreePartitionResult):
                ok = False
                continue
            worst = max(worst, res.outcome.width)
            count += 1
            ok &= res.outcome.width <= bound == (max(d, 2) + h - 2) * (t - 1)
        details.append(f"{name}: {count} instances, max part {worst} <= {bound}")
    assert report(2, "width bound with exact path-decomposition", ok, "; ".join(details))


def test_criterion_3_oracle_agreement():
    rng = random.Random(7)
    agree = total = 0
    bad_partitions = 0
    for _ in range(400):
        n = rng.randint(4, 10)
        p = rng.choice([0.15, 0.3])
        h, d = rng.choice(PARAMS)
        g = rand_graph(rng, n, p, connected=True)
        dec = exact_treewidth(g)[1]
        has = find_rooted_tree_model(g, complete_dary_tree(h, d)) is not None
        out = decompose_excluded_tree(g, dec, 0, h, d)
        total += 1
        agree += (not isinstance(out, TreePartitionResult)) == has
        if isinstance(out, TreePartitionResult) and validate_tree_partition(g, dec, out):
            bad_partitions += 1
    rate = agree / total
    ok = rate >= 0.95 and bad_partitions == 0
    assert report(3, "oracle agreement", ok,
                  f"{agree}/{total} = {rate:.2%} agree (target 95%); "
                  f"{total - agree} partition-on-minor runs, {bad_partitions} failing validation")


def test_criterion_4_excluded_path():
    rng = random.Random(4004)
    partitions = certificates = width_checked = 0
    failures = []
    while partitions < 210 or certificates < 60:
        h = rng.choice([1, 2, 3])
        g = rand_graph(rng, rng.randint(2, 14), rng.choice([0.06, 0.1, 0.15, 0.25]))
        pw, pd = exact_pathwidth(g)
        dec = pd.to_tree()
        out = decompose_excluded_path(g, dec, h)
        short = len(longest_path(g)) <= 2 * h
        if short:
            if partitions >= 210:
                continue
            partitions += 1
            if not isinstance(out, PathPartitionResult):
                failures.append("no partition on a short-path input")
                continue
            if validate_path_partition(g, dec, out) or exact_treedepth(out.quotient)[0] > h:
                failures.append("partition invalid")
            if any(len(x) > 2 for x in out.provenance):
                failures.append("part in more than two bags")
            if pw <= 2 * h - 1:
                width_checked += 1
                if out.width > 4 * h:
                    failures.append(f"part of size {out.width} > {4 * h}")
        else:
            if certificates >= 60:
                continue
            certificates += 1
            if not isinstance(out, LongPath) or validate_long_path(g, out):
                failures.append("long-path input without a valid certificate")
    ok = not failures and width_checked > 0
    assert report(4, "excluded-path suite", ok,
                  f"{partitions} short-path graphs (td and bag checks), {width_checked} with part <= 4h check, "
                  f"{certificates} long-path certificates; failures: {failures[:3] or 'none'}")


def test_criterion_5_gadgets():
    notes, ok = [], True
    for c in range(1, 6):
        g, _ = lower_bound_graph(1, c)
        ok &= find_rooted_tree_model(g, complete_dary_tree(1, 3)) is None
    notes.append("(1,c) T_{1,3}-free for c<=5")
    g, _ = lower_bound_graph(2, 1)
    rep = verify_gadget_claims(g, 2, 1)
    ok &= g.n == 11 and clique_number(g) >= 4 and rep["partitions"]["status"] == "ok"
    notes.append(f"(2,1): n={g.n}, clique {clique_number(g)}, singleton-partition check {rep['partitions']['status']}")

    rng = random.Random(5005)
    p5 = RootedTree(path_graph(5), 2)
    lo, hi = 99, -1
    for g in _screen(rng, p5, 40, 3, 12):
        res = decompose_excluded_tree_theorem(g, path_graph(5))
        ok &= isinstance(res.outcome, TreePartitionResult)
        pw = exact_pathwidth(res.outcome.quotient)[0]
        lo, hi = min(lo, pw), max(hi, pw)
    ok &= 0 <= lo and hi <= 3
    notes.append(f"P_5 window: quotient pw in [{lo}, {hi}] within [0, 3]")

    worst = -1
    for seed in range(30):
        g = random_screened_instance(2, 3, random.Random(seed).randint(6, 12), 0.25, seed)
        dec = exact_treewidth(g)[1]
        out = decompose_excluded_tree(g, dec, 0, 2, 3)
        ok &= isinstance(out, TreePartitionResult)
        worst = max(worst, exact_pathwidth(out.quotient)[0])
    ok &= worst <= 3
    notes.append(f"T_{{2,3}} window: max quotient pw {worst} <= 3")
    assert report(5, "gadget claims", ok, "; ".join(notes))


def test_criterion_6_product_inequality():
    rng = random.Random(6006)
    checked, ok = 0, True
    for _ in range(25):
        h = rand_graph(rng, rng.randint(1, 7), rng.choice([0.2, 0.4, 0.6]))
        pw_h = exact_pathwidth(h)[0]
        for c in (1, 2):
            pw = exact_pathwidth(strong_product(h, complete_graph(c)))[0]
            ok &= pw <= c * (pw_h + 1) - 1
            checked += 1
    assert report(6, "product pathwidth inequality", ok, f"{checked} (H, c) pairs, no violation" if ok else
                  f"{checked} pairs, violation found")


def test_criterion_7_solver_cross_validation():
    rng = random.Random(7007)
    mismatches, total = 0, 0
    for n in range(1, 7):
        for _ in range(100):
            g = rand_graph(rng, n, rng.choice([0.2, 0.4, 0.6, 0.8]))
            total += 1
            if (exact_pathwidth(g)[0] != brute_pathwidth(g)
                    or exact_treewidth(g)[0] != brute_treewidth(g)
                    or exact_treedepth(g)[0] != brute_treedepth(g)):
                mismatches += 1
    assert report(7, "solver cross-validation", mismatches == 0,
                  f"{total} graphs (100 per n, n=1..6), {mismatches} mismatches against brute force")


def test_criterion_8_covering_engine():
    rng = random.Random(8008)
    packings = hittings = 0
    failures = []
    for i in range(100):
        g = rand_graph(rng, rng.randint(3, 10), rng.choice([0.2, 0.35, 0.5]))
        dec = exact_treewidth(g)[1]
        ell = rng.choice([2, 3])
        kind = rng.choice(["edge", "P3", "triangle", "path4"])
        fam = PathFamily(g, 4) if kind == "path4" else SubgraphFamily(g, PATTERNS[kind])
        res = packing_or_hitting(g, dec, fam, ell)
        problems = validate_packing_or_hitting(g, dec, fam, ell, res)
        reference = SubgraphFamily(g, PATTERNS.get(kind) or nx.path_graph(4))
        members = list(reference.copies(range(g.n)))
        if isinstance(res, Packing):
            packings += 1
            if max_disjoint(members, ell) < ell:
                problems.append("brute force finds no packing")
        else:
            hittings += 1
            if len(res.nodes) > ell - 1 or any(not (m & res.vertices) for m in members):
                problems.append("hitting set misses a member")
        if problems:
            failures.append((i, problems[0]))
    assert report(8, "covering engine", not failures,
                  f"100 instances: {packings} packings confirmed by brute force, {hittings} hittings "
                  f"re-queried; failures: {failures[:3] or 'none'}")


# ---------------------------------------------------------------------------
# determinism


def suite_digest() -> str:
    """Hash of every result document produced by a fixed-seed mini suite."""
    docs = []
    for seed in range(12):
        rng = random.Random(seed)
        g = rand_graph(rng, rng.randint(4, 11), 0.3, connected=True)
        dec = exact_pathwidth(g)[1].to_tree()
        for h, d in PARAMS:
            out = decompose_excluded_tree(g, dec, 0, h, d)
            if isinstance(out, TreePartitionResult):
                docs.append(results.tree_partition_document(g, dec, out, {"seed": seed}))
            else:
                docs.append(results.model_document(g, out, {"h": h, "d": d, "seed": seed}))
        for h in (1, 2, 3):
            out = decompose_excluded_path(g, dec, h)
            if isinstance(out, LongPath):
                docs.append(results.long_path_document(g, out, {"seed": seed}))
            else:
                docs.append(results.path_partition_document(g, dec, out, {"seed": seed}))
        s = random_screened_instance(2, 2, 9, 0.3, seed)
        sdec = exact_pathwidth(s)[1].to_tree()
        docs.append(results.tree_partition_document(s, sdec, decompose_excluded_tree(s, sdec, 0, 2, 2),
                                                    {"seed": seed}))
    g, spine = lower_bound_graph(2, 1)
    docs.append(results.gadget_document(g, spine, verify_gadget_claims(g, 2, 1), {"h": 2, "c": 1}))
    blob = "".join(results.dumps(doc) for doc in docs)
    return f"{len(docs)}:{hashlib.sha256(blob.encode()).hexdigest()}"


def test_criterion_9_determinism():
    here = os.path.dirname(os.path.abspath(__file__))
    first = suite_digest()
    second = suite_digest()
    digests = {first, second}
    for hash_seed in ("1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=hash_seed)
        proc = subprocess.run([sys.executable, "-c", "import test_acceptance as t; print(t.suite_digest())"],
                              cwd=here, env=env, capture_output=True, text=True, check=True)
        digests.add(proc.stdout.strip())
    count = first.split(":")[0]
    assert report(9, "determinism", len(digests) == 1,
                  f"{count} documents, 4 runs (2 in fresh interpreters with different hash seeds), "
                  f"{len(digests)} distinct digest(s)")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
