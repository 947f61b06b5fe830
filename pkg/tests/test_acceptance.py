"""Acceptance criteria. Each test prints one PASS/FAIL line, then asserts."""

import random
import time

import pytest

from builders import loops, w_chain
from oracles import brute_coker_verdict, brute_ker_verdict, coker_instance, ker_instance, residues
from splicecheck import (
    IntMatrix,
    PreconditionError,
    ReturnPathClass,
    condition_k,
    cuntz_splice,
    filtered_xk,
    graded_groups_isomorphic,
    ideal_lattice,
    induced_coker_iso,
    induced_ker_iso,
    k_theory,
    prim_homeo_under_splice,
    prim_space,
    purely_infinite_report,
    return_path_class,
    smith,
    splice_lattice_map,
    verify_cuntz_splice_invariance,
    verify_desing_splice_commutes,
)
from splicecheck.errors import InconsistencyError
from splicecheck.harness import (
    FuzzConfig,
    _repair,
    fuzz_run,
    gen_random_instance,
    random_emitter_instance,
    random_graph,
)
from splicecheck.intlinalg import FgAbelianGroup
from splicecheck.verifier import build_complex


@pytest.fixture
def verdict(capsys):
    def _verdict(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail

    return _verdict


def test_criterion_1_fuzz_regular(verdict):
    t0 = time.perf_counter()
    s = fuzz_run(FuzzConfig(seed=0, trials=200, max_vertices=8, max_mult=3))
    elapsed = time.perf_counter() - t0
    ok = s.passed == 200 and s.failed == 0 and elapsed <= 60
    verdict(1, "splice invariance on 200 random regular graphs", ok,
            f"{s.passed} passed, {s.failed} failed, {s.skipped} skipped, {elapsed:.1f}s")


def test_criterion_2_o3(verdict):
    g = loops(3)
    res = cuntz_splice(g, "v")
    ok = True
    for h in (g, res.graph):
        kk = k_theory(h)
        ok &= kk.k0 == FgAbelianGroup(0, (2,)) and kk.k1.is_trivial
    X = prim_space(ideal_lattice(res.graph))
    (x,) = X.points
    phi = build_complex(res.graph, X, splice=res).phi[x]
    ok &= phi.to_list() == [[0, 1, 0], [1, 0, 1], [0, 1, 2]]
    ok &= smith(phi).diagonal == (1, 1, 2)
    # hand oracle: the gcd of entries is 1, the gcd of 2x2 minors is 1, the determinant is -2
    ok &= phi.det() == -2 and len(residues(phi)[0]) == 2
    ok &= verify_cuntz_splice_invariance(g, "v").verdict
    verdict(2, "O_3 before and after the splice", ok, f"SNF {smith(phi).diagonal}")


def test_criterion_3_w_chain(verdict):
    g = w_chain()
    lat = ideal_lattice(g)
    ok = len(lat) == 3 and all(lat.le(p, q) or lat.le(q, p) for p in lat.pairs for q in lat.pairs)
    X = prim_space(lat)
    a, b = X.points
    ok &= len(X) == 2 and X.geq(a, b)
    mod = filtered_xk(g, X)
    Z2, Z4 = FgAbelianGroup(0, (2,)), FgAbelianGroup(0, (4,))
    ok &= mod.at[a].k0 == Z2 and mod.at[b].k0 == Z4
    ok &= mod.at[a].k1.is_trivial and mod.at[b].k1.is_trivial
    ok &= mod.k0_injective(a, b) and mod.k0_induced(a, b).to_list() == [[2]]
    ok &= smith(IntMatrix([[2, 0], [1, 2]])).diagonal == (1, 4)
    # coset-order oracle: the class of e_w2 in Z^2/<(2,1),(0,2)> has order 2
    reps, _ = residues(IntMatrix([[2, 0], [1, 2]]))
    ok &= len(reps) == 4
    rep = verify_cuntz_splice_invariance(g, "w1")
    ok &= rep.verdict
    h = prim_homeo_under_splice(g, "w1")
    mod_c = filtered_xk(h.splice.graph, h.target)
    ok &= all(graded_groups_isomorphic(mod.at[x], mod_c.at[h.mapping[x]]) for x in X.points)
    verdict(3, "w1 -> w2 filtered K-theory and explicit psi", ok)


def test_criterion_4_structure_preservation(verdict):
    counts = dict(admissible=0, k=0, pi=0, lattice=0)
    bad = []
    for i in range(500):
        rng = random.Random(f"structure:{i}")
        g = random_graph(rng, 8, 3, omega_entries=rng.randint(0, 1))
        if rng.random() < 0.5:
            g = _repair(g, rng, 3) or g
        cands = [v for v in g.vertices if return_path_class(g, v) is ReturnPathClass.TWO_OR_MORE]
        if not cands:
            continue
        v = rng.choice(cands)
        counts["admissible"] += 1
        gc = cuntz_splice(g, v).graph
        if condition_k(g) != condition_k(gc):
            bad.append((i, "condition_k"))
        counts["k"] += condition_k(g)
        pi, pic = purely_infinite_report(g).verdict, purely_infinite_report(gc).verdict
        if pi != pic:
            bad.append((i, "purely_infinite"))
        counts["pi"] += pi
        if condition_k(g):
            try:
                splice_lattice_map(g, v)
                counts["lattice"] += 1
            except InconsistencyError:
                bad.append((i, "lattice"))
    ok = not bad and counts["admissible"] > 250 and counts["k"] > 100 and counts["pi"] > 50
    verdict(4, "Condition (K), pure infiniteness and lattice preserved", ok, f"{counts}, failures {bad[:5]}")


def test_criterion_5_desingularization_commutes(verdict):
    t0 = time.perf_counter()
    failures = []
    for i in range(50):
        rng = random.Random(f"emitter:{i}")
        g, v = random_emitter_instance(rng)
        depth = 4 + i % 3
        rep = verify_desing_splice_commutes(g, v, {}, depth)
        if not rep.verdict:
            failures.append(i)
    elapsed = time.perf_counter() - t0
    verdict(5, "desingularization commutes with the splice", not failures and elapsed <= 30,
            f"{50 - len(failures)}/50 in {elapsed:.1f}s")


def test_criterion_6_oracle_equivalence(verdict):
    mismatches = []
    for i in range(150):
        Q, M, N, truth = coker_instance(random.Random(f"coker:{i}"))
        assert truth == brute_coker_verdict(Q, M, N)
        if induced_coker_iso(Q, M, N) != truth:
            mismatches.append(("coker", i))
    for i in range(150):
        Q, M, N, _ = ker_instance(random.Random(f"ker:{i}"))
        if induced_ker_iso(Q, M, N) != brute_ker_verdict(Q, M, N, 24, 2):
            mismatches.append(("ker", i))
    verdict(6, "induced kernel and cokernel maps agree with enumeration", not mismatches,
            f"300 instances, mismatches {mismatches[:5]}")


def test_criterion_7_negative_controls(verdict):
    named = []
    for call in (verify_cuntz_splice_invariance, cuntz_splice):
        try:
            call(loops(1), "v")
        except PreconditionError as exc:
            named.append(exc.criterion)
    ok = named == ["condition_k", "return_path_class"]
    cfg = FuzzConfig(seed=0, trials=200, max_vertices=8, max_mult=3)
    caught = total = 0
    for i in range(cfg.trials):
        inst = gen_random_instance(cfg, i)
        if inst is None:
            continue
        total += 1
        rep = verify_cuntz_splice_invariance(*inst, corrupt_psi=True)
        caught += rep.failed_stages() == ["cube"] and any(f.face == "top" for f in rep.cube.failures())
    ok &= total > 0 and caught == total
    verdict(7, "one-loop graphs rejected, corrupted psi caught", ok,
            f"criteria {named}, top face failed on {caught}/{total}")
