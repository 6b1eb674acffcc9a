"""Acceptance suite: one criterion per test, one pass/fail line each.

Everything here runs at the stated tolerance; exact means zero tolerance
in rational arithmetic.  Run with `pytest tests/test_acceptance.py -v -s`.
"""

import itertools
import random
import time
from fractions import Fraction as F

import pytest

from qiso.catalog import standard_actions, verified_catalog
from qiso.coaction import verify_coaction
from qiso.envelope import (annihilator_convolution_check, envelope,
                           verify_universal_property)
from qiso.hall import HallInstance, decide_hall, hall_condition, perfect_matching
from qiso.isometry import (check_D, check_D_commutant, check_injectivity,
                           check_lip1_universal, check_lip_p_universal,
                           check_orthogonality, check_theorem_main,
                           check_winf_universal, sample_orthogonality_inputs)
from qiso.metric import PairSet, random_metric_space
from qiso.quantum_group import verify_quantum_group
from qiso.reports import instance_descriptors, build_instance, SearchConfig
from qiso.transport import (ProbVector, kantorovich_w1, prob_vector,
                            solve_transport, transport_bruteforce,
                            transport_with_power, wasserstein_inf)


def report(num: int, name: str, ok: bool, elapsed: float, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {num:2d} ({name}): {elapsed:.1f}s {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def grid_vectors(n, max_denom):
    vecs = set()
    for q in range(1, max_denom + 1):
        for comp in itertools.product(range(q + 1), repeat=n):
            if sum(comp) == q:
                vecs.add(tuple(F(c, q) for c in comp))
    return sorted(vecs)


def rand_prob(rng, n, denom=6):
    w = [F(rng.randint(1, denom)) for _ in range(n)]
    s = sum(w)
    return prob_vector([x / s for x in w])


# ---------------------------------------------------------------------------


def test_c01_transport_oracle_equivalence():
    t0 = time.time()
    rng = random.Random(101)
    grids = {n: grid_vectors(n, 4) for n in (2, 3, 4)}
    checked = 0
    ok = True
    for k in range(25):
        n = (2, 3, 4)[k % 3]
        cost = [[F(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(n)]
                for _ in range(n)]
        for _ in range(2):
            mu = ProbVector(rng.choice(grids[n]))
            nu = ProbVector(rng.choice(grids[n]))
            lp = solve_transport(mu, nu, cost).value
            oracle = transport_bruteforce(mu, nu, cost)
            ok = ok and lp == oracle
            checked += 1
    elapsed = time.time() - t0
    report(1, "transport oracle equivalence", ok and elapsed < 60, elapsed,
           f"{checked} instances, exact")


def test_c02_strong_duality_and_kantorovich_rubinstein():
    t0 = time.time()
    rng = random.Random(202)
    ok = True
    for k in range(500):
        n = rng.randint(2, 6)
        sp = random_metric_space(n, rng.randint(0, 10 ** 6))
        mu, nu = rand_prob(rng, n), rand_prob(rng, n)
        res = transport_with_power(sp, mu, nu, 1)
        kr, witness = kantorovich_w1(sp, mu, nu)
        ok = ok and res.value == res.duals.objective == kr
    elapsed = time.time() - t0
    report(2, "strong duality + Kantorovich-Rubinstein", ok and elapsed < 60,
           elapsed, "500 instances, exact")


def test_c03_wasserstein_tower():
    t0 = time.time()
    rng = random.Random(303)
    ps = (1, 2, 4, 8, 16, 32)
    tol = 1e-9
    ok = True
    for k in range(500):
        n = rng.randint(2, 6)
        sp = random_metric_space(n, rng.randint(0, 10 ** 6))
        mu, nu = rand_prob(rng, n), rand_prob(rng, n)
        costs = {p: transport_with_power(sp, mu, nu, p).value for p in ps}
        for q, p in zip(ps, ps[1:]):
            ok = ok and costs[q] ** p <= costs[p] ** q  # W_q <= W_p, exact
        r = wasserstein_inf(sp, mu, nu).r
        w32 = float(costs[32]) ** (1 / 32)
        ok = ok and all(float(costs[p]) ** (1 / p) <= float(r) + tol for p in ps)
        ok = ok and float(r) - w32 >= -tol
    elapsed = time.time() - t0
    report(3, "Wasserstein tower and bottleneck", ok and elapsed < 120,
           elapsed, "500 instances, p up to 32")


def test_c04_hall_equivalence_exhaustive():
    t0 = time.time()
    ok = True
    checked = 0
    for n, denom in ((2, 3), (3, 3)):
        vecs = [ProbVector(v) for v in grid_vectors(n, denom)]
        cells = list(itertools.product(range(n), repeat=2))
        for bits in range(1 << (n * n)):
            Y = PairSet.from_pairs(
                n, [cells[k] for k in range(n * n) if bits >> k & 1])
            for mu in vecs:
                for nu in vecs:
                    inst = HallInstance(mu, nu, Y)
                    holds, _ = hall_condition(inst)
                    ok = ok and holds == decide_hall(inst).feasible
                    checked += 1
            if not ok:
                break
    elapsed = time.time() - t0
    report(4, "Hall equivalence, exhaustive", ok and elapsed < 600, elapsed,
           f"{checked} instances (all Y, denominator-{3} grid)")


def test_c05_classical_hall_vs_bruteforce():
    t0 = time.time()
    rng = random.Random(505)
    ok = True
    for k in range(1000):
        n = rng.randint(2, 7)
        adj = [[1 if rng.random() < rng.choice((0.3, 0.5, 0.7)) else 0
                for _ in range(n)] for _ in range(n)]
        kind, payload = perfect_matching(adj)
        oracle = next((perm for perm in itertools.permutations(range(n))
                       if all(adj[i][perm[i]] for i in range(n))), None)
        if kind == "matching":
            ok = ok and oracle is not None
            ok = ok and all(adj[i][payload[i]] for i in range(n))
        else:
            ok = ok and oracle is None
            nbrs = {j for i in payload for j in range(n) if adj[i][j]}
            ok = ok and len(nbrs) < len(payload)
    elapsed = time.time() - t0
    report(5, "classical marriage vs permutation search",
           ok and elapsed < 60, elapsed, "1000 graphs, sizes <= 7")


def test_c06_theorem_main_reproduced():
    t0 = time.time()
    ok = True
    details = []
    for entry in standard_actions():
        if not check_D(entry.action).holds:
            continue
        tm = check_theorem_main(entry.action).holds
        inj = check_injectivity(entry.action)
        samples = sample_orthogonality_inputs(entry.action, 1000, seed=606)
        orth = all(check_orthogonality(entry.action, *s, tol=1e-9)
                   for s in samples)
        if not (tm and inj and orth and len(samples) == 1000):
            ok = False
            details.append(entry.name)
    elapsed = time.time() - t0
    report(6, "level-set coupling + injectivity + orthogonality",
           ok, elapsed, f"zero exceptions required {details}")


@pytest.fixture(scope="module")
def population_flags():
    """Catalog + 200 random actions with all universal verdicts."""
    config = SearchConfig(catalog=None, random_actions=200, n_range=(3, 4),
                          seed=777)
    rows = []
    for desc in instance_descriptors(config):
        action = build_instance(desc)
        assert verify_quantum_group(action.group).passed(1e-9)
        assert verify_coaction(action).passed(1e-9)
        flags = {
            "name": desc.get("name", str(desc.get("seed"))),
            "D": check_D(action).holds,
            "Lip_1": check_lip1_universal(action).holds,
            "Lip_1_dual_route": check_lip_p_universal(action, 1).holds,
            "Lip_2": check_lip_p_universal(action, 2).holds,
            "Lip_3": check_lip_p_universal(action, 3).holds,
            "Lip_inf": check_winf_universal(action).holds,
            "D_commutant": check_D_commutant(action).holds,
        }
        rows.append(flags)
    return rows


def test_c07_tower_of_conditions(population_flags):
    t0 = time.time()
    order = ["D", "Lip_inf", "Lip_3", "Lip_2", "Lip_1"]
    violations = []
    for row in population_flags:
        for i, strong in enumerate(order):
            for weak in order[i + 1:]:
                if row[strong] and not row[weak]:
                    violations.append((row["name"], strong, weak))
    elapsed = time.time() - t0
    report(7, "tower of conditions over catalog + 200 random",
           not violations, elapsed,
           f"{len(population_flags)} actions, violations: {violations[:3]}")


def test_c08_finite_dimensional_equivalence(population_flags):
    t0 = time.time()
    bad_equiv = [r["name"] for r in population_flags if r["D"] != r["Lip_1"]]
    bad_dual = [r["name"] for r in population_flags
                if r["Lip_1"] != r["Lip_1_dual_route"]]
    bad_comm = [r["name"] for r in population_flags
                if r["D"] != r["D_commutant"]]
    ok = not bad_equiv and not bad_dual and not bad_comm
    elapsed = time.time() - t0
    report(8, "(D) <=> universal (Lip_1), commutant form", ok, elapsed,
           f"discrepancies {bad_equiv + bad_dual + bad_comm}")


def test_c09_envelope_correctness():
    t0 = time.time()
    ok = True
    details = []
    for entry in standard_actions():
        action = entry.action
        env = envelope(action)
        if hasattr(action, "classical_group"):
            d = action.space.dist
            isos = [g for g in action.classical_group
                    if all(d[g[x]][g[y]] == d[x][y]
                           for x in range(action.n) for y in range(action.n))]
            if env.dimension != len(isos):
                ok = False
                details.append(f"{entry.name}: dim {env.dimension} != {len(isos)}")
        if len(envelope(env.induced).ideal) != 0:
            ok = False
            details.append(f"{entry.name}: not idempotent")
        ups = verify_universal_property(action, env)
        if ups["violations"]:
            ok = False
            details.append(f"{entry.name}: factorization failures")
        if not annihilator_convolution_check(action.group, env.ideal,
                                             samples=500, seed=909):
            ok = False
            details.append(f"{entry.name}: convolution closure")
    elapsed = time.time() - t0
    report(9, "envelope vs classical subgroup + universality",
           ok and elapsed < 300, elapsed, "; ".join(details))


def test_c10_verifier_sensitivity():
    t0 = time.time()
    entries = verified_catalog(tol=1e-9)
    baseline_ok = all(verify_quantum_group(e.action.group).passed(1e-10)
                      for e in entries)
    rng = random.Random(1010)
    detected = 0
    injected = 0
    misses = []
    while injected < 50:
        entry = rng.choice(entries)
        action = entry.action
        qg = action.group
        target = rng.choice(("delta", "epsilon", "kappa", "u"))
        injected += 1
        if target == "u":
            from qiso.coaction import CoAction
            from qiso.algebra import AlgElement
            i = rng.randrange(action.n)
            j = rng.randrange(action.n)
            data = [m.copy() for m in action.u[i][j].data]
            k = rng.randrange(len(data))
            a = rng.randrange(data[k].shape[0])
            b = rng.randrange(data[k].shape[1])
            data[k][a, b] += 1e-3
            u = [list(row) for row in action.u]
            u[i][j] = AlgElement(qg.algebra, tuple(data))
            mutated = CoAction(qg, action.space, tuple(tuple(r) for r in u))
            worst = verify_coaction(mutated, check_faithful=False).worst()
        else:
            from qiso.quantum_group import QuantumGroup
            delta = qg.delta.copy()
            epsilon = qg.epsilon.copy()
            kappa = qg.kappa.copy()
            dim = qg.dim
            if target == "delta":
                delta[rng.randrange(dim), rng.randrange(dim),
                      rng.randrange(dim)] += 1e-3
            elif target == "epsilon":
                epsilon[rng.randrange(dim)] += 1e-3
            else:
                kappa[rng.randrange(dim), rng.randrange(dim)] += 1e-3
            mutated = QuantumGroup(qg.algebra, delta, epsilon, kappa)
            worst = verify_quantum_group(mutated).worst()
        if worst >= 1e-4:
            detected += 1
        else:
            misses.append((entry.name, target, worst))
    elapsed = time.time() - t0
    report(10, "verifier fault injection", baseline_ok and detected == 50,
           elapsed, f"{detected}/50 detected; misses: {misses}")
