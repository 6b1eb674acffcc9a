"""Isometry condition checks, cross-validated against classical oracles."""

import numpy as np
import pytest

from qiso.algebra import extreme_state, random_state
from qiso.catalog import (cycle_metric, dihedral_projection_action,
                          equilateral_metric, four_point_blocks,
                          four_point_asymmetric, permutation_action,
                          standard_actions, three_point_isosceles,
                          trivial_action)
from qiso.isometry import (HypothesisViolated, check_ball_identity, check_D,
                           check_D_commutant, check_D_state,
                           check_injectivity, check_level_coupling_state,
                           check_lip1_universal, check_lip_p_state,
                           check_lip_p_universal, check_lip_seminorm_state,
                           check_orthogonality, check_theorem_main,
                           check_winf_universal, sample_orthogonality_inputs)


def classical_isometries(action):
    """Oracle: group elements preserving the metric, by direct enumeration."""
    d = action.space.dist
    n = action.n
    return [g for g in action.classical_group
            if all(d[g[x]][g[y]] == d[x][y] for x in range(n) for y in range(n))]


def classical_contraction_oracle(action):
    """Oracle for the universal W_p conditions on C(G): every point
    evaluation must contract distances (no transport solver involved)."""
    d = action.space.dist
    n = action.n
    return all(float(d[g[x]][g[y]]) <= float(d[x][y]) + 1e-12
               for g in action.classical_group
               for x in range(n) for y in range(n))


S3_FULL = permutation_action(three_point_isosceles(), [(1, 2, 0), (1, 0, 2)],
                             name="s3-full")
CYCLE4 = permutation_action(cycle_metric(4), [(1, 2, 3, 0)], name="z4")
QUANTUM_ISO = dihedral_projection_action(four_point_blocks(), 4)
QUANTUM_NONISO = dihedral_projection_action(four_point_asymmetric(), 4)


def test_check_D_trivial_and_cyclic():
    assert check_D(trivial_action(three_point_isosceles())).holds
    assert check_D(CYCLE4).holds


def test_check_D_s3_fails_with_witness():
    verdict = check_D(S3_FULL)
    assert not verdict.holds
    assert verdict.witness["residual"] > 0.5
    assert tuple(verdict.witness["pair"]) in {(x, y) for x in range(3) for y in range(3)}


def test_commutant_form_agrees_everywhere():
    for entry in standard_actions():
        assert check_D(entry.action).holds == check_D_commutant(entry.action).holds


def test_ball_identity_matches_check_D():
    for action in (CYCLE4, QUANTUM_ISO):
        assert check_ball_identity(action) < 1e-10
    assert check_ball_identity(S3_FULL) > 1e-2  # fails when (D) fails


def test_counit_state_always_lip_p():
    for action in (S3_FULL, QUANTUM_NONISO):
        eps = action.group.counit_state()
        for p in (1, 2, float("inf")):
            assert check_lip_p_state(action, eps, p).holds
        assert check_D_state(action, eps).holds  # trivial action is isometric


def test_classical_isometry_states():
    group = S3_FULL.classical_group
    isos = classical_isometries(S3_FULL)
    for gi, g in enumerate(group):
        psi = extreme_state(S3_FULL.group.algebra, gi, np.array([1.0]))
        verdict = check_lip_p_state(S3_FULL, psi, 1)
        assert verdict.holds == (g in isos)


def test_haar_state_of_isometric_actions():
    from qiso.quantum_group import haar_state
    for action in (CYCLE4, QUANTUM_ISO):
        h = haar_state(action.group).state
        for p in (1, 2, 4, float("inf")):
            assert check_lip_p_state(action, h, p).holds


def test_lip1_universal_matches_classical_check():
    for action in (S3_FULL, CYCLE4,
                   permutation_action(equilateral_metric(3),
                                      [(1, 2, 0), (1, 0, 2)])):
        expected = classical_contraction_oracle(action)
        assert check_lip1_universal(action).holds == expected


def test_lip1_universal_failure_witness_recovers_classical_element():
    verdict = check_lip1_universal(S3_FULL)
    assert not verdict.holds
    psi = verdict.witness["state"]
    # the witness state is a character of C(S3), i.e. a group element,
    # and that element must fail the contraction test
    block = verdict.witness["block"]
    g = S3_FULL.classical_group[block]
    d = S3_FULL.space.dist
    assert any(d[g[x]][g[y]] > d[x][y] for x in range(3) for y in range(3))
    assert not check_lip_p_state(S3_FULL, psi, 1).holds


@pytest.mark.parametrize("p", [1, 2, 3])
def test_lip_p_universal_equals_classical_oracle(p):
    for action in (S3_FULL, CYCLE4,
                   permutation_action(four_point_asymmetric(), [(1, 0, 3, 2)])):
        expected = classical_contraction_oracle(action)
        assert check_lip_p_universal(action, p).holds == expected


def test_lip_p_universal_p1_equals_lip1_universal():
    for entry in standard_actions():
        a = check_lip1_universal(entry.action).holds
        b = check_lip_p_universal(entry.action, 1).holds
        assert a == b, entry.name


def test_winf_universal_examples():
    assert check_winf_universal(trivial_action(three_point_isosceles())).holds
    assert check_winf_universal(QUANTUM_ISO).holds
    assert not check_winf_universal(QUANTUM_NONISO).holds


def test_winf_witness_is_a_failing_state():
    verdict = check_winf_universal(QUANTUM_NONISO)
    psi = verdict.witness["state"]
    assert not check_lip_p_state(QUANTUM_NONISO, psi, float("inf"), tol=1e-7).holds


def test_winf_universal_implies_sampled_states():
    for action in (CYCLE4, QUANTUM_ISO):
        assert check_winf_universal(action).holds
        for k in range(25):
            psi = random_state(action.group.algebra, 101 * k)
            assert check_lip_p_state(action, psi, float("inf"), tol=1e-8).holds


def test_theorem_main_on_catalog():
    # (D) holds => the level-set coupling condition holds (the main theorem)
    for entry in standard_actions():
        if check_D(entry.action).holds:
            assert check_theorem_main(entry.action).holds, entry.name


def test_theorem_main_implies_winf():
    # level sets sit inside sublevel sets; feasibility is monotone
    for entry in standard_actions():
        tm = check_theorem_main(entry.action).holds
        wi = check_winf_universal(entry.action).holds
        assert (not tm) or wi


def test_level_coupling_per_state_classical():
    from qiso.quantum_group import haar_state
    h = haar_state(CYCLE4.group).state
    assert check_level_coupling_state(CYCLE4, h).holds
    # deterministic coupling for a point evaluation
    psi = extreme_state(CYCLE4.group.algebra, 1, np.array([1.0]))
    assert check_level_coupling_state(CYCLE4, psi).holds


def test_orthogonality_lemma():
    action = QUANTUM_ISO
    # S or T empty: product vanishes trivially
    assert check_orthogonality(action, 0, 1, (), (0,), 0.25)
    for x, y, S, T, delta in sample_orthogonality_inputs(action, 200, seed=3):
        assert check_orthogonality(action, x, y, S, T, delta)
    with pytest.raises(HypothesisViolated):
        check_orthogonality(action, 0, 1, (0,), (1,),
                            float(action.space.dist[0][1]) + 1.0)


def test_orthogonality_trivial_action_scalar_case():
    action = trivial_action(three_point_isosceles())
    for x, y, S, T, delta in sample_orthogonality_inputs(action, 100, seed=5):
        assert check_orthogonality(action, x, y, S, T, delta)


def test_injectivity():
    assert check_injectivity(trivial_action(three_point_isosceles()))
    assert check_injectivity(S3_FULL)
    for entry in standard_actions():
        if check_D(entry.action).holds:
            assert check_injectivity(entry.action), entry.name


def test_lip_seminorm_state_agrees_with_w1_state():
    for action in (S3_FULL, QUANTUM_ISO, QUANTUM_NONISO):
        for k in range(12):
            psi = random_state(action.group.algebra, 7 * k + 1)
            a = check_lip_seminorm_state(action, psi, samples=40, seed=k)
            b = check_lip_p_state(action, psi, 1, tol=1e-8).holds
            assert a == b


def test_tower_on_catalog_and_random_states():
    ps = [1, 2, 3]
    for entry in standard_actions():
        verdicts = {p: check_lip_p_universal(entry.action, p).holds for p in ps}
        verdicts["inf"] = check_winf_universal(entry.action).holds
        d = check_D(entry.action).holds
        if d:
            assert all(verdicts.values()), entry.name
        if verdicts["inf"]:
            assert all(verdicts[p] for p in ps), entry.name
        for q, p in ((1, 2), (2, 3)):
            assert (not verdicts[p]) or verdicts[q], entry.name


def test_finite_dimensional_equivalence():
    # at finite dimension (D) and universal (Lip_1) coincide
    for entry in standard_actions():
        assert check_D(entry.action).holds == check_lip1_universal(entry.action).holds
