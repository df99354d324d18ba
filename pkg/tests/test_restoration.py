from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qclone import restoration as rs
from qclone.montecarlo import monte_carlo
from qclone.cloner import clone
from qclone.errors import ConstraintError, QCloneError
from qclone.linalg import dagger, projector, trace_distance
from qclone.povm import random_unitary
from qclone.states import BELL_LABELS, I2, SIGMA_Y, SIGMA_Z, random_pure_ket

from conftest import pure_kets


def test_scenario_targets_disjoint_from_measured():
    for name in rs.SCENARIOS:
        sc = rs.get_scenario(name)
        assert sc.target not in sc.measured
        assert len(sc.measured) == 2
    with pytest.raises(QCloneError):
        rs.get_scenario("teleport")


def test_tables_are_unitary():
    assert rs.check_table_unitaries()
    assert np.allclose(rs.TABLE_CLONES["phi+"], 1j * SIGMA_Y)
    assert np.allclose(rs.TABLE_CLONE_ANCILLA["psi-"], I2)


def test_bell_distribution_on_clones(rng):
    for _ in range(50):
        probs, _ = rs.bell_probabilities(clone(random_pure_ket(rng)).state, [0, 1])
        assert np.allclose(probs, [1 / 3, 1 / 3, 1 / 3, 0], atol=1e-12)


def test_bell_distribution_on_clone_ancilla(rng):
    for _ in range(50):
        probs, _ = rs.bell_probabilities(clone(random_pure_ket(rng)).state, [1, 2])
        assert np.allclose(probs, [1 / 12, 1 / 12, 1 / 12, 3 / 4], atol=1e-12)


def test_bell_measure_phi_plus_conditional_state(rng):
    al, be = random_pure_ket(rng)
    _, conds = rs.bell_probabilities(clone([al, be]).state, [0, 1])
    c = conds[0] / np.linalg.norm(conds[0])
    assert np.allclose(c, [-be, al], atol=1e-12)
    label, ket, p = rs.bell_measure(clone([al, be]).state, [0, 1], np.random.default_rng(0))
    assert label in BELL_LABELS[:3]
    assert np.isclose(p, 1 / 3) and np.isclose(np.linalg.norm(ket), 1)


def test_computational_measure_examples():
    _, _, p = rs.computational_measure(clone([1, 0]).state, 0, _FixedU(0.0))
    assert np.isclose(p, 5 / 6)
    v = np.zeros(8)
    v[0b010] = 1
    bit, ket, p = rs.computational_measure(v, 1, np.random.default_rng(0))
    assert bit == 1 and p == 1.0
    assert np.allclose(ket, [1, 0, 0, 0])


class _FixedU:
    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


def test_sample_skips_zero_probability():
    assert rs._sample([0.0, 1.0], 0.0) == 1
    assert rs._sample([0.5, 0.5, 0.0], 0.999999999) == 1
    assert rs._sample([0.25, 0.75], 0.3) == 1


def test_unequal_bits_probability_uniform_input():
    # averaged over a 2-design of inputs (the six axis states)
    from qclone.states import AXIS_KETS

    tot = 0.0
    for k in AXIS_KETS.values():
        for b in rs.enumerate_branches("three-party-ancilla", k):
            if b.outcome in ("01", "10"):
                tot += b.probability
    assert np.isclose(tot / 6, 1 / 3)


def test_apply_correction_examples(rng):
    al, be = random_pure_ket(rng)
    out = rs.apply_correction([-be, al], "phi+", rs.TABLE_CLONES)
    assert np.allclose(out, [al, be])
    out = rs.apply_correction([-al, be], "psi+", rs.TABLE_CLONES)
    assert np.allclose(out, [al, be])
    out = rs.apply_correction([al, be], "psi-", rs.TABLE_CLONE_ANCILLA)
    assert np.allclose(out, [al, be])
    with pytest.raises(QCloneError):
        rs.apply_correction([al, be], "psi-", rs.TABLE_CLONES)


def test_apply_filter_on_unequal_bit_branches(rng):
    al, be = random_pure_ket(rng)
    v = np.sqrt(2 / 3) * al * np.array([1, 0]) + np.sqrt(1 / 6) * be * np.array([0, 1])
    v = v / np.linalg.norm(v)
    flt = rs.FilterOperation.from_success(np.diag([0.5, 1.0]))
    ok, post, p = rs.apply_filter(v, flt, _FixedU(0.0))
    assert ok and np.allclose(post, [al, be], atol=1e-12)
    assert np.isclose(p, (1 / 6) / (2 / 3 * abs(al) ** 2 + 1 / 6 * abs(be) ** 2))
    w = np.sqrt(1 / 6) * al * np.array([1, 0]) + np.sqrt(2 / 3) * be * np.array([0, 1])
    w = w / np.linalg.norm(w)
    flt2 = rs.FilterOperation.from_success(np.diag([-1.0, -0.5]))
    ok, post, _ = rs.apply_filter(w, flt2, _FixedU(0.0))
    assert ok and np.allclose(post, [-al, -be], atol=1e-12)
    ok, post, p = rs.apply_filter([al, be], rs.FilterOperation.from_success(I2), rng)
    assert ok and p == pytest.approx(1) and np.allclose(post, [al, be])


def test_filter_operation_completeness():
    for A in (np.diag([0.5, 1.0]), np.diag([-1.0, -0.5]), 0.3 * random_unitary(np.random.default_rng(3), 2)):
        flt = rs.FilterOperation.from_success(A)
        assert flt.completeness_defect() < 1e-10
        assert np.all(np.linalg.svd(flt.success, compute_uv=False) <= 1 + 1e-12)
    with pytest.raises(ConstraintError):
        rs.FilterOperation.from_success(np.diag([1.5, 0.1]))


def test_filter_from_kraus_examples():
    flt = rs.filter_from_kraus(np.diag([0.8, 0.2]))
    assert np.allclose(flt.success, np.diag([0.25, 1]), atol=1e-12)
    assert np.allclose(flt.success @ np.diag([0.8, 0.2]), 0.2 * I2, atol=1e-12)
    U = 0.6 * random_unitary(np.random.default_rng(7), 2)
    flt = rs.filter_from_kraus(U)
    assert np.allclose(flt.success, dagger(U) / 0.6, atol=1e-12)
    assert np.allclose(flt.success @ U, 0.6 * I2, atol=1e-12)
    assert rs.filter_from_kraus(np.diag([1.0, 0.0])) is None
    with pytest.raises(ConstraintError):
        rs.filter_from_kraus(np.diag([1.2, 0.5]))


def test_filter_from_kraus_random(rng):
    for i in range(100):
        U, V = random_unitary(rng, 2), random_unitary(rng, 2)
        a = rng.uniform(0.05, 1)
        b = 0.0 if i % 10 == 0 else rng.uniform(0, a)
        A = U @ np.diag([a, b]) @ V
        flt = rs.filter_from_kraus(A)
        if b < 1e-12:
            assert flt is None
        else:
            assert np.allclose(flt.success @ A, b * I2, atol=1e-12)
            assert abs(np.linalg.norm(flt.success, 2) - 1) < 1e-12


def test_filter_none_threshold():
    assert rs.filter_from_kraus(np.diag([0.9, 5e-13])) is None
    assert rs.filter_from_kraus(np.diag([0.9, 5e-12])) is not None


def test_analytic_success_probabilities():
    assert rs.analytic_success_probability("bell-clones-ancilla") == 1
    assert rs.analytic_success_probability("bell-clone-ancilla-clone") == 1
    assert rs.analytic_success_probability("three-party-ancilla") == Fraction(1, 3)
    assert rs.analytic_success_probability("three-party-clone") == Fraction(1, 3)


def test_rationalize():
    assert rs.rationalize(1 / 3) == Fraction(1, 3)
    assert rs.rationalize(np.pi) is None


def test_three_party_ancilla_ket0_branches():
    brs = {b.outcome: b for b in rs.enumerate_branches("three-party-ancilla", [1, 0])}
    assert np.isclose(brs["01"].probability, 1 / 6) and brs["01"].success
    assert np.isclose(brs["10"].probability, 1 / 6) and brs["10"].success
    assert not brs["00"].success and not brs["11"].success
    assert np.isclose(brs["00"].probability, 2 / 3)
    for lab in ("01", "10"):
        assert np.allclose(brs[lab].final_state, [1, 0])
        assert np.allclose(rs.get_scenario("three-party-ancilla").steps[lab][0].kraus, -SIGMA_Z)


def test_three_party_clone_total_is_one_third(rng):
    for _ in range(20):
        brs = rs.enumerate_branches("three-party-clone", random_pure_ket(rng))
        assert abs(sum(b.probability for b in brs if b.success) - 1 / 3) < 1e-12


@pytest.mark.parametrize("name", rs.SCENARIOS)
def test_branch_probabilities_sum_to_one(name, rng):
    for _ in range(50):
        brs = rs.enumerate_branches(name, random_pure_ket(rng))
        assert abs(sum(b.probability for b in brs) - 1) < 1e-12


@pytest.mark.parametrize("name", rs.SCENARIOS)
def test_no_leakage(name):
    assert rs.branch_operators_proportional_to_identity(name) < 1e-12


@pytest.mark.parametrize("name", rs.SCENARIOS)
def test_successful_branches_restore_input(name, rng):
    for _ in range(50):
        phi = random_pure_ket(rng)
        for b in rs.enumerate_branches(name, phi):
            if b.success and b.probability > 1e-14:
                assert abs(abs(np.vdot(phi, b.final_state)) ** 2 - 1) < 1e-12
                if name in rs.DETERMINISTIC:
                    assert np.allclose(b.final_state, phi, atol=1e-12)


def test_symmetric_bell_outcomes_input_independent(rng):
    ps = np.array([[b.probability for b in rs.enumerate_branches("bell-clones-ancilla", random_pure_ket(rng))]
                   for _ in range(50)])
    assert np.all(ps.var(axis=0) < 1e-20)


@pytest.mark.parametrize("name", rs.PROBABILISTIC)
def test_failure_branches_input_independent(name, rng):
    sc = rs.get_scenario(name)
    for lab, A in zip(sc.outcome_labels, sc.stage_one_kraus()):
        if any(s.success for s in sc.steps[lab]):
            continue
        states = []
        for _ in range(20):
            v = A @ random_pure_ket(rng)
            states.append(projector(v) / np.vdot(v, v).real)
        assert max(trace_distance(states[0], r) for r in states[1:]) < 1e-12


@pytest.mark.parametrize("name", rs.DETERMINISTIC)
def test_run_deterministic_trials(name):
    rng = np.random.default_rng(99)
    for _ in range(1000):
        phi = random_pure_ket(rng)
        tr = rs.run_deterministic(name, phi, rng)
        assert tr.success
        assert abs(tr.fidelity - 1) < 1e-12
        assert np.allclose(tr.final_state, phi, atol=1e-12)
        assert tr.messages and tr.correction.startswith("unitary:")


DIST = {"bell-clones-ancilla": [1 / 3, 1 / 3, 1 / 3, 0], "bell-clone-ancilla-clone": [1 / 12] * 3 + [3 / 4]}


@pytest.mark.parametrize("name", rs.DETERMINISTIC)
def test_outcome_frequencies_at_30000(name):
    s = monte_carlo(name, "uniform", 30000, seed=17)
    assert s.success_rate == 1.0
    for lab, p in zip(BELL_LABELS, DIST[name]):
        assert abs(s.outcome_frequencies[lab] - p) <= 4 * np.sqrt(p * (1 - p) / 30000)


@pytest.mark.parametrize("name", rs.DETERMINISTIC)
def test_transcript_frequencies(name):
    rng = np.random.default_rng(5)
    n = 3000
    counts = dict.fromkeys(BELL_LABELS, 0)
    for _ in range(n):
        counts[rs.run_deterministic(name, random_pure_ket(rng), rng).outcomes["alice"]] += 1
    for lab, p in zip(BELL_LABELS, DIST[name]):
        assert abs(counts[lab] / n - p) <= 4 * np.sqrt(p * (1 - p) / n)


def test_run_kinds_are_checked(rng):
    with pytest.raises(QCloneError):
        rs.run_deterministic("three-party-ancilla", [1, 0], rng)
    with pytest.raises(QCloneError):
        rs.run_probabilistic("bell-clones-ancilla", [1, 0], rng)


@pytest.mark.parametrize("name", rs.PROBABILISTIC)
def test_run_probabilistic_transcripts(name):
    rng = np.random.default_rng(11)
    for _ in range(300):
        phi = random_pure_ket(rng)
        tr = rs.run_probabilistic(name, phi, rng)
        assert len(tr.outcomes) == 2
        assert tr.messages[0][1] == rs.get_scenario(name).target_party
        if tr.success:
            assert abs(tr.fidelity - 1) < 1e-12
        d = tr.as_dict()
        assert d["scenario"] == name and isinstance(d["success"], bool)


@settings(max_examples=30, deadline=None)
@given(pure_kets, st.sampled_from(rs.SCENARIOS), st.integers(0, 2**31))
def test_transcript_probability_matches_enumeration(phi, name, seed):
    tr = rs.run_protocol(name, phi, np.random.default_rng(seed))
    brs = rs.enumerate_branches(name, phi)
    step = None
    if tr.correction.startswith("filter"):
        step = "filter-pass" if tr.success else "filter-fail"
    outcome = tr.outcomes.get("alice") if len(tr.outcomes) == 1 else "".join(tr.outcomes.values())
    (b,) = [b for b in brs if b.outcome == outcome and (step is None or b.step == step)]
    assert abs(b.probability - tr.probability) < 1e-12
    assert b.success == tr.success


def test_target_names():
    assert rs.target_name("bell-clones-ancilla") == "ancilla"
    assert rs.target_name("three-party-clone") == "clone1"
