"""Acceptance criteria, each run at its stated tolerance with one printed pass/fail line."""
import numpy as np

from qclone import povm as pv
from qclone import restoration as rs
from qclone.cli import main
from qclone.cloner import clone, cloner_defect, reduced_clone_ancilla, reduced_two_clones
from qclone.linalg import projector, trace_distance
from qclone.montecarlo import monte_carlo
from qclone.states import I2, P_SYM, bloch_to_ket, expand_in_generators, random_bloch, random_pure_ket, to_bell_basis

SEED = 2024


def rng_for(k):
    return np.random.default_rng([SEED, k])


def test_criterion_01_cloner(criterion):
    want = np.zeros(8)
    want[[0b001, 0b010, 0b100]] = [np.sqrt(2 / 3), -1 / np.sqrt(6), -1 / np.sqrt(6)]
    d_iso = cloner_defect()
    d_amp = float(np.max(np.abs(clone([1, 0]).state - want)))
    criterion(1, "cloner isometry and |0> amplitudes", d_iso <= 1e-12 and d_amp <= 1e-12,
              f"|U^dag U - 1| = {d_iso:.1e}, amplitude error = {d_amp:.1e} (tol 1e-12)")


def test_criterion_02_bloch_maps(criterion):
    rng = rng_for(2)
    dc = da = df = 0.0
    for _ in range(100):
        s = random_bloch(rng)
        phi = bloch_to_ket(s)
        out = clone(phi)
        for k in ("clone1", "clone2"):
            dc = max(dc, np.max(np.abs(out.bloch(k) - 2 / 3 * s)))
            df = max(df, abs(np.vdot(phi, out.reduced([k]) @ phi).real - 5 / 6))
        da = max(da, np.max(np.abs(out.bloch("ancilla") + s / 3)))
    criterion(2, "Bloch shrink factors and fidelity 5/6", max(dc, da, df) <= 1e-12,
              f"clone {dc:.1e}, ancilla {da:.1e}, fidelity {df:.1e} over 100 inputs (tol 1e-12)")


def test_criterion_03_reduced_matrices(criterion):
    rng = rng_for(3)
    dcc = dblk = danti = 0.0
    for _ in range(20):
        sx, sy, sz = s = random_bloch(rng)
        out = clone(bloch_to_ket(s))
        rcc = reduced_two_clones(out)
        want = np.array([[1, sx, sz, 0], [sx, 1, 1j * sy, 0], [sz, -1j * sy, 1, 0], [0, 0, 0, 0]]) / 3
        dcc = max(dcc, np.max(np.abs(rcc - want)))
        rca = reduced_clone_ancilla(out)
        dblk = max(dblk, np.max(np.abs(rca[:3, :3] - rcc[:3, :3] / 4)))
        danti = max(danti, abs(rca[3, 3] - 0.75))
    criterion(3, "two-clone and clone-ancilla reduced states", max(dcc, dblk, danti) <= 1e-12,
              f"rho_cc {dcc:.1e}, sym block {dblk:.1e}, psi- weight {danti:.1e} over 20 inputs (tol 1e-12)")


def _dev(E, a, e):
    return float(np.max(np.abs(E - pv.from_qubit_parameters(a, e))))


def test_criterion_04_oracle_equivalence(criterion):
    rng = rng_for(4)
    devs = {}
    for sel, which in (("clone1", "clone"), ("clone2", "clone"), ("ancilla", "ancilla")):
        d = 0.0
        for _ in range(200):
            F = pv.random_povm_element(rng, sel)
            b, f = expand_in_generators(F.matrix)
            d = max(d, _dev(pv.effective_element(F).matrix, *pv.single_qubit_map(b, f, which)))
        devs[sel] = d
    d_map = d_tr = 0.0
    for _ in range(200):
        F = pv.random_povm_element(rng, "both-clones", symmetric=True)
        E = pv.effective_element(F).matrix
        d_map = max(d_map, _dev(E, *pv.two_clone_map(*pv.symmetric_parameters(F.matrix))))
        d_tr = max(d_tr, float(np.max(np.abs(pv.two_clone_trace_formula(F).matrix - E))))
    devs["two-clone map"], devs["two-clone trace"] = d_map, d_tr
    labels_ok = pv.reconcile_su4_labels() == pv.SU4_LABELS
    d = 0.0
    for _ in range(200):
        F = pv.random_povm_element(rng, "clone-ancilla")
        b, f = expand_in_generators(to_bell_basis(F.matrix))
        d = max(d, _dev(pv.effective_element(F).matrix, *pv.clone_ancilla_map(b, f)))
    devs["clone-ancilla"] = d
    worst = max(devs.values())
    criterion(4, "closed-form maps vs conjugation oracle", labels_ok and worst <= 1e-12,
              f"max deviation {worst:.1e} over 200 elements per map, SU(4) labels reconciled: {labels_ok} (tol 1e-12)")


def test_criterion_05_sharp_family(criterion):
    rng = rng_for(5)
    d = td = 0.0
    for _ in range(100):
        chi = random_pure_ket(rng)
        F, E = pv.sharp_two_clone_family(chi, rng.uniform())
        d = max(d, float(np.max(np.abs(pv.effective_element(F).matrix - E.matrix))))
        G = pv.PovmElement("both-clones", projector(np.kron(chi, chi)))
        r1 = pv.conditional_state(G, random_pure_ket(rng))
        r2 = pv.conditional_state(G, random_pure_ket(rng))
        td = max(td, trace_distance(r1, r2))
    criterion(5, "sharp family E = (2/3) p |chi><chi| and input independence", d <= 1e-12 and td <= 1e-10,
              f"element error {d:.1e} (tol 1e-12), ancilla trace distance {td:.1e} (tol 1e-10)")


def test_criterion_06_complete_sets(criterion):
    devs = []
    for fn in (pv.six_state_povm, pv.tetrahedron_povm):
        out, eff = fn()
        devs.append(float(np.max(np.abs(out.total() - P_SYM))))
        devs.append(float(np.max(np.abs(eff.total() - I2))))
    criterion(6, "six-state and tetrahedron completeness", max(devs) <= 1e-10,
              f"max deviation {max(devs):.1e} (tol 1e-10)")


def test_criterion_07_clone_ancilla_no_go(criterion):
    rep = pv.no_complete_sharp_clone_ancilla_check(rng_for(7), samples=100)
    ok = rep.holds and rep.min_element_ratio >= 9 - 1e-10 and abs(rep.identity_ratio - 3) < 1e-12
    criterion(7, "clone-ancilla weight witness", ok,
              f"min ratio {rep.min_element_ratio:.6f}, sum ratio {rep.sum_ratio:.6f}, identity {rep.identity_ratio:.1f}, "
              f"margin {rep.margin:.6f} (need >= 6 - 1e-10)")


def test_criterion_08_deterministic_restoration(criterion):
    exact = [rs.analytic_success_probability(n) for n in rs.DETERMINISTIC]
    rng = rng_for(8)
    want = {"bell-clones-ancilla": (1 / 3, 1 / 3, 1 / 3, 0), "bell-clone-ancilla-clone": (1 / 12, 1 / 12, 1 / 12, 3 / 4)}
    d_dist = 0.0
    for name, w in want.items():
        pair = list(rs.get_scenario(name).measured)
        for _ in range(50):
            probs, _ = rs.bell_probabilities(clone(random_pure_ket(rng)).state, pair)
            d_dist = max(d_dist, float(np.max(np.abs(probs - w))))
    d_fid = 0.0
    for name in rs.DETERMINISTIC:
        for _ in range(1000):
            d_fid = max(d_fid, 1 - rs.run_deterministic(name, random_pure_ket(rng), rng).fidelity)
    ok = all(p == 1 for p in exact) and d_dist <= 1e-12 and d_fid <= 1e-12
    criterion(8, "deterministic restoration", ok,
              f"exact success {[str(p) for p in exact]}, distribution error {d_dist:.1e}, "
              f"fidelity defect {d_fid:.1e} over 1000 trials each (tol 1e-12)")


def test_criterion_09_probabilistic_restoration(criterion):
    n = 100000
    exact = {name: rs.analytic_success_probability(name) for name in rs.PROBABILISTIC}
    se = np.sqrt((1 / 3) * (2 / 3) / n)
    rates = {name: monte_carlo(name, "uniform", n, seed=SEED + i).success_rate for i, name in enumerate(rs.PROBABILISTIC)}
    rng = rng_for(9)
    td = 0.0
    for name in rs.PROBABILISTIC:
        sc = rs.get_scenario(name)
        for lab, A in zip(sc.outcome_labels, sc.stage_one_kraus()):
            if any(st.success for st in sc.steps[lab]):
                continue
            states = []
            for _ in range(20):
                v = A @ random_pure_ket(rng)
                states.append(projector(v) / np.vdot(v, v).real)
            td = max(td, max(trace_distance(states[0], r) for r in states[1:]))
    ok = all(str(p) == "1/3" for p in exact.values()) and all(abs(r - 1 / 3) <= 4 * se for r in rates.values()) and td <= 1e-10
    criterion(9, "probabilistic restoration", ok,
              f"exact {[str(p) for p in exact.values()]}, Monte Carlo {[round(r, 5) for r in rates.values()]} "
              f"(tol 4 SE = {4 * se:.4f}), failure-branch trace distance {td:.1e} (tol 1e-10)")


def test_criterion_10_filter_construction(criterion):
    rng = rng_for(10)
    d = 0.0
    none_ok = True
    for i in range(100):
        U, V = pv.random_unitary(rng, 2), pv.random_unitary(rng, 2)
        a = rng.uniform(0.05, 1)
        b = 0.0 if i % 10 == 0 else rng.uniform(0, a)
        A = U @ np.diag([a, b]) @ V
        flt = rs.filter_from_kraus(A)
        if b < 1e-12:
            none_ok &= flt is None
        elif flt is None:
            none_ok = False
        else:
            d = max(d, float(np.max(np.abs(flt.success @ A - b * I2))))
    criterion(10, "filter B A = b 1", d <= 1e-12 and none_ok,
              f"max |BA - b 1| = {d:.1e} (tol 1e-12), none exactly when b = 0: {none_ok}")


def test_criterion_11_determinism(criterion, capsys):
    argv = ["verify", "--suite", "all", "--seed", str(SEED), "--json"]
    code_a = main(argv)
    a = capsys.readouterr().out
    code_b = main(argv)
    b = capsys.readouterr().out
    criterion(11, "byte-identical verification reports", a == b and code_a == code_b == 0,
              f"two full runs, {len(a)} bytes each, identical: {a == b}, exit codes {code_a}/{code_b}")
