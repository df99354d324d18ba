"""Verification suites run by ``qclone verify``.

Each check records a measured value, the expected value and the tolerance
it was judged at. Randomness comes from per-check generators derived from
the master seed and the check name, so a suite's output depends only on
the seed.
"""
import zlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import cloner as cl
from . import povm as pv
from . import restoration as rs
from .linalg import projector, trace_distance
from .montecarlo import monte_carlo
from .states import (
    I2,
    bloch_to_ket,
    expand_in_generators,
    random_bloch,
    random_pure_ket,
    random_su2,
    to_bell_basis,
)

SUITES = ("cloner", "povm", "restoration", "all")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: object
    expected: object
    tolerance: float

    def as_dict(self):
        from .io import number

        return {
            "name": self.name,
            "passed": bool(self.passed),
            "measured": number(self.measured),
            "expected": number(self.expected),
            "tolerance": self.tolerance,
        }


def _rng(seed, name):
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def _max_dev(name, devs, tol):
    m = float(max(devs))
    return Check(name, m <= tol, m, 0.0, tol)


def _value(name, measured, expected, tol):
    return Check(name, abs(float(measured) - float(expected)) <= tol, measured, expected, tol)


# --------------------------------------------------------------------- cloner

def cloner_suite(seed=0, tol=None):
    t12 = 1e-12 if tol is None else tol
    t10 = 1e-10 if tol is None else tol
    out = []
    out.append(_max_dev("isometry U^dag U = 1", [cl.cloner_defect()], t12))

    a, c = np.sqrt(2 / 3), 1 / np.sqrt(6)
    want0 = np.zeros(8)
    want0[[0b001, 0b010, 0b100]] = [a, -c, -c]
    want1 = np.zeros(8)
    want1[[0b110, 0b101, 0b011]] = [-a, c, c]
    got0 = cl.clone([1, 0]).state
    got1 = cl.clone([0, 1]).state
    out.append(_max_dev("output amplitudes for |0>", np.abs(got0 - want0), t12))
    out.append(_max_dev("output amplitudes for |1>", np.abs(got1 - want1), t12))

    rng = _rng(seed, "bloch")
    dc, da, df = [], [], []
    for _ in range(100):
        s = random_bloch(rng)
        o = cl.clone(bloch_to_ket(s))
        dc.append(np.max(np.abs(o.bloch("clone1") - 2 / 3 * s)))
        dc.append(np.max(np.abs(o.bloch("clone2") - 2 / 3 * s)))
        da.append(np.max(np.abs(o.bloch("ancilla") + s / 3)))
        for k in ("clone1", "clone2"):
            df.append(abs(np.vdot(o.input, o.reduced([k]) @ o.input).real - 5 / 6))
    out.append(_max_dev("clone Bloch = (2/3) input", dc, t12))
    out.append(_max_dev("ancilla Bloch = -(1/3) input", da, t12))
    out.append(_max_dev("clone-fidelity = 5/6", df, t12))

    rng = _rng(seed, "reduced")
    dcc, dblock, danti = [], [], []
    for _ in range(20):
        sx, sy, sz = s = random_bloch(rng)
        o = cl.clone(bloch_to_ket(s))
        rcc = to_bell_basis(o.reduced([0, 1]))
        want = np.array([[1, sx, sz, 0], [sx, 1, 1j * sy, 0], [sz, -1j * sy, 1, 0], [0, 0, 0, 0]]) / 3
        dcc.append(np.max(np.abs(rcc - want)))
        rca = cl.reduced_clone_ancilla(o)
        dblock.append(np.max(np.abs(rca[:3, :3] - rcc[:3, :3] / 4)))
        danti.append(abs(rca[3, 3].real - 0.75))
    out.append(_max_dev("two-clone reduced state in the Bell basis", dcc, t12))
    out.append(_max_dev("clone-ancilla symmetric block = rho_cc / 4", dblock, t12))
    out.append(_max_dev("clone-ancilla antisymmetric weight = 3/4", danti, t12))

    rng = _rng(seed, "covariance")
    out.append(_max_dev("covariance U(V x 1 x 1) = (V x V x V) U", [cl.check_covariance(random_su2(rng)) for _ in range(100)], t10))
    return out


# --------------------------------------------------------------------- povm

def _qubit_dev(E, a, e):
    return float(np.max(np.abs(E - pv.from_qubit_parameters(a, e))))


def povm_suite(seed=0, tol=None):
    t12 = 1e-12 if tol is None else tol
    t10 = 1e-10 if tol is None else tol
    out = []
    rng = _rng(seed, "single")
    for sel, which in (("clone1", "clone"), ("clone2", "clone"), ("ancilla", "ancilla")):
        devs = []
        for _ in range(200):
            F = pv.random_povm_element(rng, sel)
            b, f = expand_in_generators(F.matrix)
            a, e = pv.single_qubit_map(b, f, which)
            devs.append(_qubit_dev(pv.effective_element(F).matrix, a, e))
        out.append(_max_dev(f"single-qubit map ({sel}) vs conjugation oracle", devs, t12))

    rng = _rng(seed, "two-clone")
    d_map, d_tr = [], []
    for _ in range(200):
        F = pv.random_povm_element(rng, "both-clones", symmetric=True)
        E = pv.effective_element(F).matrix
        b, f = pv.symmetric_parameters(F.matrix)
        a, e = pv.two_clone_map(b, f)
        d_map.append(_qubit_dev(E, a, e))
        d_tr.append(np.max(np.abs(pv.two_clone_trace_formula(F).matrix - E)))
    out.append(_max_dev("two-clone parameter map vs conjugation oracle", d_map, t12))
    out.append(_max_dev("two-clone partial-trace formula vs conjugation oracle", d_tr, t12))

    labels = pv.reconcile_su4_labels()
    out.append(Check("SU(4) label reconciliation reproduces stored map", labels == pv.SU4_LABELS,
                     str(sorted(labels.items())), str(sorted(pv.SU4_LABELS.items())), 0.0))
    rng = _rng(seed, "clone-ancilla")
    devs = []
    for _ in range(200):
        F = pv.random_povm_element(rng, "clone-ancilla")
        b, f = expand_in_generators(to_bell_basis(F.matrix))
        a, e = pv.clone_ancilla_map(b, f)
        devs.append(_qubit_dev(pv.effective_element(F).matrix, a, e))
    out.append(_max_dev("clone-ancilla parameter map vs conjugation oracle", devs, t12))

    rng = _rng(seed, "sharp-family")
    devs, tds = [], []
    for _ in range(100):
        chi = random_pure_ket(rng)
        p = rng.uniform(0, 1)
        F, E_pred = pv.sharp_two_clone_family(chi, p)
        devs.append(np.max(np.abs(pv.effective_element(F).matrix - E_pred.matrix)))
        G = pv.PovmElement("both-clones", projector(np.kron(chi, chi)))
        r1 = pv.conditional_state(G, random_pure_ket(rng))
        r2 = pv.conditional_state(G, random_pure_ket(rng))
        tds.append(trace_distance(r1, r2))
    out.append(_max_dev("sharp family E = (2/3) p |chi><chi|", devs, t12))
    out.append(_max_dev("sharp outcome leaves ancilla input-independent", tds, t10))

    for name, fn in (("six-state", pv.six_state_povm), ("tetrahedron", pv.tetrahedron_povm)):
        o, e = fn()
        out.append(_max_dev(f"{name} output set sums to symmetric projector", [np.max(np.abs(o.total() - o.target_identity()))], t10))
        out.append(_max_dev(f"{name} effective set sums to identity", [np.max(np.abs(e.total() - I2))], t10))

    rep = pv.no_complete_sharp_clone_ancilla_check(_rng(seed, "no-go"), samples=100)
    out.append(Check("clone-ancilla weight witness margin >= 6", rep.holds, rep.margin, 6.0, 1e-10))
    return out


# --------------------------------------------------------------------- restoration

def restoration_suite(seed=0, tol=None, trials=100000):
    t12 = 1e-12 if tol is None else tol
    t10 = 1e-10 if tol is None else tol
    out = []
    for name in rs.DETERMINISTIC:
        p = rs.analytic_success_probability(name)
        out.append(Check(f"{name} success = 1", p == 1, p, Fraction(1), 0.0))

    rng = _rng(seed, "bell-dist")
    dists = {"bell-clones-ancilla": (1 / 3, 1 / 3, 1 / 3, 0), "bell-clone-ancilla-clone": (1 / 12, 1 / 12, 1 / 12, 3 / 4)}
    for name, want in dists.items():
        sc = rs.get_scenario(name)
        devs = []
        for _ in range(50):
            phi = random_pure_ket(rng)
            probs, _ = rs.bell_probabilities(cl.clone(phi).state, list(sc.measured))
            devs.append(np.max(np.abs(probs - np.array(want))))
        out.append(_max_dev(f"{name} Bell outcome distribution", devs, t12))

    for name in rs.DETERMINISTIC:
        rng = _rng(seed, f"trials-{name}")
        fids = [rs.run_deterministic(name, random_pure_ket(rng), rng).fidelity for _ in range(1000)]
        out.append(_max_dev(f"{name} corrected fidelity = 1 (1000 trials)", [1 - f for f in fids], t12))

    for name in rs.PROBABILISTIC:
        p = rs.analytic_success_probability(name)
        out.append(Check(f"three-party success = 1/3 ({name})", p == Fraction(1, 3), p, Fraction(1, 3), 0.0))
    for i, name in enumerate(rs.PROBABILISTIC):
        s = monte_carlo(name, "uniform", trials, seed + i)
        sigma = np.sqrt((1 / 3) * (2 / 3) / trials)
        out.append(_value(f"{name} Monte Carlo success rate (N={trials})", s.success_rate, 1 / 3, 4 * sigma))

    rng = _rng(seed, "failure-branches")
    tds = []
    for name in rs.PROBABILISTIC:
        sc = rs.get_scenario(name)
        for lab, A in zip(sc.outcome_labels, sc.stage_one_kraus()):
            if any(st.success for st in sc.steps[lab]):
                continue
            states = []
            for _ in range(20):
                v = A @ random_pure_ket(rng)
                states.append(projector(v) / np.vdot(v, v).real)
            tds.extend(trace_distance(states[0], r) for r in states[1:])
    out.append(_max_dev("failure branches leave target input-independent", tds, t10))

    rng = _rng(seed, "filters")
    devs = []
    none_ok = True
    for i in range(100):
        U = pv.random_unitary(rng, 2)
        V = pv.random_unitary(rng, 2)
        a = rng.uniform(0.05, 1)
        b = 0.0 if i % 10 == 0 else rng.uniform(0, a)
        A = U @ np.diag([a, b]) @ V
        flt = rs.filter_from_kraus(A)
        if b < 1e-12:
            none_ok &= flt is None
        elif flt is None:
            none_ok = False
        else:
            devs.append(np.max(np.abs(flt.success @ A - b * I2)))
    out.append(_max_dev("filter B A = b 1", devs, t12))
    out.append(Check("filter is None exactly when b = 0", none_ok, none_ok, True, 0.0))

    rng = _rng(seed, "branch-sums")
    devs = []
    for name in rs.SCENARIOS:
        for _ in range(50):
            devs.append(abs(sum(br.probability for br in rs.enumerate_branches(name, random_pure_ket(rng))) - 1))
    out.append(_max_dev("branch probabilities sum to 1", devs, t12))
    return out


def run_suite(suite, seed=0, tol=None, trials=100000):
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    checks = []
    if suite in ("cloner", "all"):
        checks += cloner_suite(seed, tol)
    if suite in ("povm", "all"):
        checks += povm_suite(seed, tol)
    if suite in ("restoration", "all"):
        checks += restoration_suite(seed, tol, trials)
    return checks
