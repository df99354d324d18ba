"""Restoring the cloner input in one output qubit by LOCC.

Each scenario is a two-stage protocol: the non-target qubits are measured
(one joint Bell measurement, or one computational-basis measurement per
party), the outcome is sent to the target holder, who then applies either a
unitary correction or a two-outcome filter. Scenario tables below are the
single definition of those branches; exhaustive enumeration, single-trial
transcripts and the Monte Carlo kernel all read from them.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cloner import ANCILLA, CLONE1, CLONE2, CLONER, SUBSYSTEM_NAMES
from .errors import ConstraintError, DimensionError, NotUnitaryError, QCloneError
from .linalg import contract_subsystems, dagger, is_unitary, ket_fidelity, sqrtm_psd, svd
from .states import (
    BELL_LABELS,
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bell_basis,
    ket_to_bloch,
    normalized_ket,
)

SCENARIOS = ("bell-clones-ancilla", "bell-clone-ancilla-clone", "three-party-ancilla", "three-party-clone")
DETERMINISTIC = SCENARIOS[:2]
PROBABILISTIC = SCENARIOS[2:]

# Bell measurement on the clones, correction on the ancilla
TABLE_CLONES = {"phi+": 1j * SIGMA_Y, "phi-": SIGMA_X, "psi+": -SIGMA_Z}
# Bell measurement on clone2 and ancilla, correction on clone1
TABLE_CLONE_ANCILLA = {"phi+": -1j * SIGMA_Y, "phi-": -SIGMA_X, "psi+": SIGMA_Z, "psi-": I2}


@dataclass(frozen=True)
class FilterOperation:
    """Two-outcome filter with success Kraus ``success`` and failure Kraus ``failure``."""

    success: np.ndarray
    failure: np.ndarray

    @classmethod
    def from_success(cls, A):
        A = np.asarray(A, dtype=np.complex128)
        s = np.linalg.svd(A, compute_uv=False)
        if s[0] > 1 + 1e-12:
            raise ConstraintError(f"filter Kraus operator has singular value {s[0]:.6g} > 1")
        return cls(A, sqrtm_psd(I2 - dagger(A) @ A))

    def completeness_defect(self):
        tot = dagger(self.success) @ self.success + dagger(self.failure) @ self.failure
        return float(np.max(np.abs(tot - I2)))


@dataclass(frozen=True)
class Step:
    """One Kraus operator of the second stage and whether it restores the input."""

    kraus: np.ndarray
    success: bool
    label: str


@dataclass(frozen=True)
class Scenario:
    name: str
    measured: tuple
    target: int
    outcome_labels: tuple
    outcome_kets: tuple
    # who measures what: (party, subsystems); a joint measurement has one entry
    parties: tuple
    target_party: str
    steps: dict
    deterministic: bool

    @property
    def measurement_ops(self):
        """``(K, 2, 8)`` maps from the output state to target amplitudes, one per outcome."""
        eye = np.eye(8, dtype=np.complex128)
        return np.array([contract_subsystems(eye, [2, 2, 2], self.measured, k) for k in self.outcome_kets])

    def stage_one_kraus(self, iso=CLONER):
        """Input-to-target Kraus operator for each first-stage outcome."""
        return [m @ iso for m in self.measurement_ops]


def _unitary_steps(table, labels):
    steps = {}
    for lab in labels:
        if lab in table:
            steps[lab] = (Step(table[lab], True, "correct"),)
        else:
            steps[lab] = (Step(I2, False, "none"),)
    return steps


def _computational_kets():
    return tuple(np.eye(4, dtype=np.complex128))


_FILTERS = {
    "01": FilterOperation.from_success(np.diag([0.5, 1.0])),
    "10": FilterOperation.from_success(np.diag([-1.0, -0.5])),
}


def _build_scenarios():
    bell = bell_basis()
    comp = _computational_kets()
    bits = ("00", "01", "10", "11")
    out = {}
    out["bell-clones-ancilla"] = Scenario(
        "bell-clones-ancilla", (CLONE1, CLONE2), ANCILLA, BELL_LABELS, bell,
        (("alice", (CLONE1, CLONE2)),), "bob", _unitary_steps(TABLE_CLONES, BELL_LABELS), True,
    )
    out["bell-clone-ancilla-clone"] = Scenario(
        "bell-clone-ancilla-clone", (CLONE2, ANCILLA), CLONE1, BELL_LABELS, bell,
        (("alice", (CLONE2, ANCILLA)),), "bob", _unitary_steps(TABLE_CLONE_ANCILLA, BELL_LABELS), True,
    )
    steps = {b: (Step(-SIGMA_Z, True, "correct"),) if b[0] != b[1] else (Step(I2, False, "none"),) for b in bits}
    out["three-party-ancilla"] = Scenario(
        "three-party-ancilla", (CLONE1, CLONE2), ANCILLA, bits, comp,
        (("alice", (CLONE1,)), ("bob", (CLONE2,))), "charlie", steps, False,
    )
    steps = {}
    for b in bits:
        if b in _FILTERS:
            flt = _FILTERS[b]
            steps[b] = (Step(flt.success, True, "filter-pass"), Step(flt.failure, False, "filter-fail"))
        else:
            steps[b] = (Step(I2, False, "none"),)
    out["three-party-clone"] = Scenario(
        "three-party-clone", (CLONE2, ANCILLA), CLONE1, bits, comp,
        (("bob", (CLONE2,)), ("charlie", (ANCILLA,))), "alice", steps, False,
    )
    return out


_SCENARIOS = _build_scenarios()


def get_scenario(name):
    try:
        return _SCENARIOS[name]
    except KeyError:
        raise QCloneError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}") from None


def correction_table(name):
    """Outcome -> unitary correction for the deterministic scenarios."""
    return {"bell-clones-ancilla": TABLE_CLONES, "bell-clone-ancilla-clone": TABLE_CLONE_ANCILLA}[name]


# --------------------------------------------------------------------- measurements

def _sample(probs, u):
    """Inverse-CDF pick; never returns a zero-probability index."""
    probs = np.asarray(probs, dtype=float)
    acc = 0.0
    target = u * probs.sum()
    for k, p in enumerate(probs):
        acc += p
        if acc > target and p > 0:
            return k
    return int(np.flatnonzero(probs > 0)[-1])


def _n_qubits(state):
    n = int(round(np.log2(state.shape[0])))
    if 2 ** n != state.shape[0]:
        raise DimensionError(f"state length {state.shape[0]} is not a power of two")
    return n


def bell_probabilities(state, pair):
    state = normalized_ket(state)
    n = _n_qubits(state)
    conds = [contract_subsystems(state, [2] * n, list(pair), k) for k in bell_basis()]
    return np.array([np.vdot(c, c).real for c in conds]), conds


def bell_measure(state, pair, rng):
    """Bell-basis measurement on two qubits of a pure state.

    Returns ``(label, conditional ket on the remaining qubits, probability)``.
    """
    probs, conds = bell_probabilities(state, pair)
    k = _sample(probs, rng.random())
    return BELL_LABELS[k], conds[k] / np.sqrt(probs[k]), float(probs[k])


def computational_measure(state, qubit, rng):
    """Measure one qubit in ``{|0>, |1>}``; returns ``(bit, ket on the other qubits, probability)``."""
    state = normalized_ket(state)
    n = _n_qubits(state)
    conds = [contract_subsystems(state, [2] * n, [qubit], k) for k in np.eye(2)]
    probs = np.array([np.vdot(c, c).real for c in conds])
    bit = _sample(probs, rng.random())
    return bit, conds[bit] / np.sqrt(probs[bit]), float(probs[bit])


def apply_correction(state, outcome, table):
    try:
        U = table[outcome]
    except KeyError:
        raise QCloneError(f"no correction listed for outcome {outcome!r}") from None
    return np.asarray(U) @ np.asarray(state, dtype=np.complex128)


def apply_filter(state, flt, rng):
    """Run a filter; returns ``(passed, normalized post-state, pass probability)``."""
    state = np.asarray(state, dtype=np.complex128)
    ok = flt.success @ state
    bad = flt.failure @ state
    p_ok = float(np.vdot(ok, ok).real)
    p_bad = float(np.vdot(bad, bad).real)
    k = _sample([p_ok, p_bad], rng.random())
    post = ok if k == 0 else bad
    return k == 0, post / np.linalg.norm(post), p_ok / (p_ok + p_bad)


def filter_from_kraus(A, atol=1e-12):
    """Filter that undoes a first-stage Kraus operator with maximal success probability.

    With ``A = U diag(a, b) V`` the filter is ``V^dag diag(b/a, 1) U^dag`` so
    that ``B A = b 1``. Returns ``None`` when ``b`` vanishes: the outcome was
    sharp and the target no longer depends on the input.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.shape != (2, 2):
        raise DimensionError("filter_from_kraus needs a 2x2 operator")
    U, S, V = svd(A)
    a, b = S[0, 0].real, S[1, 1].real
    if a > 1 + atol:
        raise ConstraintError(f"singular value {a:.6g} exceeds 1; not a Kraus operator")
    if b < atol:
        return None
    B = dagger(V) @ np.diag([b / a, 1.0]) @ dagger(U)
    if np.max(np.abs(B @ A - b * I2)) > 1e-10:
        raise ConstraintError("filter construction failed to invert the Kraus operator")
    return FilterOperation.from_success(B)


# --------------------------------------------------------------------- enumeration

def rationalize(x, max_den=1000, atol=1e-12):
    """``Fraction`` equal to ``x`` within ``atol`` with a small denominator, else ``None``."""
    fr = Fraction(float(x)).limit_denominator(max_den)
    return fr if abs(float(fr) - x) <= atol else None


@dataclass(frozen=True)
class Branch:
    outcome: str
    step: str
    success: bool
    probability: float
    operator: np.ndarray
    final_state: object


def enumerate_branches(name, input_ket):
    """Every (outcome, second-stage Kraus) branch with its exact probability for one input."""
    sc = get_scenario(name)
    phi = normalized_ket(input_ket)
    out = []
    for lab, A in zip(sc.outcome_labels, sc.stage_one_kraus()):
        for st in sc.steps[lab]:
            op = st.kraus @ A
            v = op @ phi
            p = float(np.vdot(v, v).real)
            final = v / np.sqrt(p) if p > 1e-15 else None
            out.append(Branch(lab, st.label, st.success, p, op, final))
    return out


def success_operator(name):
    """``sum (B A)^dag (B A)`` over successful branches: the effective success element."""
    sc = get_scenario(name)
    E = np.zeros((2, 2), dtype=np.complex128)
    for lab, A in zip(sc.outcome_labels, sc.stage_one_kraus()):
        for st in sc.steps[lab]:
            if st.success:
                op = st.kraus @ A
                E += dagger(op) @ op
    return E


def analytic_success_probability(name, atol=1e-12):
    """Exact success probability as a ``Fraction``, from exhaustive branch enumeration.

    The summed success element must be proportional to the identity (the
    probability is input independent); its rational value is then recovered
    and checked against the float to ``atol``.
    """
    E = success_operator(name)
    p = np.trace(E).real / 2
    if np.max(np.abs(E - p * I2)) > atol:
        raise ConstraintError(f"success probability of {name} depends on the input")
    fr = rationalize(p, atol=atol)
    if fr is None:
        raise ConstraintError(f"success probability {p!r} of {name} is not a small rational")
    return fr


def branch_operators_proportional_to_identity(name, atol=1e-12):
    """Largest deviation of a successful ``B A`` from ``c 1`` (zero when nothing leaks)."""
    sc = get_scenario(name)
    worst = 0.0
    for lab, A in zip(sc.outcome_labels, sc.stage_one_kraus()):
        for st in sc.steps[lab]:
            if st.success:
                op = st.kraus @ A
                c = np.trace(op) / 2
                worst = max(worst, float(np.max(np.abs(op - c * I2))))
    return worst


# --------------------------------------------------------------------- single trials

@dataclass
class ProtocolTranscript:
    scenario: str
    input_bloch: np.ndarray
    outcomes: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)
    correction: str = "none"
    success: bool = False
    final_state: object = None
    probability: float = 1.0
    exact_probability: object = None
    fidelity: float = float("nan")

    def as_dict(self):
        from .io import complex_list

        return {
            "scenario": self.scenario,
            "input_bloch": [float(x) for x in self.input_bloch],
            "outcomes": dict(self.outcomes),
            "messages": [list(m) for m in self.messages],
            "correction": self.correction,
            "success": self.success,
            "final_state": None if self.final_state is None else complex_list(self.final_state),
            "probability": self.probability,
            "exact_probability": None if self.exact_probability is None else str(self.exact_probability),
            "fidelity": self.fidelity,
        }


def _run(name, input_ket, rng):
    sc = get_scenario(name)
    phi = normalized_ket(input_ket)
    tr = ProtocolTranscript(name, ket_to_bloch(phi))
    state = CLONER @ phi
    remaining = [CLONE1, CLONE2, ANCILLA]
    prob = 1.0
    if len(sc.parties) == 1:
        party, pair = sc.parties[0]
        label, state, p = bell_measure(state, [remaining.index(q) for q in pair], rng)
        remaining = [q for q in remaining if q not in pair]
        prob *= p
        tr.outcomes[party] = label
        tr.messages.append((party, sc.target_party, label))
        outcome = label
    else:
        bits = []
        for party, (q,) in sc.parties:
            bit, state, p = computational_measure(state, remaining.index(q), rng)
            remaining.remove(q)
            prob *= p
            bits.append(str(bit))
            tr.outcomes[party] = str(bit)
            tr.messages.append((party, sc.target_party, str(bit)))
        outcome = "".join(bits)
    if remaining != [sc.target]:
        raise DimensionError(f"protocol left qubits {remaining}, expected target {sc.target}")

    steps = sc.steps[outcome]
    if len(steps) == 1:
        st = steps[0]
        if st.success:
            state = apply_correction(state, outcome, {outcome: st.kraus})
            tr.correction = f"unitary:{outcome}"
        tr.success = st.success
    else:
        flt = FilterOperation(steps[0].kraus, steps[1].kraus)
        passed, state, p = apply_filter(state, flt, rng)
        prob *= p if passed else 1 - p
        tr.correction = f"filter:{outcome}"
        tr.success = passed
        tr.messages.append((sc.target_party, "all", "filter-pass" if passed else "filter-fail"))
    tr.final_state = state
    tr.probability = prob
    tr.exact_probability = rationalize(prob)
    tr.fidelity = ket_fidelity(phi, state)
    return tr


def run_deterministic(name, input_ket, rng):
    """One trial of a Bell-measurement restoration; always succeeds."""
    if name not in DETERMINISTIC:
        raise QCloneError(f"{name!r} is not a deterministic scenario")
    return _run(name, input_ket, rng)


def run_probabilistic(name, input_ket, rng):
    """One trial of a three-party restoration with per-party computational measurements."""
    if name not in PROBABILISTIC:
        raise QCloneError(f"{name!r} is not a three-party scenario")
    return _run(name, input_ket, rng)


def run_protocol(name, input_ket, rng):
    return _run(name, input_ket, rng)


def check_table_unitaries(atol=1e-12):
    for table in (TABLE_CLONES, TABLE_CLONE_ANCILLA):
        for lab, U in table.items():
            if not is_unitary(U, atol):
                raise NotUnitaryError(f"correction for {lab} is not unitary")
    return True


def target_name(name):
    return SUBSYSTEM_NAMES[get_scenario(name).target]
