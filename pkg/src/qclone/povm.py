"""Effective measurements on the cloner input.

A POVM element ``F`` acting on some output subsystems induces the input
element ``E = V^dag (F (x) 1) V`` where ``V`` is the cloner isometry.
:func:`effective_element` computes that conjugation directly and is the
reference every closed-form parameter map in this module is checked against.
"""
from dataclasses import dataclass, field

import numpy as np

from .cloner import ANCILLA, CLONE1, CLONE2, CLONER, selector_subsystems
from .errors import ConstraintError, DimensionError
from .linalg import (
    ATOL,
    close,
    contract_subsystems,
    dagger,
    eig_hermitian,
    is_hermitian,
    partial_trace,
    projector,
    tensor_product,
)
from .states import (
    AXIS_KETS,
    I2,
    P_ANTI,
    P_SYM,
    PAULI,
    SYM_ISOMETRY,
    bell_basis,
    bloch_to_ket,
    expand_in_generators,
    from_bell_basis,
    su_generators,
    tetrahedron_vectors,
)

SHARP_TOL = 1e-8

SUPPORTS = ("full", "symmetric")


def selector_dim(selector):
    return 2 ** len(selector_subsystems(selector))


@dataclass(frozen=True)
class PovmElement:
    selector: str
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        d = selector_dim(self.selector)
        if m.shape != (d, d):
            raise DimensionError(f"selector {self.selector!r} needs a {d}x{d} matrix, got {m.shape}")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class Povm:
    elements: tuple
    support: str = "full"
    labels: tuple = ()

    def __post_init__(self):
        els = tuple(self.elements)
        if not els:
            raise DimensionError("a POVM needs at least one element")
        sels = {e.selector for e in els}
        if len(sels) != 1:
            raise DimensionError(f"POVM elements act on different selectors: {sorted(sels)}")
        if self.support not in SUPPORTS:
            raise DimensionError(f"unknown POVM support {self.support!r}")
        if self.support == "symmetric" and self.selector not in ("both-clones", "clone-ancilla"):
            raise DimensionError("symmetric support only makes sense on a two-qubit selector")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def selector(self):
        return self.elements[0].selector

    @property
    def dim(self):
        return selector_dim(self.selector)

    def total(self):
        return sum(e.matrix for e in self.elements)

    def target_identity(self):
        return P_SYM if self.support == "symmetric" else np.eye(self.dim)


def embed(F, selector):
    """Extend an operator on ``selector`` by identities to the 8-dim output space."""
    sub = selector_subsystems(selector)
    F = np.asarray(F, dtype=np.complex128)
    if F.shape != (2 ** len(sub),) * 2:
        raise DimensionError(f"operator shape {F.shape} does not fit selector {selector!r}")
    before = np.eye(2 ** sub[0])
    after = np.eye(2 ** (2 - sub[-1]))
    return tensor_product(before, F, after)


def effective_element(F, iso=CLONER):
    """Input-side element ``<00| U^dag (F (x) 1) U |00>`` for a :class:`PovmElement`."""
    full = embed(F.matrix, F.selector)
    return PovmElement("clone1", dagger(iso) @ full @ iso)


def effective_matrix(matrix, selector):
    return effective_element(PovmElement(selector, matrix)).matrix


def qubit_parameters(E):
    """``(a, e)`` with ``E = a (1 + e . sigma)`` for a 2x2 Hermitian matrix."""
    return expand_in_generators(E, PAULI)


def from_qubit_parameters(a, e):
    return a * (I2 + sum(ek * p for ek, p in zip(e, PAULI)))


# --------------------------------------------------------------------- closed forms

def single_qubit_map(b, f, which):
    """Effective parameters for an element ``b (1 + f . sigma)`` on one clone or the ancilla."""
    f = np.asarray(f, dtype=float)
    if f.shape != (3,):
        raise DimensionError("f must be a 3-vector")
    if np.linalg.norm(f) > 1 + 1e-12:
        raise ConstraintError(f"|f| = {np.linalg.norm(f):.6g} exceeds 1")
    if not 0 < b <= 1 + 1e-12:
        raise ConstraintError(f"b = {b} outside (0, 1]")
    if which in ("clone", "clone1", "clone2"):
        return b, 2 / 3 * f
    if which == "ancilla":
        return b, -1 / 3 * f
    raise DimensionError(f"single_qubit_map: unknown subsystem {which!r}")


def symmetric_element(b, f):
    """Two-clone operator ``b (1 + f . lambda)`` on the symmetric subspace, as a 4x4 matrix.

    The SU(3) generators act on the basis ``(phi+, psi+, phi-)``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (8,):
        raise DimensionError("f must have 8 components")
    lam = su_generators(3)
    F3 = b * (np.eye(3) + sum(fk * t for fk, t in zip(f, lam)))
    return SYM_ISOMETRY @ F3 @ dagger(SYM_ISOMETRY)


def symmetric_parameters(F):
    """Inverse of :func:`symmetric_element`: SU(3) coefficients of the symmetric block of ``F``."""
    F3 = dagger(SYM_ISOMETRY) @ np.asarray(F) @ SYM_ISOMETRY
    return expand_in_generators(F3)


def two_clone_map(b, f):
    """Effective parameters for a two-clone element ``b (1 + f . lambda)``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (8,):
        raise DimensionError("f must have 8 components")
    if not 0 < b <= 1 + 1e-12:
        raise ConstraintError(f"b = {b} outside (0, 1]")
    if f @ f > 3 + 1e-12:
        raise ConstraintError(f"|f|^2 = {f @ f:.6g} exceeds 3")
    # lambda_1, lambda_7, lambda_4 sit at 0-based positions 0, 6, 3
    return b, 2 / 3 * np.array([f[0], -f[6], f[3]])


def two_clone_trace_formula(F):
    """``(2/3) Tr_clone2 F`` for a two-clone element, as an input-side element."""
    if F.selector != "both-clones":
        raise DimensionError("two_clone_trace_formula needs a both-clones element")
    return PovmElement("clone1", 2 / 3 * partial_trace(F.matrix, [2, 2], [0]))


# Closed-form SU(4) label -> (0-based index into su_generators(4), sign). Produced by
# reconcile_su4_labels() against effective_element; the test suite re-derives it.
SU4_LABELS = {1: (0, 1), 4: (3, 1), 7: (6, 1), 10: (9, 1), 11: (10, 1), 13: (12, 1), 15: (14, 1)}

_SQ23 = np.sqrt(2 / 3)

# response (a-shift, a*e_x, a*e_y, a*e_z) per unit coefficient of each labelled generator
_SU4_FORM = {
    15: (-_SQ23, 0, 0, 0),
    1: (0, 1 / 6, 0, 0),
    13: (0, -1 / 2, 0, 0),
    7: (0, 0, -1 / 6, 0),
    10: (0, 0, -1 / 2, 0),
    4: (0, 0, 0, 1 / 6),
    11: (0, 0, 0, 1 / 2),
}


def _clone_ancilla_responses():
    """Per-generator response of the reference map for clone-ancilla elements."""
    out = []
    for tau in su_generators(4):
        E = effective_matrix(from_bell_basis(tau), "clone-ancilla")
        a, e = np.trace(E).real / 2, np.array([np.trace(E @ p).real / 2 for p in PAULI])
        out.append(np.concatenate([[a], e]))
    return np.array(out)


def reconcile_su4_labels(atol=1e-12):
    """Match the labelled linear form of the clone-ancilla map to our generator order.

    Each labelled generator must reproduce its response (up to sign) on exactly
    one of our generators, and every unmatched generator must have zero
    response. Returns ``{label: (index, sign)}``.
    """
    resp = _clone_ancilla_responses()
    mapping = {}
    for label, form in _SU4_FORM.items():
        form = np.asarray(form)
        hits = [(k, s) for k in range(len(resp)) for s in (1, -1) if np.all(np.abs(resp[k] - s * form) < atol)]
        if len(hits) != 1:
            raise ConstraintError(f"SU(4) label {label} matches {len(hits)} generators")
        mapping[label] = hits[0]
    used = {k for k, _ in mapping.values()}
    for k in range(len(resp)):
        if k not in used and np.any(np.abs(resp[k]) > atol):
            raise ConstraintError(f"generator {k} contributes but has no label in the closed form")
    return mapping


def clone_ancilla_map(b, f, labels=None):
    """Effective parameters for a clone-ancilla element ``b (1 + f . tau)`` (tau in the Bell basis)."""
    f = np.asarray(f, dtype=float)
    if f.shape != (15,):
        raise DimensionError("f must have 15 components")
    if not 0 < b <= 1 + 1e-12:
        raise ConstraintError(f"b = {b} outside (0, 1]")
    if f @ f > 6 + 1e-12:
        raise ConstraintError(f"|f|^2 = {f @ f:.6g} exceeds 6")
    labels = SU4_LABELS if labels is None else labels

    def g(label):
        k, s = labels[label]
        return s * f[k]

    denom = 1 - _SQ23 * g(15)
    if denom <= 0:
        raise ConstraintError("1 - sqrt(2/3) f_15 must be positive")
    a = b * denom
    e = np.array([g(1) - 3 * g(13), -g(7) - 3 * g(10), g(4) + 3 * g(11)]) / (6 * denom)
    return a, e


# --------------------------------------------------------------------- sharpness, Kraus

@dataclass(frozen=True)
class Sharpness:
    sharp: bool
    p: float
    chi: np.ndarray


def _fix_phase(v):
    k = int(np.argmax(np.abs(v) > 1e-12))
    return v * np.exp(-1j * np.angle(v[k]))


def is_sharp(E, tol=SHARP_TOL):
    """Rank-one test: ``E = p |chi><chi|`` when the small/large eigenvalue ratio is below ``tol``."""
    M = E.matrix if isinstance(E, PovmElement) else np.asarray(E)
    w, v = eig_hermitian(M)
    top = w[-1]
    if top <= tol:
        return Sharpness(False, 0.0, np.zeros(M.shape[0], dtype=np.complex128))
    chi = _fix_phase(v[:, -1])
    sharp = abs(w[-2]) <= tol * top
    return Sharpness(bool(sharp), float(top), chi)


def rank_one_decomposition(F, tol=SHARP_TOL):
    """``(p, |m>)`` with ``F = p |m><m|``; raises for higher-rank ``F``."""
    M = F.matrix if isinstance(F, PovmElement) else np.asarray(F)
    w, v = eig_hermitian(M)
    if w[-1] <= 0 or (len(w) > 1 and abs(w[-2]) > tol * w[-1]) or w[0] < -tol * w[-1]:
        raise ConstraintError("element is not a positive rank-one operator; decompose it first")
    return float(w[-1]), v[:, -1]


def unmeasured_subsystem(selector):
    sub = selector_subsystems(selector)
    if len(sub) != 2:
        raise DimensionError("Kraus analysis needs a two-subsystem selector")
    (rest,) = [i for i in (CLONE1, CLONE2, ANCILLA) if i not in sub]
    return rest


def kraus_for_outcome(F, iso=CLONER):
    """Kraus operator mapping the input to the unmeasured qubit for a rank-one outcome."""
    p, m = rank_one_decomposition(F)
    sub = list(selector_subsystems(F.selector))
    return [np.sqrt(p) * contract_subsystems(iso, [2, 2, 2], sub, m)]


def conditional_state(F, input_ket, iso=CLONER):
    """Normalized state of the unmeasured qubit after outcome ``F`` (rank one)."""
    (M,) = kraus_for_outcome(F, iso)
    v = M @ np.asarray(input_ket, dtype=np.complex128)
    rho = projector(v)
    tr = np.trace(rho).real
    if tr <= 0:
        raise ConstraintError("outcome has zero probability for this input")
    return rho / tr


# --------------------------------------------------------------------- canonical sets

def sharp_two_clone_family(chi, p):
    """``F = p |chi chi><chi chi|`` on the clones and its predicted input element ``(2/3) p |chi><chi|``."""
    if not 0 <= p <= 1:
        raise ConstraintError(f"p = {p} outside [0, 1]")
    chi = np.asarray(chi, dtype=np.complex128)
    chi = chi / np.linalg.norm(chi)
    F = PovmElement("both-clones", p * projector(np.kron(chi, chi)))
    return F, PovmElement("clone1", 2 / 3 * p * projector(chi))


def six_state_povm():
    """Weight-1/2 projectors onto ``|k k>`` for the six axis states, and the effective set."""
    labels = tuple(AXIS_KETS)
    pairs = [sharp_two_clone_family(AXIS_KETS[k], 0.5) for k in labels]
    out = Povm(tuple(F for F, _ in pairs), "symmetric", labels)
    eff = Povm(tuple(effective_element(F) for F, _ in pairs), "full", labels)
    return out, eff


def tetrahedron_povm():
    """Weight-3/4 projectors onto ``|n n>`` for the tetrahedron directions, and the effective set."""
    kets = [bloch_to_ket(n) for n in tetrahedron_vectors()]
    pairs = [sharp_two_clone_family(k, 0.75) for k in kets]
    labels = tuple(f"n{i + 1}" for i in range(4))
    out = Povm(tuple(F for F, _ in pairs), "symmetric", labels)
    eff = Povm(tuple(effective_element(F) for F, _ in pairs), "full", labels)
    return out, eff


def identity_povm(selector="clone1"):
    return Povm((PovmElement(selector, np.eye(selector_dim(selector))),), "full", ("1",))


def kappa_ket(A, B):
    """Unnormalized ``A (3 psi+ + psi-) + B (phi+ - phi-)`` on clone2 (x) ancilla."""
    phip, psip, phim, psim = bell_basis()
    return A * (3 * psip + psim) + B * (phip - phim)


def kappa_element(A, B):
    """Projector onto the normalized kappa state and its predicted rank-one input element."""
    k = kappa_ket(A, B)
    n = np.linalg.norm(k)
    if n < 1e-14:
        raise ConstraintError("kappa_element needs (A, B) != (0, 0)")
    kE = np.array([6 * A, 2 * B], dtype=np.complex128) / (np.sqrt(12) * n)
    return PovmElement("clone-ancilla", projector(k / n)), PovmElement("clone1", projector(kE))


def sym_anti_weights(F):
    F = np.asarray(F)
    return float(np.trace(P_SYM @ F).real), float(np.trace(P_ANTI @ F).real)


def sym_anti_ratio(F):
    s, a = sym_anti_weights(F)
    return np.inf if a <= 0 else s / a


@dataclass(frozen=True)
class NoGoReport:
    samples: int
    min_element_ratio: float
    sum_ratio: float
    identity_ratio: float
    margin: float
    holds: bool


def no_complete_sharp_clone_ancilla_check(rng, samples=50, atol=1e-10):
    """Weight witness against a complete clone-ancilla POVM of sharp-inducing projectors.

    Every rotated kappa projector puts at least 9 times as much weight on the
    symmetric subspace as on the antisymmetric one, while the identity has
    ratio 3. The margin is ``min(ratio over elements and their sum) - 3``.
    """
    from .states import random_su2

    total = np.zeros((4, 4), dtype=np.complex128)
    ratios = []
    for _ in range(samples):
        A, B = rng.normal(size=2)
        V = random_su2(rng)
        F, _ = kappa_element(A, B)
        VV = np.kron(V, V)
        G = VV @ F.matrix @ dagger(VV)
        ratios.append(sym_anti_ratio(G))
        total += G
    r_min = float(min(ratios))
    r_sum = float(sym_anti_ratio(total))
    r_id = float(sym_anti_ratio(np.eye(4)))
    margin = min(r_min, r_sum) - r_id
    return NoGoReport(samples, r_min, r_sum, r_id, margin, bool(margin >= 6 - atol))


# --------------------------------------------------------------------- diagnostics

@dataclass(frozen=True)
class Violation:
    element: object
    check: str
    detail: str


@dataclass(frozen=True)
class PovmDiagnostics:
    violations: list = field(default_factory=list)
    complete: bool = False

    @property
    def ok(self):
        return not self.violations


def validate_povm(povm, atol=ATOL):
    """Collect every violated POVM condition; never raises on an invalid POVM."""
    violations = []
    d = povm.dim
    for i, el in enumerate(povm.elements):
        F = el.matrix
        if not is_hermitian(F, atol):
            violations.append(Violation(i, "hermitian", "element is not Hermitian"))
            continue
        w = np.linalg.eigvalsh((F + dagger(F)) / 2)
        if w[0] < -atol:
            violations.append(Violation(i, "positivity", f"smallest eigenvalue {w[0]:.6g} < 0"))
        if w[-1] > 1 + atol:
            violations.append(Violation(i, "eigenvalue-bound", f"largest eigenvalue {w[-1]:.6g} > 1"))
        if povm.support == "symmetric":
            b, f = symmetric_parameters(F)
            dd = 3
        else:
            b, f = expand_in_generators(F)
            dd = d
        if not -atol <= b <= 1 + atol:
            violations.append(Violation(i, "b-range", f"b = {b:.6g} outside [0, 1]"))
        bound = dd * (dd - 1) / 2
        if b > atol and f @ f > bound + 1e-9:
            violations.append(Violation(i, "f-norm", f"|f|^2 = {f @ f:.6g} exceeds {bound:g}"))
    complete = close(povm.total(), povm.target_identity(), atol)
    if not complete:
        dev = float(np.max(np.abs(povm.total() - povm.target_identity())))
        violations.append(Violation(None, "completeness", f"sum deviates from {povm.support} identity by {dev:.3e}"))
    return PovmDiagnostics(violations, complete)


def effective_povm(povm):
    return Povm(tuple(effective_element(e) for e in povm.elements), "full", povm.labels)


def random_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_povm_element(rng, selector, symmetric=False):
    """Random element with eigenvalues uniform in [0, 1].

    ``symmetric=True`` draws a two-qubit element supported on the symmetric subspace.
    """
    d = 3 if symmetric else selector_dim(selector)
    U = random_unitary(rng, d)
    M = (U * rng.uniform(0, 1, size=d)) @ dagger(U)
    if symmetric:
        M = SYM_ISOMETRY @ M @ dagger(SYM_ISOMETRY)
    return PovmElement(selector, (M + dagger(M)) / 2)
