"""The optimal universal 1->2 qubit cloner.

Output subsystems are ordered ``clone1 (x) clone2 (x) ancilla``; the cloner
is stored as the 8x2 isometry obtained by restricting the unitary to inputs
of the form ``|psi>|00>``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotUnitaryError
from .linalg import dagger, is_unitary, partial_trace, projector, tensor_product
from .states import density_to_bloch, normalized_ket, to_bell_basis

CLONE1, CLONE2, ANCILLA = 0, 1, 2
SUBSYSTEM_NAMES = ("clone1", "clone2", "ancilla")

SELECTORS = {
    "clone1": (CLONE1,),
    "clone2": (CLONE2,),
    "ancilla": (ANCILLA,),
    "both-clones": (CLONE1, CLONE2),
    "clone-ancilla": (CLONE2, ANCILLA),
    "all": (CLONE1, CLONE2, ANCILLA),
}


def selector_subsystems(selector):
    try:
        return SELECTORS[selector]
    except KeyError:
        raise DimensionError(f"unknown subsystem selector {selector!r}") from None


def build_cloner():
    """8x2 isometry; column k is the output for input ``|k>|00>``."""
    a = np.sqrt(2 / 3)
    c = 1 / np.sqrt(6)
    u = np.zeros((8, 2), dtype=np.complex128)
    # U|000> = sqrt(2/3)|001> - (|010> + |100>)/sqrt(6)
    u[0b001, 0] = a
    u[0b010, 0] = -c
    u[0b100, 0] = -c
    # U|100> = -sqrt(2/3)|110> + (|101> + |011>)/sqrt(6)
    u[0b110, 1] = -a
    u[0b101, 1] = c
    u[0b011, 1] = c
    return u


CLONER = build_cloner()
CLONER.setflags(write=False)


def complete_unitary(iso=CLONER):
    """Extend the isometry to an 8x8 unitary acting on ``|k>|ba>``.

    Columns 0 and 4 (inputs ``|000>`` and ``|100>``) are the isometry
    columns; the remaining columns are an arbitrary orthonormal completion.
    """
    n = iso.shape[0]
    cols = [iso[:, 0], iso[:, 1]]
    for e in np.eye(n, dtype=np.complex128):
        v = e - sum(np.vdot(c, e) * c for c in cols)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
        if len(cols) == n:
            break
    rest = cols[2:]
    order = [cols[0]] + rest[:3] + [cols[1]] + rest[3:]
    return np.column_stack(order)


@dataclass(frozen=True)
class CloneOutput:
    """Pure three-qubit cloner output for a given input ket."""

    state: np.ndarray
    input: np.ndarray

    @property
    def density(self):
        return projector(self.state)

    def reduced(self, keep):
        """Reduced density matrix on the subsystems ``keep`` (names or indices)."""
        return reduced_state(self, keep)

    def bloch(self, subsystem):
        return density_to_bloch(self.reduced([subsystem]))


def clone(input_ket):
    """Apply the cloner to a normalized qubit state."""
    psi = normalized_ket(input_ket)
    if psi.shape != (2,):
        raise DimensionError("cloner input must be a single-qubit ket")
    return CloneOutput(state=CLONER @ psi, input=psi)


def _subsystem_index(k):
    if isinstance(k, str):
        if k in SUBSYSTEM_NAMES:
            return SUBSYSTEM_NAMES.index(k)
        raise DimensionError(f"unknown subsystem {k!r}")
    return int(k)


def reduced_state(out, keep):
    if isinstance(keep, str):
        keep = selector_subsystems(keep) if keep in SELECTORS else [keep]
    idx = sorted({_subsystem_index(k) for k in keep})
    if not idx:
        raise DimensionError("reduced_state needs at least one subsystem to keep")
    return partial_trace(out.density, [2, 2, 2], idx)


def reduced_clone_ancilla(out):
    """Reduced state of clone2 and the ancilla, written in the Bell basis."""
    return to_bell_basis(reduced_state(out, [CLONE2, ANCILLA]))


def reduced_two_clones(out):
    """Reduced state of the two clones, written in the Bell basis."""
    return to_bell_basis(reduced_state(out, [CLONE1, CLONE2]))


def check_covariance(V, iso=CLONER):
    """Max deviation between ``U (V x 1 x 1)|k00>`` and ``(V x V x V) U|k00>``, k in {0, 1}.

    The identity only holds for ``V`` in SU(2); a unitary with a nontrivial
    determinant shows up as a large deviation.
    """
    V = np.asarray(V, dtype=np.complex128)
    if V.shape != (2, 2) or not is_unitary(V):
        raise NotUnitaryError("check_covariance needs a 2x2 unitary")
    vvv = tensor_product(V, V, V)
    lhs = iso @ V
    rhs = vvv @ iso
    return float(np.max(np.linalg.norm(lhs - rhs, axis=0)))


def cloner_defect(iso=CLONER):
    """``max |U^dag U - 1|`` for the stored isometry."""
    return float(np.max(np.abs(dagger(iso) @ iso - np.eye(2))))
