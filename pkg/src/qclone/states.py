"""Qubit state toolkit: Bloch vectors, Bell basis, SU(d) generator bases."""
import numpy as np

from .errors import ConstraintError, DimensionError, NotHermitianError, NotNormalizedError
from .linalg import ATOL, close, dagger, eig_hermitian, is_hermitian, projector

I2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

KET0 = np.array([1, 0], dtype=np.complex128)
KET1 = np.array([0, 1], dtype=np.complex128)

BELL_LABELS = ("phi+", "psi+", "phi-", "psi-")

_r = 1 / np.sqrt(2)
_BELL = (
    np.array([_r, 0, 0, _r], dtype=np.complex128),
    np.array([0, _r, _r, 0], dtype=np.complex128),
    np.array([_r, 0, 0, -_r], dtype=np.complex128),
    np.array([0, _r, -_r, 0], dtype=np.complex128),
)

# columns are the Bell kets in BELL_LABELS order; B^dag M B rewrites M in the Bell basis
BELL_MATRIX = np.column_stack(_BELL)
SYM_ISOMETRY = BELL_MATRIX[:, :3]
P_SYM = SYM_ISOMETRY @ dagger(SYM_ISOMETRY)
P_ANTI = projector(_BELL[3])


def bell_basis():
    """The Bell kets ``(phi+, psi+, phi-, psi-)``."""
    return tuple(k.copy() for k in _BELL)


def to_bell_basis(m):
    """Rewrite a two-qubit operator given in the computational basis in the Bell basis."""
    return dagger(BELL_MATRIX) @ np.asarray(m) @ BELL_MATRIX


def from_bell_basis(m):
    return BELL_MATRIX @ np.asarray(m) @ dagger(BELL_MATRIX)


def check_bloch(s, atol=1e-12):
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.shape != (3,):
        raise DimensionError(f"Bloch vector must have 3 components, got {s.shape}")
    if np.linalg.norm(s) > 1 + atol:
        raise ConstraintError(f"Bloch vector length {np.linalg.norm(s):.6g} exceeds 1")
    return s


def bloch_to_density(s):
    s = check_bloch(s)
    return 0.5 * (I2 + s[0] * SIGMA_X + s[1] * SIGMA_Y + s[2] * SIGMA_Z)


def density_to_bloch(rho):
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DimensionError(f"density_to_bloch needs a 2x2 matrix, got {rho.shape}")
    return np.array([np.trace(rho @ p).real for p in PAULI])


def ket_to_bloch(ket):
    return density_to_bloch(projector(ket))


def bloch_to_ket(s):
    """Pure state with unit Bloch vector ``s`` (phase: first amplitude real, >= 0)."""
    s = check_bloch(s)
    n = np.linalg.norm(s)
    if abs(n - 1) > 1e-12:
        raise ConstraintError("bloch_to_ket needs a unit Bloch vector")
    theta = np.arccos(np.clip(s[2], -1.0, 1.0))
    phi = np.arctan2(s[1], s[0])
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=np.complex128)


def normalized_ket(amplitudes, atol=1e-12):
    """Validate that ``amplitudes`` is a unit vector and return it as complex128."""
    k = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(k)
    if abs(nrm - 1) > atol:
        raise NotNormalizedError(f"ket norm is {nrm:.12g}, expected 1")
    return k


def validate_density(rho, atol=ATOL):
    """Raise unless ``rho`` is Hermitian, unit-trace and positive semidefinite."""
    rho = np.asarray(rho, dtype=np.complex128)
    if not is_hermitian(rho, atol):
        raise NotHermitianError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise NotNormalizedError(f"density matrix trace is {np.trace(rho).real:.12g}")
    w, _ = eig_hermitian(rho, atol)
    if w[0] < -atol:
        raise ConstraintError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    return rho


AXIS_KETS = {
    "x+": np.array([1, 1], dtype=np.complex128) / np.sqrt(2),
    "x-": np.array([1, -1], dtype=np.complex128) / np.sqrt(2),
    "y+": np.array([1, 1j], dtype=np.complex128) / np.sqrt(2),
    "y-": np.array([1, -1j], dtype=np.complex128) / np.sqrt(2),
    "z+": KET0.copy(),
    "z-": KET1.copy(),
}


def su_generators(d):
    """Generalized Gell-Mann matrices for SU(d), d in {2, 3, 4}.

    Ordering follows the textbook numbering: for each column ``j = 1..d-1``
    the symmetric and antisymmetric pair ``(i, j)`` for every ``i < j``,
    followed by the diagonal generator of size ``j+1``. For ``d=2`` this is
    ``(sigma_x, sigma_y, sigma_z)``; for ``d=3`` the standard
    ``lambda_1..lambda_8``.
    """
    if d not in (2, 3, 4):
        raise DimensionError(f"unsupported generator dimension {d}")
    gens = []
    for j in range(1, d):
        for i in range(j):
            s = np.zeros((d, d), dtype=np.complex128)
            s[i, j] = s[j, i] = 1
            a = np.zeros((d, d), dtype=np.complex128)
            a[i, j] = -1j
            a[j, i] = 1j
            gens.extend((s, a))
        diag = np.zeros(d)
        diag[:j] = 1
        diag[j] = -j
        gens.append(np.diag(diag * np.sqrt(2 / (j * (j + 1)))).astype(np.complex128))
    return tuple(gens)


def expand_in_generators(F, basis=None):
    """Coefficients ``(b, f)`` with ``F = b (1 + f . tau)``.

    ``basis`` defaults to :func:`su_generators` of the matching dimension.
    ``b = 0`` yields ``f = 0``.
    """
    F = np.asarray(F, dtype=np.complex128)
    d = F.shape[0]
    if F.shape != (d, d):
        raise DimensionError("expand_in_generators needs a square matrix")
    if not is_hermitian(F):
        raise NotHermitianError("expand_in_generators needs a Hermitian matrix")
    basis = su_generators(d) if basis is None else basis
    b = np.trace(F).real / d
    if abs(b) < 1e-15:
        return b, np.zeros(len(basis))
    f = np.array([np.trace(F @ t).real for t in basis]) / (2 * b)
    return b, f


def from_generators(b, f, basis=None):
    f = np.asarray(f, dtype=float)
    d = int(round(np.sqrt(len(f) + 1)))
    basis = su_generators(d) if basis is None else basis
    return b * (np.eye(d) + sum(fk * t for fk, t in zip(f, basis)))


def tetrahedron_vectors():
    """Unit vectors to the corners of a regular tetrahedron, first one along +z."""
    r = 2 * np.sqrt(2) / 3
    vs = [np.array([0.0, 0.0, 1.0])]
    for k in range(3):
        phi = 2 * np.pi * k / 3
        vs.append(np.array([r * np.cos(phi), r * np.sin(phi), -1 / 3]))
    return tuple(vs)


def random_bloch(rng):
    """Unit Bloch vector uniform on the sphere."""
    z = rng.uniform(-1, 1)
    phi = rng.uniform(0, 2 * np.pi)
    r = np.sqrt(1 - z * z)
    return np.array([r * np.cos(phi), r * np.sin(phi), z])


def random_pure_ket(rng):
    return bloch_to_ket(random_bloch(rng))


def random_su2(rng):
    """Haar-random element of SU(2) from a uniform unit quaternion."""
    q = rng.normal(size=4)
    a, b, c, d = q / np.linalg.norm(q)
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]], dtype=np.complex128)


def uniform_sphere_kets(u_z, u_phi):
    """Vectorized map of two arrays of uniforms in [0, 1) to kets uniform on the Bloch sphere."""
    z = 2 * np.asarray(u_z) - 1
    phi = 2 * np.pi * np.asarray(u_phi)
    theta = np.arccos(np.clip(z, -1, 1))
    out = np.empty((z.shape[0], 2), dtype=np.complex128)
    out[:, 0] = np.cos(theta / 2)
    out[:, 1] = np.exp(1j * phi) * np.sin(theta / 2)
    return out


def is_projector_rank1(F, atol=ATOL):
    return close(F @ F, F, atol) and abs(np.trace(F).real - 1) <= atol
