"""Two-qubit density matrices, X states and Bloch decompositions.

The orthonormal operator basis on each qubit is ``{I, sx, sy, sz} / sqrt(2)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPositive, TraceNotOne

SQRT2 = np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
# orthonormal Hermitian basis without the identity element
BASIS = tuple(p / SQRT2 for p in PAULIS)

STATE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class TwoQubitState:
    """A validated 4x4 density matrix, basis ordering |00>, |01>, |10>, |11>."""

    elements: np.ndarray

    def __post_init__(self):
        m = np.array(self.elements, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "elements", m)

    def __array__(self, dtype=None, copy=None):
        return self.elements if dtype is None else self.elements.astype(dtype)


@dataclass(frozen=True)
class XState:
    """Real X-shaped two-qubit state: diagonal populations plus r14, r23."""

    r11: float
    r22: float
    r33: float
    r44: float
    r14: float
    r23: float

    def __post_init__(self):
        diag = (self.r11, self.r22, self.r33, self.r44)
        s = sum(diag)
        if abs(s - 1.0) > STATE_TOL:
            raise TraceNotOne(s - 1.0)
        low = min(diag)
        if low < -STATE_TOL:
            raise NotPositive(-low)
        gap = max(self.r23**2 - self.r22 * self.r33, self.r14**2 - self.r11 * self.r44)
        if gap > STATE_TOL:
            raise NotPositive(gap)

    def matrix(self):
        m = np.diag([self.r11, self.r22, self.r33, self.r44]).astype(float)
        m[0, 3] = m[3, 0] = self.r14
        m[1, 2] = m[2, 1] = self.r23
        return m

    def to_state(self):
        return TwoQubitState(self.matrix())

    @property
    def bloch_z(self):
        """z component of the subsystem-a Bloch vector."""
        return (self.r11 + self.r22 - self.r33 - self.r44) / 2


@dataclass(frozen=True)
class BlochDecomposition:
    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def reconstruct(self):
        """Rebuild the 4x4 density matrix from the Bloch components."""
        rho = np.kron(I2, I2) / 4
        for i, Xi in enumerate(BASIS):
            rho = rho + self.x[i] * np.kron(Xi, I2 / SQRT2)
            rho = rho + self.y[i] * np.kron(I2 / SQRT2, Xi)
            for j, Yj in enumerate(BASIS):
                rho = rho + self.T[i, j] * np.kron(Xi, Yj)
        return rho


def _as_matrix(rho):
    if isinstance(rho, (TwoQubitState, XState)):
        return np.asarray(rho.elements if isinstance(rho, TwoQubitState) else rho.matrix())
    return np.asarray(rho)


def validate_state(m, tol=STATE_TOL, psd_tol=PSD_TOL):
    """Check hermiticity, unit trace and positivity; return a TwoQubitState.

    Eigenvalues that are negative by less than ``psd_tol`` are clamped to zero
    and the matrix is rebuilt from the clamped spectrum.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    herm = np.max(np.abs(m - m.conj().T))
    if herm > tol:
        raise NotHermitian(herm)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(tr - 1.0)
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    if w[0] < -psd_tol:
        raise NotPositive(-w[0])
    if w[0] < 0:
        w = np.clip(w, 0.0, 1.0)
        m = (v * w) @ v.conj().T
    return TwoQubitState(m)


def bloch_decompose(rho):
    m = _as_matrix(rho)
    x = np.array([np.trace(m @ np.kron(Xi, I2)).real / SQRT2 for Xi in BASIS])
    y = np.array([np.trace(m @ np.kron(I2, Yj)).real / SQRT2 for Yj in BASIS])
    T = np.array([[np.trace(m @ np.kron(Xi, Yj)).real for Yj in BASIS] for Xi in BASIS])
    return BlochDecomposition(x, y, T)


def xstate_bloch(s):
    """Bloch decomposition of an X state without forming the 4x4 matrix."""
    x = np.array([0.0, 0.0, (s.r11 + s.r22 - s.r33 - s.r44) / 2])
    y = np.array([0.0, 0.0, (s.r11 - s.r22 + s.r33 - s.r44) / 2])
    T = np.diag([s.r14 + s.r23, s.r23 - s.r14, 0.5 * (s.r11 - s.r22 - s.r33 + s.r44)])
    return BlochDecomposition(x, y, T)


def xstate_from_correlators(c, tol=PSD_TOL):
    """Assemble the reduced two-spin X state from one- and two-point functions.

    ``c`` needs attributes ``mz``, ``xx``, ``yy`` and ``zz``.
    """
    mz, xx, yy, zz = c.mz, c.xx, c.yy, c.zz
    r11 = (1 + 2 * mz + zz) / 4
    r44 = (1 - 2 * mz + zz) / 4
    r22 = (1 - zz) / 4
    r14 = (xx - yy) / 4
    r23 = (xx + yy) / 4
    # quadrature noise can push a vanishing population slightly negative
    diag = [r11, r22, r44]
    if min(diag) < -tol:
        raise NotPositive(-min(diag))
    r11, r22, r44 = (max(d, 0.0) for d in diag)
    gap = max(r23**2 - r22 * r22, r14**2 - r11 * r44)
    if gap > tol:
        raise NotPositive(gap)
    r11 = 1.0 - 2 * r22 - r44
    # positivity was checked above; shave rounding so the dataclass invariants hold
    r14 = np.sign(r14) * min(abs(r14), np.sqrt(max(r11 * r44, 0.0)))
    r23 = np.sign(r23) * min(abs(r23), r22)
    return XState(float(r11), float(r22), float(r22), float(r44), float(r14), float(r23))


def partial_trace_a(rho):
    """Trace out qubit a, returning the 2x2 state of qubit b."""
    m = _as_matrix(rho).reshape(2, 2, 2, 2)
    return np.einsum("ijik->jk", m)


def partial_trace_b(rho):
    """Trace out qubit b, returning the 2x2 state of qubit a."""
    m = _as_matrix(rho).reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", m)


def matrix_sqrt_psd(rho, tol=PSD_TOL):
    """Principal square root of a Hermitian positive semidefinite matrix."""
    m = np.asarray(rho)
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    if w[0] < -tol:
        raise NotPositive(-w[0])
    return (v * np.sqrt(roundoff_floor(w))) @ v.conj().T


def roundoff_floor(w):
    """Zero eigenvalues that are indistinguishable from rounding noise.

    A zero eigenvalue comes out of eigh as +-1e-17, whose square root (3e-9)
    would otherwise leak into every downstream quantity.
    """
    w = np.asarray(w, dtype=float)
    floor = 64 * np.finfo(float).eps * max(float(np.max(np.abs(w))), 1e-300)
    return np.where(w <= floor, 0.0, w)
