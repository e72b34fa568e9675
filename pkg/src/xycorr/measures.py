"""Closed-form correlation quantifiers for two-qubit states.

All measures are normalised to 1 on the Bell states.
"""

import enum

import numpy as np

from .errors import BlochVectorZero
from .qstate import (
    BASIS,
    I2,
    SY,
    BlochDecomposition,
    TwoQubitState,
    XState,
    bloch_decompose,
    matrix_sqrt_psd,
    roundoff_floor,
    partial_trace_b,
    xstate_bloch,
)

BLOCH_ZERO = 1e-9
CLAMP = 1e-12

_SYSY = np.kron(SY, SY)


class MeasureKind(str, enum.Enum):
    MIN = "MIN"
    WYSIM = "WYSIM"
    GMQD = "GMQD"
    OMQC = "OMQC"
    CONCURRENCE = "CONCURRENCE"

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).strip().upper())
        except ValueError:
            raise ValueError(
                f"unknown measure {name!r}; expected one of {', '.join(m.value for m in cls)}"
            ) from None


def _matrix(rho):
    if isinstance(rho, XState):
        return rho.matrix().astype(complex)
    if isinstance(rho, TwoQubitState):
        return rho.elements
    return np.asarray(rho, dtype=complex)


def _bloch(b):
    if isinstance(b, BlochDecomposition):
        return b
    if isinstance(b, XState):
        return xstate_bloch(b)
    return bloch_decompose(b)


def min_closed(b):
    """Measurement-induced nonlocality from the Bloch decomposition."""
    b = _bloch(b)
    TTt = b.T @ b.T.T
    nx2 = float(b.x @ b.x)
    if np.sqrt(nx2) > BLOCH_ZERO:
        val = np.trace(TTt) - b.x @ TTt @ b.x / nx2
    else:
        val = np.trace(TTt) - np.linalg.eigvalsh(TTt)[0]
    return float(max(2 * val, 0.0))


def min_xstate(s):
    """MIN of an X state with nonzero local Bloch vector: 4 (r23^2 + r14^2)."""
    if abs(s.bloch_z) <= BLOCH_ZERO:
        raise BlochVectorZero(
            f"local Bloch vector |x| = {abs(s.bloch_z):.3e}; use min_closed instead"
        )
    return 4.0 * (s.r23**2 + s.r14**2)


def skew_information(rho, X):
    """Wigner-Yanase skew information -1/2 tr [sqrt(rho), X]^2."""
    m = _matrix(rho)
    X = np.asarray(X, dtype=complex)
    s = matrix_sqrt_psd(m)
    # -1/2 tr[s, X]^2 = tr(rho X^2) - tr(s X s X)
    val = np.trace(m @ X @ X).real - np.trace(s @ X @ s @ X).real
    return float(max(val, 0.0))


def _local_information(m, basis):
    s = matrix_sqrt_psd(m)
    total = 0.0
    for X in basis:
        XI = np.kron(X, I2) if m.shape[0] == 4 else X
        total += np.trace(m @ XI @ XI).real - np.trace(s @ XI @ s @ XI).real
    return total


def wysim(rho, basis=BASIS):
    """Skew-information total correlations with respect to subsystem a.

    ``basis`` is the traceless part of an orthonormal Hermitian basis on qubit
    a; the result does not depend on which one is used.
    """
    m = _matrix(rho)
    q_ab = _local_information(m, basis)
    q_a = _local_information(partial_trace_b(m), basis)
    val = 2.0 / 3.0 * (q_ab - q_a)
    if val < -CLAMP:
        raise ArithmeticError(f"negative skew-information difference {val:.3e}")
    return float(max(val, 0.0))


def _s_matrix(b):
    return np.outer(b.x, b.x) + b.T @ b.T.T


def gmqd_closed(b):
    """Geometric discord 2 (tr S - lambda_max(S)) with S = x x^t + T T^t."""
    S = _s_matrix(_bloch(b))
    w = np.linalg.eigvalsh(S)
    return float(max(2 * (w.sum() - w[-1]), 0.0))


def omqc(b):
    """Optimisation-free lower bound of the geometric discord."""
    S = _s_matrix(_bloch(b))
    tr = np.trace(S)
    tr2 = np.trace(S @ S)
    rad = 6 * tr2 - 2 * tr**2
    if rad < -CLAMP:
        raise ArithmeticError(f"negative radicand {rad:.3e}")
    return float(max(2.0 / 3.0 * (2 * tr - np.sqrt(max(rad, 0.0))), 0.0))


def concurrence_general(rho):
    """Wootters concurrence from the spectrum of rho times its spin flip."""
    m = _matrix(rho)
    flipped = _SYSY @ m.conj() @ _SYSY
    # rho rho~ is similar to the Hermitian sqrt(rho) rho~ sqrt(rho)
    s = matrix_sqrt_psd(m)
    lam = np.linalg.eigvalsh(s @ flipped @ s)
    if lam[0] < -CLAMP:
        raise ArithmeticError(f"negative eigenvalue {lam[0]:.3e} in rho rho~")
    r = np.sqrt(roundoff_floor(lam))[::-1]
    return float(max(0.0, r[0] - r[1] - r[2] - r[3]))


def concurrence_branches(s):
    """The two candidate expressions whose positive part gives X-state concurrence.

    Returns ``(2(|r14| - sqrt(r22 r33)), 2(|r23| - sqrt(r11 r44)))``.
    """
    a = 2 * (abs(s.r14) - np.sqrt(max(s.r22 * s.r33, 0.0)))
    b = 2 * (abs(s.r23) - np.sqrt(max(s.r11 * s.r44, 0.0)))
    return a, b


def concurrence_xstate(s):
    return float(max(0.0, *concurrence_branches(s)))


def evaluate(kind, state):
    """Evaluate one measure, taking the X-state shortcuts when available."""
    kind = MeasureKind(kind)
    if isinstance(state, XState):
        if kind is MeasureKind.MIN:
            if abs(state.bloch_z) > BLOCH_ZERO:
                return min_xstate(state)
            return min_closed(xstate_bloch(state))
        if kind is MeasureKind.CONCURRENCE:
            return concurrence_xstate(state)
        if kind is MeasureKind.GMQD:
            return gmqd_closed(xstate_bloch(state))
        if kind is MeasureKind.OMQC:
            return omqc(xstate_bloch(state))
        return wysim(state)
    if kind is MeasureKind.MIN:
        return min_closed(bloch_decompose(state))
    if kind is MeasureKind.CONCURRENCE:
        return concurrence_general(state)
    if kind is MeasureKind.GMQD:
        return gmqd_closed(bloch_decompose(state))
    if kind is MeasureKind.OMQC:
        return omqc(bloch_decompose(state))
    return wysim(state)
