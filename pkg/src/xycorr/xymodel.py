"""Thermodynamic-limit XY chain in a transverse field.

Hamiltonian (periodic, N -> infinity)::

    H = -(lam/2) sum_j [(1+g) sx_j sx_{j+1} + (1-g) sy_j sy_{j+1}] - sum_j sz_j

One- and two-point functions follow from the free-fermion solution as
integrals over the mode angle ``phi`` in ``[0, pi]``. The thermal factor in
those integrals is ``tanh(omega / kT)`` with ``omega`` half the mode gap
scale, which corresponds to a Gibbs weight ``exp(-H / (2 kT))`` for the
Hamiltonian above. The magnetization keeps the conventional overall minus
sign, so ``mz = -1`` at ``lam = 0, kT = 0``. Every measure in this package is
invariant under the resulting global spin flip.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import quadrature
from .errors import DomainError
from .qstate import xstate_from_correlators

QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 40


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    lam: float
    kT: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "lam", "kT"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.lam < 0.0:
            raise DomainError(f"lambda must be >= 0, got {self.lam}")
        if self.kT < 0.0:
            raise DomainError(f"kT must be >= 0, got {self.kT}")

    @property
    def beta(self):
        return np.inf if self.kT == 0.0 else 1.0 / self.kT


@dataclass(frozen=True)
class Correlators:
    mz: float
    xx: float
    yy: float
    zz: float
    r: int


@dataclass(frozen=True)
class GSequence:
    """G_k for k = -r..r, stored at index k + r."""

    values: np.ndarray
    params: ModelParams
    mz: float

    @property
    def r(self):
        return (len(self.values) - 1) // 2

    def __getitem__(self, k):
        if abs(k) > self.r:
            raise IndexError(f"G_{k} outside stored range [-{self.r}, {self.r}]")
        return float(self.values[k + self.r])

    def truncate(self, r):
        if r > self.r:
            raise IndexError(f"cannot extend a G-sequence of range {self.r} to {r}")
        lo = self.r - r
        return GSequence(self.values[lo:lo + 2 * r + 1], self.params, self.mz)


def dispersion(p, phi):
    """omega(phi) = sqrt((g lam sin phi)^2 + (1 + lam cos phi)^2) / 2."""
    phi = np.asarray(phi, dtype=float)
    return 0.5 * np.hypot(p.gamma * p.lam * np.sin(phi), 1.0 + p.lam * np.cos(phi))


def _thermal_weight(p, omega):
    """tanh(beta omega) / (2 pi omega), finite where omega -> 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if p.kT == 0.0:
            w = np.where(omega > 0, 1.0 / omega, 0.0)
        else:
            w = np.where(omega > 0, np.tanh(omega / p.kT) / omega, 1.0 / p.kT)
    return w / (2 * np.pi)


def _kernel_integrand(p, kmax):
    k = np.arange(kmax + 1)[:, None]
    kb = np.arange(1, kmax + 1)[:, None]

    def f(phi):
        w = _thermal_weight(p, dispersion(p, phi))
        a = np.cos(k * phi) * ((1.0 + p.lam * np.cos(phi)) * w)
        b = np.sin(kb * phi) * (np.sin(phi) * w)
        return np.vstack([a, b])

    return f


@lru_cache(maxsize=65536)
def _kernel(p, kmax):
    # lru_cache is a read-through memo; concurrent misses only duplicate work
    f = _kernel_integrand(p, kmax)
    vals, _ = quadrature.integrate(
        f, 0.0, np.pi, abs_tol=QUAD_TOL, rel_tol=QUAD_TOL, max_depth=QUAD_MAX_DEPTH
    )
    vals.setflags(write=False)
    return vals


def magnetization(p):
    """Transverse magnetization <sz> (sign convention: -1 at lam = 0, kT = 0)."""
    return -float(_kernel(p, 0)[0])


def g_sequence(p, r):
    """Kernel values G_k, k in [-r, r]."""
    if r < 1:
        raise DomainError(f"spin distance must be >= 1, got {r}")
    vals = _kernel(p, r)
    cos_part = vals[: r + 1]
    sin_part = np.concatenate([[0.0], vals[r + 1:]])
    ks = np.arange(-r, r + 1)
    g = cos_part[np.abs(ks)] - p.gamma * p.lam * np.sign(ks) * sin_part[np.abs(ks)]
    return GSequence(g, p, -float(cos_part[0]))


def _toeplitz_det(g, r, shift):
    i = np.arange(r)
    idx = i[:, None] - i[None, :] + shift
    return float(np.linalg.det(g.values[idx + g.r]))


def correlator_xx(g, r):
    """<sx_0 sx_r> as the r x r determinant of G_{i-j-1}."""
    return _toeplitz_det(g, r, -1)


def correlator_yy(g, r):
    """<sy_0 sy_r> as the r x r determinant of G_{i-j+1}."""
    return _toeplitz_det(g, r, +1)


def correlator_zz(p, g, r):
    return g.mz**2 - g[r] * g[-r]


def correlators(p, r, g=None):
    if g is None:
        g = g_sequence(p, r)
    elif g.r != r:
        g = g.truncate(r)
    return Correlators(
        mz=g.mz,
        xx=correlator_xx(g, r),
        yy=correlator_yy(g, r),
        zz=correlator_zz(p, g, r),
        r=r,
    )


def reduced_state(p, r, g=None):
    """Thermal reduced density matrix of spins 0 and r as an XState."""
    return xstate_from_correlators(correlators(p, r, g))


def clear_cache():
    _kernel.cache_clear()
