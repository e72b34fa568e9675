"""Independent checks: exact diagonalization of finite rings and brute-force
measurement searches for MIN and geometric discord."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy import sparse
from scipy.optimize import minimize_scalar

from .errors import DomainError, SizeTooLarge
from .measures import BLOCH_ZERO
from .qstate import I2, SX, SY, SZ, TwoQubitState, bloch_decompose, validate_state
from .xymodel import ModelParams

MAX_SPINS = 14
DEGENERACY_TOL = 1e-12
# Gibbs weight exp(-beta * ENERGY_SCALE * H) reproduces the temperature
# convention of the thermodynamic-limit integrals in xymodel.
ENERGY_SCALE = 0.5


@dataclass(frozen=True)
class RingSpec:
    n_spins: int
    params: ModelParams

    def __post_init__(self):
        if self.n_spins > MAX_SPINS:
            raise SizeTooLarge(f"n_spins = {self.n_spins} exceeds {MAX_SPINS}")
        if self.n_spins < 2:
            raise DomainError(f"n_spins must be >= 2, got {self.n_spins}")


def _site_op(op, j, n):
    out = sparse.identity(1, format="csr", dtype=complex)
    for k in range(n):
        out = sparse.kron(out, op if k == j else sparse.identity(2), format="csr")
    return out


def sparse_hamiltonian(spec):
    """XY ring Hamiltonian as a real CSR matrix; site 0 is the most significant bit."""
    n = spec.n_spins
    g, lam = spec.params.gamma, spec.params.lam
    sx = [_site_op(sparse.csr_matrix(SX), j, n) for j in range(n)]
    sy = [_site_op(sparse.csr_matrix(SY), j, n) for j in range(n)]
    sz = [_site_op(sparse.csr_matrix(SZ), j, n) for j in range(n)]
    bonds = range(n) if n > 2 else range(1)
    H = sparse.csr_matrix((2**n, 2**n), dtype=complex)
    for j in bonds:
        k = (j + 1) % n
        H = H - 0.5 * lam * ((1 + g) * sx[j] @ sx[k] + (1 - g) * sy[j] @ sy[k])
    for j in range(n):
        H = H - sz[j]
    # sy sy products are real, so H is real symmetric
    return H.real.tocsr()


def ring_hamiltonian(spec):
    """Dense XY ring Hamiltonian."""
    return sparse_hamiltonian(spec).toarray()


def parity_sectors(H, n):
    """Diagonalize in the two sectors of the spin-flip parity prod_j sz_j.

    Returns [(energies, basis indices, eigenvectors within the sector), ...].
    """
    H = sparse.csr_matrix(H)
    idx = np.arange(2**n)
    odd = np.array([bin(i).count("1") % 2 for i in idx], dtype=bool)
    out = []
    for mask in (~odd, odd):
        sel = idx[mask]
        block = H[sel][:, sel].toarray()
        w, v = la.eigh(block, overwrite_a=True, check_finite=False)
        out.append((w, sel, v))
    return out


def _parity_eigh(H, n):
    """All levels and full-space eigenvectors, sorted by energy."""
    energies, vectors = [], []
    for w, sel, v in parity_sectors(H, n):
        full = np.zeros((2**n, sel.size))
        full[sel] = v
        energies.append(w)
        vectors.append(full)
    w = np.concatenate(energies)
    order = np.argsort(w, kind="stable")
    return w[order], np.hstack(vectors)[:, order]


def _boltzmann(energies, kT, e0):
    """Unnormalized Gibbs weights relative to the ground energy e0."""
    e = ENERGY_SCALE * (np.asarray(energies) - e0)
    if kT == 0:
        scale = max(1.0, abs(ENERGY_SCALE * e0))
        return (e < DEGENERACY_TOL * scale).astype(float)
    return np.exp(-e / kT)


def gibbs_weights(energies, kT):
    w = _boltzmann(energies, kT, np.min(energies))
    return w / w.sum()


def _pair_state(vectors, weights, n, i, j, rows=None, chunk=256):
    """sum_k w_k tr_rest |v_k><v_k| for spins (i, j), in column chunks.

    ``rows`` places sector eigenvectors into the full 2^n space.
    """
    keep = np.nonzero(weights > 0)[0]
    rest = [k for k in range(n) if k not in (i, j)]
    rho = np.zeros((4, 4))
    for lo in range(0, keep.size, chunk):
        cols = keep[lo:lo + chunk]
        V = vectors[:, cols] * np.sqrt(weights[cols])
        if rows is not None:
            full = np.zeros((2**n, cols.size))
            full[rows] = V
            V = full
        V = V.reshape((2,) * n + (cols.size,))
        V = np.transpose(V, [i, j] + rest + [n]).reshape(4, -1)
        rho += V @ V.T
    return rho


def ed_thermal_reduced(spec, i, j, use_parity=True):
    """Reduced state of spins (i, j) in the Gibbs state of a finite ring.

    At kT = 0 the ground space (levels within DEGENERACY_TOL) is mixed with
    equal weights. ``use_parity=False`` forces one dense diagonalization of
    the full Hilbert space.
    """
    n = spec.n_spins
    if not 0 <= i < j < n:
        raise DomainError(f"need 0 <= i < j < {n}, got ({i}, {j})")
    H = sparse_hamiltonian(spec)
    if use_parity:
        sectors = parity_sectors(H, n)
    else:
        w, v = la.eigh(H.toarray())
        sectors = [(w, None, v)]
    e0 = min(w[0] for w, _, _ in sectors)
    weights = [_boltzmann(w, spec.params.kT, e0) for w, _, _ in sectors]
    z = sum(b.sum() for b in weights)
    rho = sum(_pair_state(v, b / z, n, i, j, rows=sel) for (_, sel, v), b in zip(sectors, weights))
    return validate_state(rho, tol=1e-10)


def ed_correlators(spec, r, use_parity=True):
    """(mz, xx, yy, zz) between spins 0 and r of the ring."""
    rho = ed_thermal_reduced(spec, 0, r, use_parity=use_parity).elements
    ev = lambda op: float(np.trace(rho @ op).real)
    return {
        "mz": ev(np.kron(SZ, I2)),
        "xx": ev(np.kron(SX, SX)),
        "yy": ev(np.kron(SY, SY)),
        "zz": ev(np.kron(SZ, SZ)),
    }


# --- brute-force measurement searches ---------------------------------------

def fibonacci_sphere(n):
    """``n`` near-uniform unit vectors on the sphere, as (theta, phi) and xyz."""
    k = np.arange(n) + 0.5
    theta = np.arccos(1 - 2 * k / n)
    phi = np.pi * (1 + 5**0.5) * k
    xyz = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], -1)
    return theta, np.mod(phi, 2 * np.pi), xyz


def _axis(theta, phi):
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def disturbance(rho, axes):
    """2 ||rho - Pi_n(rho)||^2 for local projective measurements on qubit a.

    ``axes`` has shape (..., 3); Pi_n dephases qubit a in the eigenbasis of n.sigma.
    """
    m = np.asarray(rho.elements if isinstance(rho, TwoQubitState) else rho)
    axes = np.asarray(axes, dtype=float)
    ns = np.einsum("...i,ijk->...jk", axes, np.stack([SX, SY, SZ]))
    dephased = 0
    for sign in (1.0, -1.0):
        proj = 0.5 * (I2 + sign * ns)
        P = np.einsum("...ij,kl->...ikjl", proj, I2).reshape(axes.shape[:-1] + (4, 4))
        dephased = dephased + P @ m @ P
    return 2 * np.sum(np.abs(m - dephased) ** 2, axis=(-2, -1))


def _search_axes(rho, n_dirs, sign):
    """Optimise sign * disturbance over measurement axes: grid then refine."""
    theta, phi, xyz = fibonacci_sphere(n_dirs)
    vals = sign * disturbance(rho, xyz)
    best = int(np.argmax(vals))
    t0, p0, v0 = theta[best], phi[best], vals[best]
    step = np.sqrt(4 * np.pi / n_dirs)
    f = lambda t, p: sign * float(disturbance(rho, _axis(t, p)))
    # one coordinate pass of bounded scalar refinement in each angle
    res = minimize_scalar(lambda t: -f(t, p0), bounds=(t0 - step, t0 + step), method="bounded",
                          options={"xatol": 1e-10})
    if -res.fun > v0:
        t0, v0 = res.x, -res.fun
    span = step / max(np.sin(t0), step)
    res = minimize_scalar(lambda p: -f(t0, p), bounds=(p0 - span, p0 + span), method="bounded",
                          options={"xatol": 1e-10})
    if -res.fun > v0:
        v0 = -res.fun
    return sign * v0


def min_bruteforce(rho, n_dirs=2000):
    """MIN straight from its definition as a maximal measurement disturbance."""
    if n_dirs < 100:
        raise DomainError("n_dirs must be >= 100")
    b = bloch_decompose(rho)
    nx = np.linalg.norm(b.x)
    if nx > BLOCH_ZERO:
        # only the measurement along x leaves the local state of a unchanged
        return float(disturbance(rho, b.x / nx))
    return float(_search_axes(rho, n_dirs, +1.0))


def gmqd_bruteforce(rho, n_dirs=2000):
    """Geometric discord as the minimal disturbance over all local measurements."""
    if n_dirs < 100:
        raise DomainError("n_dirs must be >= 100")
    return float(_search_axes(rho, n_dirs, -1.0))


# --- random states -----------------------------------------------------------

RANDOM_KINDS = ("general", "xstate", "pure", "product")


def _ginibre(rng, n, k):
    return rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))


def _random_density(rng, n):
    g = _ginibre(rng, n, n)
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_xstate(rng):
    from .qstate import XState

    p = rng.dirichlet(np.ones(4))
    r14 = rng.uniform(-1, 1) * np.sqrt(p[0] * p[3])
    r23 = rng.uniform(-1, 1) * np.sqrt(p[1] * p[2])
    p[0] = 1.0 - p[1:].sum()
    return XState(p[0], p[1], p[2], p[3], r14, r23)


def random_state(kind, seed):
    """Seeded random two-qubit state of the requested class."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if kind == "general":
        m = _random_density(rng, 4)
    elif kind == "pure":
        psi = _ginibre(rng, 4, 1)[:, 0]
        psi /= np.linalg.norm(psi)
        m = np.outer(psi, psi.conj())
    elif kind == "product":
        m = np.kron(_random_density(rng, 2), _random_density(rng, 2))
    elif kind == "xstate":
        return random_xstate(rng).to_state()
    else:
        raise DomainError(f"unknown random state kind {kind!r}; expected one of {RANDOM_KINDS}")
    return validate_state(0.5 * (m + m.conj().T))
