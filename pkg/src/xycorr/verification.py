"""Self-check suites run by ``xycorr verify``.

Each suite yields Check records: the largest observed error and the tolerance
it was held to.
"""

from dataclasses import dataclass

import numpy as np

from . import measures as ms
from .oracle import (
    RingSpec,
    ed_correlators,
    gmqd_bruteforce,
    min_bruteforce,
    random_state,
    random_xstate,
)
from .qstate import bloch_decompose, validate_state
from .xymodel import ModelParams, correlators, magnetization, reduced_state

ALL_KINDS = list(ms.MeasureKind)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    error: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.error <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.suite}/{self.name}: error {self.error:.3e} "
                f"(tolerance {self.tolerance:.1e})")


def bell_states():
    s = 1 / np.sqrt(2)
    kets = [
        np.array([s, 0, 0, s]),
        np.array([s, 0, 0, -s]),
        np.array([0, s, s, 0]),
        np.array([0, s, -s, 0]),
    ]
    return [validate_state(np.outer(k, k.conj())) for k in kets]


def suite_measures(rng, n_product=50, **_):
    err_bell = max(abs(ms.evaluate(k, b) - 1.0) for b in bell_states() for k in ALL_KINDS)
    err_prod = max(
        ms.evaluate(k, random_state("product", rng)) for _ in range(n_product) for k in ALL_KINDS
    )
    yield Check("measures", "bell_states_equal_one", err_bell, 1e-10)
    yield Check("measures", "product_states_vanish", err_prod, 1e-10)


def suite_ordering(rng, n_states=500, **_):
    worst_lo, worst_hi = 0.0, 0.0
    for _ in range(n_states):
        b = bloch_decompose(random_state("general", rng))
        q, d, m = ms.omqc(b), ms.gmqd_closed(b), ms.min_closed(b)
        worst_lo = max(worst_lo, q - d)
        worst_hi = max(worst_hi, d - m)
    yield Check("ordering", "omqc_le_gmqd", max(worst_lo, 0.0), 1e-10)
    yield Check("ordering", "gmqd_le_min", max(worst_hi, 0.0), 1e-10)


def suite_fastpath(rng, n_states=500, **_):
    err_min, err_c = 0.0, 0.0
    count = 0
    while count < n_states:
        s = random_xstate(rng)
        if abs(s.bloch_z) <= ms.BLOCH_ZERO:
            continue
        count += 1
        full = s.to_state()
        err_min = max(err_min, abs(ms.min_xstate(s) - ms.min_closed(bloch_decompose(full))))
        err_c = max(err_c, abs(ms.concurrence_xstate(s) - ms.concurrence_general(full)))
    yield Check("fastpath", "min_xstate_vs_closed", err_min, 1e-12)
    yield Check("fastpath", "concurrence_xstate_vs_general", err_c, 1e-12)


def suite_bruteforce(rng, n_states=100, n_dirs=2000, **_):
    err_min, err_g = 0.0, 0.0
    for _ in range(n_states):
        rho = random_state("general", rng)
        b = bloch_decompose(rho)
        err_min = max(err_min, abs(ms.min_closed(b) - min_bruteforce(rho, n_dirs)))
        err_g = max(err_g, abs(ms.gmqd_closed(b) - gmqd_bruteforce(rho, n_dirs)))
    yield Check("bruteforce", "min_closed_vs_search", err_min, 2e-3)
    yield Check("bruteforce", "gmqd_closed_vs_search", err_g, 2e-3)


def suite_analytics(rng, **_):
    err_m = max(
        abs(magnetization(ModelParams(0.5, 0.0, kT)) + np.tanh(1 / (2 * kT))) for kT in (0.1, 0.5, 1.0)
    )
    err_zero = max(
        ms.evaluate(k, reduced_state(ModelParams(g, 0.0, kT), r))
        for g in (0.001, 0.5, 1.0)
        for kT in (0.0, 0.5)
        for r in range(1, 6)
        for k in ALL_KINDS
    )
    yield Check("analytics", "magnetization_zero_coupling", err_m, 1e-10)
    yield Check("analytics", "measures_vanish_zero_coupling", err_zero, 1e-10)


def suite_ed(rng, ring_size=10, **_):
    worst = 0.0
    for g in (0.5, 1.0):
        for lam in (0.5, 1.5):
            for kT in (0.5, 1.0):
                p = ModelParams(g, lam, kT)
                for r in (1, 2):
                    e = ed_correlators(RingSpec(ring_size, p), r)
                    c = correlators(p, r)
                    worst = max(
                        worst,
                        abs(abs(e["mz"]) - abs(c.mz)),
                        abs(e["xx"] - c.xx),
                        abs(e["yy"] - c.yy),
                        abs(e["zz"] - c.zz),
                    )
    yield Check("ed", f"ring{ring_size}_vs_integrals", worst, 2e-2)


SUITES = {
    "measures": suite_measures,
    "ordering": suite_ordering,
    "fastpath": suite_fastpath,
    "bruteforce": suite_bruteforce,
    "analytics": suite_analytics,
    "ed": suite_ed,
}


def run(only=None, seed=0, tol_scale=1.0, **options):
    """Run the selected suites; returns the list of checks with scaled tolerances."""
    names = list(SUITES) if not only else list(only)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; available: {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    checks = []
    for name in names:
        for c in SUITES[name](rng, **options):
            checks.append(Check(c.suite, c.name, c.error, c.tolerance * tol_scale))
    return checks
