"""Half-inverse driver: one full spectrum on (0, 2pi), the right half known.

The known right half (potential antiderivative plus its boundary pair) is
folded into an entire pair (f1, f2) by backward integration to the midpoint;
the remaining task is the standard subspectrum reconstruction of the left-half
Cauchy data.  The exclusion rule says the first (r - p)/2 eigenvalues are
redundant; dropping more loses uniqueness, which the rank evidence reports.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonUniqueWarning, ParityMismatch, RootLoss
from .forward import find_eigenvalues, make_delta
from .moments import build_moment_system
from .ode import _propagate_exact
from .reconstruct import (
    ReconstructionResult,
    completeness_ratio,
    reconstruct,
)
from .types import (
    BoundaryPolyPair,
    EntirePair,
    SigmaFunction,
    Subspectrum,
    validate_rp,
)


@dataclass(frozen=True)
class TwoSidedProblem:
    """Problem on (0, 2pi): polynomial pairs at both ends, full antiderivative."""

    sigma_full: SigmaFunction
    left_pair: BoundaryPolyPair
    right_pair: BoundaryPolyPair

    def __post_init__(self):
        if abs(self.sigma_full.interval_length - 2 * np.pi) > 1e-12:
            raise ValueError("two-sided problems live on [0, 2*pi]")
        if self.sigma_full.m % 2:
            raise ValueError("need an even cell count to split at the midpoint")
        validate_rp(self.left_pair)
        validate_rp(self.right_pair)

    @property
    def p(self) -> int:
        return self.left_pair.p

    @property
    def r(self) -> int:
        return self.right_pair.p

    def halves(self):
        return self.sigma_full.halves()

    def require_odd(self):
        if self.p % 2 == 0 or self.r % 2 == 0:
            raise ParityMismatch("the half-inverse driver ships for odd boundary degrees only")
        return self


def psi_mid(sigma_right: SigmaFunction, right_pair: BoundaryPolyPair, lam,
            derivative: bool = False):
    """Backward solution at the midpoint.

    `sigma_right` holds sigma(pi + s) for s in [0, pi].  The solution psi is
    pinned at the right end by (psi, psi^{[1]})(2pi) = (r1, -r2) and integrated
    back to x = pi as a forward run of the reflected system.
    """
    if abs(sigma_right.interval_length - np.pi) > 1e-12:
        raise ValueError("right-half antiderivative must live on an interval of length pi")
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    refl = sigma_right.reflected()
    r1 = right_pair.p1(lam_arr)
    r2 = right_pair.p2(lam_arr)
    v0 = r2 + refl.samples[0] * r1
    if derivative:
        dr1 = right_pair.dp1(lam_arr)
        dr2 = right_pair.dp2(lam_arr)
        out = _propagate_exact(refl, lam_arr, r1, v0, dlam=True,
                               dy0=dr1, dv0=dr2 + refl.samples[0] * dr1)
    else:
        out = _propagate_exact(refl, lam_arr, r1, v0)
    sig_end = refl.samples[-1]
    psi = out["y"]
    psi_q = -(out["v"] - sig_end * out["y"])
    if not derivative:
        return psi, psi_q
    dpsi = out["dy"]
    dpsi_q = -(out["dv"] - sig_end * out["dy"])
    return psi, psi_q, dpsi, dpsi_q


def hl_entire_pair(sigma_right: SigmaFunction, right_pair: BoundaryPolyPair) -> EntirePair:
    """Entire pair encoding the known right half: f1 = -psi(mid), f2 = psi^{[1]}(mid)."""
    r = right_pair.p

    def joint(lam):
        psi, psi_q = psi_mid(sigma_right, right_pair, lam)
        return -psi, psi_q

    def djoint(lam):
        _, _, dpsi, dpsi_q = psi_mid(sigma_right, right_pair, lam, derivative=True)
        return -dpsi, dpsi_q

    return EntirePair(
        f1=lambda lam: joint(lam)[0], f2=lambda lam: joint(lam)[1],
        df1=lambda lam: djoint(lam)[0], df2=lambda lam: djoint(lam)[1],
        joint=joint, djoint=djoint, alpha=float(r - 1),
        descriptor={"kind": "hl_right_half", "r": r},
    )


def hl_window(count: int, p: int, r: int, margin: float = 2.0):
    """Real search window covering the first `count` eigenvalues."""
    top = (0.5 * count - 0.25 * (p + r) + margin) ** 2
    return (-max(4.0, margin**2), float(top))


def hl_spectrum(problem: TwoSidedProblem, count: int,
                window=None, scan_step: float = 0.02) -> Subspectrum:
    """First `count` eigenvalues of the two-sided problem."""
    problem.require_odd()
    sigma_left, sigma_right = problem.halves()
    f = hl_entire_pair(sigma_right, problem.right_pair)
    delta, ddelta = make_delta(sigma_left, problem.left_pair, f)
    if window is None:
        window = hl_window(count, problem.p, problem.r)
    spec = find_eigenvalues(delta, window, ddelta=ddelta, scan_step=scan_step)
    if len(spec) < count:
        raise RootLoss(f"found {len(spec)} eigenvalues in {window}, need {count}")
    return spec.take(count)


def hl_reconstruct(sigma_right: SigmaFunction, right_pair: BoundaryPolyPair,
                   p: int, spectrum: Subspectrum, drop: int, grid,
                   reg: float = 0.0, n_modes: Optional[int] = None,
                   rank_evidence: bool = True) -> ReconstructionResult:
    """Left-half Cauchy data from the spectrum with the first `drop` values excluded.

    `drop` up to (r - p)/2 keeps uniqueness; beyond that the report's
    completeness evidence degrades and NonUniqueWarning is emitted by the
    underlying solve.
    """
    if p % 2 == 0 or right_pair.p % 2 == 0:
        raise ParityMismatch("the half-inverse driver ships for odd boundary degrees only")
    r = right_pair.p
    allowed = (r - p) // 2
    f = hl_entire_pair(sigma_right, right_pair)
    used = spectrum.drop_first(drop)
    result = reconstruct(p, f, used, grid, reg=reg, n_modes=n_modes)
    result.report["drop"] = drop
    result.report["drop_allowed"] = allowed
    if rank_evidence:
        system = build_moment_system(used, f, p, grid)
        comp = completeness_ratio(system)
        result.report["completeness"] = comp
        if comp["gram_ratio"] <= 1e-8:
            msg = (f"completeness evidence collapsed (gram ratio {comp['gram_ratio']:.2e}); "
                   "the subspectrum no longer determines the data")
            result.report["non_unique"] = True
            result.report["warnings"].append(msg)
            warnings.warn(msg, category=NonUniqueWarning, stacklevel=2)
    if drop > allowed:
        msg = f"dropping {drop} > (r-p)/2 = {allowed} eigenvalues loses uniqueness"
        result.report["non_unique"] = True
        result.report["warnings"].append(msg)
        warnings.warn(msg, category=NonUniqueWarning, stacklevel=2)
    return result
