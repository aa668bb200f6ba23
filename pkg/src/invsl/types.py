"""Domain data model: potentials, boundary pairs, subspectra, product-space vectors.

All types are immutable value objects; construction validates the invariants
that are cheap to check, while `validate_rp` performs the full boundary-pair
diagnostics (normalization and coprimality).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    CommonRoot,
    DimensionMismatch,
    DuplicateEigenvalue,
    NormalizationViolation,
)

MIN_GRID = 16


def branch_sqrt(lam):
    """Square root with arg(rho) in [-pi/2, pi/2).

    Principal sqrt except on the negative real axis, where the branch with
    negative imaginary part is taken.
    """
    lam = np.asarray(lam, dtype=complex)
    z = np.sqrt(lam)
    flip = (z.real < 0) | ((z.real == 0) & (z.imag > 0))
    return np.where(flip, -z, z)


@dataclass(frozen=True)
class SigmaFunction:
    """Antiderivative of the potential, sampled on a uniform grid over [0, X].

    The stored object *is* the piecewise-linear interpolant of the samples, so
    the potential q = sigma' is piecewise constant and the Cauchy problems can
    be propagated exactly cell by cell.
    """

    samples: np.ndarray
    interval_length: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < MIN_GRID + 1:
            raise ValueError(f"need at least {MIN_GRID + 1} uniform samples, got {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("sigma samples must be finite")
        if not (self.interval_length > 0):
            raise ValueError("interval_length must be positive")

    @property
    def m(self) -> int:
        return self.samples.size - 1

    @property
    def dx(self) -> float:
        return self.interval_length / self.m

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.interval_length, self.m + 1)

    @property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.m + 1, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    def norm_l2(self) -> float:
        return float(np.sqrt(np.sum(self.trapezoid_weights * np.abs(self.samples) ** 2).real))

    def reflected(self) -> "SigmaFunction":
        """Antiderivative of the reflected potential: -sigma(X - x)."""
        return SigmaFunction(-self.samples[::-1].copy(), self.interval_length)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.samples.imag) <= tol))

    @classmethod
    def zero(cls, interval_length: float = np.pi, m: int = 128) -> "SigmaFunction":
        return cls(np.zeros(m + 1, dtype=complex), interval_length)

    @classmethod
    def from_callable(cls, fn: Callable, interval_length: float = np.pi, m: int = 128) -> "SigmaFunction":
        x = np.linspace(0.0, interval_length, m + 1)
        return cls(np.asarray(fn(x), dtype=complex) + np.zeros(m + 1, complex), interval_length)

    def halves(self):
        """Split sigma on [0, X] into halves on [0, X/2] (requires even grid)."""
        if self.m % 2:
            raise ValueError("halving requires an even number of cells")
        k = self.m // 2
        half = self.interval_length / 2
        return (SigmaFunction(self.samples[: k + 1].copy(), half),
                SigmaFunction(self.samples[k:].copy(), half))


def _polyval(coeffs: np.ndarray, lam):
    """Evaluate sum coeffs[n] * lam^n (ascending order)."""
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros_like(lam)
    for c in coeffs[::-1]:
        out = out * lam + c
    return out


@dataclass(frozen=True)
class BoundaryPolyPair:
    """Coefficient pair (p1, p2), ascending order, stored in normalized shape.

    Odd p: len(a) == len(b) == N1+1 with a[-1] == 1 and p = 2*N1 + 1.
    Even p: len(b) == len(a) + 1 with b[-1] == 1 and p = 2*N2.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=complex))
        b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.size == 0 or b.size == 0:
            raise ValueError("coefficient arrays must be nonempty")

    @property
    def parity(self) -> str:
        if self.a.size == self.b.size:
            return "odd"
        if self.b.size == self.a.size + 1:
            return "even"
        raise NormalizationViolation(
            f"coefficient lengths {self.a.size}/{self.b.size} do not match either parity branch"
        )

    @property
    def p(self) -> int:
        if self.parity == "odd":
            return 2 * (self.a.size - 1) + 1
        return 2 * (self.b.size - 1)

    @property
    def n1(self) -> int:
        return self.a.size - 1

    @property
    def n2(self) -> int:
        return self.b.size - 1

    def p1(self, lam):
        return _polyval(self.a, lam)

    def p2(self, lam):
        return _polyval(self.b, lam)

    def dp1(self, lam):
        n = np.arange(1, self.a.size)
        return _polyval(self.a[1:] * n, lam)

    def dp2(self, lam):
        n = np.arange(1, self.b.size)
        return _polyval(self.b[1:] * n, lam)


@dataclass(frozen=True)
class RpDiagnostics:
    p: int
    parity: str
    normalized: bool
    coprime: bool
    min_p2_at_roots: Optional[float]


def validate_rp(pair: BoundaryPolyPair) -> RpDiagnostics:
    """Check the normalization and coprimality of a boundary pair.

    Raises NormalizationViolation or CommonRoot on failure; returns the
    diagnostics record on success.  The input is never mutated.
    """
    parity = pair.parity  # raises NormalizationViolation for impossible shapes
    if parity == "odd":
        lead = pair.a[-1]
    else:
        lead = pair.b[-1]
    if abs(lead - 1.0) > 1e-12:
        raise NormalizationViolation(
            f"leading coefficient must be 1 for {parity} p={pair.p}, got {lead}"
        )

    min_val: Optional[float] = None
    a, b = pair.a, pair.b
    deg_a = _true_degree(a)
    deg_b = _true_degree(b)
    if deg_a < 0:
        raise CommonRoot("p1 is identically zero")
    if deg_a >= 1:
        roots = np.roots(a[: deg_a + 1][::-1])
        vals = np.abs(_polyval(b, roots))
        tol = 1e-8 * (1.0 + np.abs(roots) ** max(deg_b, 0))
        if np.any(vals <= tol):
            raise CommonRoot(f"p2 vanishes at a root of p1 (min |p2(root)| = {vals.min():.3e})")
        min_val = float(vals.min())
    return RpDiagnostics(p=pair.p, parity=parity, normalized=True, coprime=True,
                         min_p2_at_roots=min_val)


def _true_degree(coeffs: np.ndarray) -> int:
    nz = np.nonzero(np.abs(coeffs) > 0)[0]
    return int(nz[-1]) if nz.size else -1


@dataclass(frozen=True)
class EntirePair:
    """Evaluable pair (f1, f2) of entire functions of lambda.

    `df1`/`df2` are optional lambda-derivatives (used by Newton refinement);
    `alpha`, `bounds` are optional growth metadata; `descriptor` is a
    serializable description of how the pair was built.
    """

    f1: Callable
    f2: Callable
    df1: Optional[Callable] = None
    df2: Optional[Callable] = None
    alpha: Optional[float] = None
    bounds: Optional[tuple] = None
    descriptor: Optional[dict] = None
    joint: Optional[Callable] = None      # lam -> (f1, f2) in one evaluation
    djoint: Optional[Callable] = None     # lam -> (df1, df2)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if self.joint is not None:
            v1, v2 = self.joint(lam)
            return (np.asarray(v1, dtype=complex) + np.zeros_like(lam),
                    np.asarray(v2, dtype=complex) + np.zeros_like(lam))
        return (np.asarray(self.f1(lam), dtype=complex) + np.zeros_like(lam),
                np.asarray(self.f2(lam), dtype=complex) + np.zeros_like(lam))

    def derivative(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if self.djoint is not None:
            v1, v2 = self.djoint(lam)
            return (np.asarray(v1, dtype=complex) + np.zeros_like(lam),
                    np.asarray(v2, dtype=complex) + np.zeros_like(lam))
        if self.df1 is None or self.df2 is None:
            return None
        return (np.asarray(self.df1(lam), dtype=complex) + np.zeros_like(lam),
                np.asarray(self.df2(lam), dtype=complex) + np.zeros_like(lam))

    def no_common_zero(self, lams, tol: float = 1e-9) -> bool:
        f1, f2 = self(lams)
        scale = 1.0 + np.abs(f1) + np.abs(f2)
        return bool(np.all((np.abs(f1) > tol * scale) | (np.abs(f2) > tol * scale)))

    @classmethod
    def constant(cls, c1, c2) -> "EntirePair":
        return cls(
            f1=lambda lam, _c=complex(c1): np.full_like(np.asarray(lam, complex), _c),
            f2=lambda lam, _c=complex(c2): np.full_like(np.asarray(lam, complex), _c),
            df1=lambda lam: np.zeros_like(np.asarray(lam, complex)),
            df2=lambda lam: np.zeros_like(np.asarray(lam, complex)),
            descriptor={"kind": "constant", "f1": [complex(c1).real, complex(c1).imag],
                        "f2": [complex(c2).real, complex(c2).imag]},
        )


@dataclass(frozen=True)
class SubspectrumDiagnostics:
    simple: bool
    min_gap: float
    min_abs_lambda: float
    max_im_rho: float
    sum_inv_rho_sq: float


@dataclass(frozen=True)
class Subspectrum:
    """Finite ordered list of distinct eigenvalues with derived rho values."""

    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.atleast_1d(np.array(self.lambdas, dtype=complex))
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @property
    def rhos(self) -> np.ndarray:
        return branch_sqrt(self.lambdas)

    def __len__(self) -> int:
        return self.lambdas.size

    def drop_first(self, k: int) -> "Subspectrum":
        return Subspectrum(self.lambdas[k:].copy())

    def take(self, n: int) -> "Subspectrum":
        return Subspectrum(self.lambdas[:n].copy())

    def diagnostics(self, simple_tol: float = 1e-8) -> SubspectrumDiagnostics:
        lam = self.lambdas
        if lam.size >= 2:
            diff = np.abs(lam[:, None] - lam[None, :])
            np.fill_diagonal(diff, np.inf)
            min_gap = float(diff.min())
        else:
            min_gap = np.inf
        rho = self.rhos
        nz = np.abs(rho) > 0
        return SubspectrumDiagnostics(
            simple=bool(min_gap > simple_tol),
            min_gap=min_gap,
            min_abs_lambda=float(np.abs(lam).min()) if lam.size else np.inf,
            max_im_rho=float(np.abs(rho.imag).max()) if lam.size else 0.0,
            sum_inv_rho_sq=float(np.sum(1.0 / np.abs(rho[nz]) ** 2)),
        )

    def require_simple(self, tol: float = 1e-8) -> "Subspectrum":
        if not self.diagnostics(tol).simple:
            raise DuplicateEigenvalue("subspectrum contains coinciding eigenvalues")
        return self


@dataclass(frozen=True)
class HpVector:
    """Element [H1, H2, h1..hp] of L2(0,pi) + L2(0,pi) + C^p on a uniform grid."""

    h1: np.ndarray
    h2: np.ndarray
    scalars: np.ndarray
    meta: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        h1 = np.atleast_1d(np.array(self.h1, dtype=complex))
        h2 = np.atleast_1d(np.array(self.h2, dtype=complex))
        sc = np.atleast_1d(np.array(self.scalars, dtype=complex))
        if h1.shape != h2.shape:
            raise DimensionMismatch("H1 and H2 must share a grid")
        for arr in (h1, h2, sc):
            arr.setflags(write=False)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "scalars", sc)

    @property
    def grid_size(self) -> int:
        return self.h1.size

    @property
    def p(self) -> int:
        return self.scalars.size

    def weights(self) -> np.ndarray:
        m = self.grid_size - 1
        w = np.full(self.grid_size, np.pi / m)
        w[0] = w[-1] = 0.5 * np.pi / m
        return w

    def norm(self) -> float:
        return float(np.sqrt(hp_inner(self, self).real))

    def __add__(self, other: "HpVector") -> "HpVector":
        _check_compatible(self, other)
        return HpVector(self.h1 + other.h1, self.h2 + other.h2, self.scalars + other.scalars)

    def __sub__(self, other: "HpVector") -> "HpVector":
        _check_compatible(self, other)
        return HpVector(self.h1 - other.h1, self.h2 - other.h2, self.scalars - other.scalars)

    def scaled(self, c) -> "HpVector":
        return HpVector(c * self.h1, c * self.h2, c * self.scalars)

    @classmethod
    def zero(cls, grid_size: int, p: int) -> "HpVector":
        return cls(np.zeros(grid_size, complex), np.zeros(grid_size, complex), np.zeros(p, complex))


def _check_compatible(g: HpVector, h: HpVector):
    if g.grid_size != h.grid_size or g.p != h.p:
        raise DimensionMismatch(
            f"incompatible elements: grids {g.grid_size}/{h.grid_size}, p {g.p}/{h.p}"
        )


def hp_inner(g: HpVector, h: HpVector) -> complex:
    """Scalar product on L2+L2+C^p, conjugate-linear in the first argument.

    Trapezoid weights on the shared uniform grid over [0, pi].
    """
    _check_compatible(g, h)
    w = g.weights()
    integral = np.sum(w * (np.conj(g.h1) * h.h1 + np.conj(g.h2) * h.h2))
    finite = np.sum(np.conj(g.scalars) * h.scalars)
    return complex(integral + finite)


@dataclass(frozen=True)
class CauchyData:
    """Generalized Cauchy data: two L2(0, pi) kernels plus p complex constants."""

    j: np.ndarray
    g: np.ndarray
    a: np.ndarray
    series: Optional[dict] = field(default=None, compare=False)
    meta: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        j = np.atleast_1d(np.array(self.j, dtype=complex))
        g = np.atleast_1d(np.array(self.g, dtype=complex))
        a = np.atleast_1d(np.array(self.a, dtype=complex))
        if j.shape != g.shape:
            raise DimensionMismatch("kernels must share a grid")
        for arr in (j, g, a):
            arr.setflags(write=False)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "a", a)

    @property
    def p(self) -> int:
        return self.a.size
