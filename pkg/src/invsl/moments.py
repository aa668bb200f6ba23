"""Moment-system ingredients: the vector function v(t, lambda), the scalar
w(lambda), per-eigenvalue sequences, identity diagnostics, and Riesz-basis
condition estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ParityMismatch
from .forward import char_delta
from .trig import overlap_cos_cos, overlap_sin_sin, sinc
from .types import (
    BoundaryPolyPair,
    CauchyData,
    EntirePair,
    HpVector,
    SigmaFunction,
    Subspectrum,
    branch_sqrt,
    hp_inner,
)


def _as_grid(grid) -> np.ndarray:
    if np.isscalar(grid):
        return np.linspace(0.0, np.pi, int(grid) + 1)
    return np.asarray(grid, dtype=float)


def _check_p(p: int):
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ParityMismatch(f"boundary degree p must be a positive integer, got {p!r}")


def build_v(lam, f: EntirePair, p: int, grid, f_values=None) -> HpVector:
    """Moment row v(., lambda) in L2+L2+C^p.

    Odd p:  [f1 rho^p sin(rho t), f2 rho^(p-1) cos(rho t),
             f1, f2, f1 rho^2, f2 rho^2, ..., f1 rho^(p-3), f2 rho^(p-3), f1 rho^(p-1)].
    Even p: [f1 rho^p cos(rho t), f2 rho^(p-1) sin(rho t),
             f1, f2, ..., f1 rho^(p-2), f2 rho^(p-2)].
    All entries are assembled from even functions of rho, so they are entire
    in lambda.  `f_values` short-circuits the evaluation of `f` at `lam`.
    """
    _check_p(p)
    t = _as_grid(grid)
    lam = complex(lam)
    rho = complex(branch_sqrt(lam))
    if f_values is None:
        f_values = f(np.array([lam]))
    f1, f2 = (complex(np.asarray(v).ravel()[0]) for v in f_values)
    sin_over_rho = t * np.asarray(sinc(rho * t))
    cos_t = np.cos(rho * t).astype(complex)
    slots = []
    if p % 2:
        n1 = (p - 1) // 2
        h1 = f1 * lam ** (n1 + 1) * sin_over_rho
        h2 = f2 * lam**n1 * cos_t
        for k in range(n1):
            slots.extend([f1 * lam**k, f2 * lam**k])
        slots.append(f1 * lam**n1)
    else:
        n2 = p // 2
        h1 = f1 * lam**n2 * cos_t
        h2 = f2 * lam**n2 * sin_over_rho
        for k in range(n2):
            slots.extend([f1 * lam**k, f2 * lam**k])
    return HpVector(h1, h2, np.array(slots, dtype=complex))


def build_w(lam, f: EntirePair, p: int, f_values=None) -> complex:
    """Right-hand side w(lambda) of the moment relation."""
    _check_p(p)
    lam = complex(lam)
    rho = complex(branch_sqrt(lam))
    if f_values is None:
        f_values = f(np.array([lam]))
    f1, f2 = (complex(np.asarray(v).ravel()[0]) for v in f_values)
    sin_pi_over_rho = np.pi * complex(sinc(rho * np.pi))
    cos_pi = complex(np.cos(rho * np.pi))
    if p % 2:
        n1 = (p - 1) // 2
        return f1 * lam ** (n1 + 1) * sin_pi_over_rho - f2 * lam**n1 * cos_pi
    n2 = p // 2
    return f1 * lam**n2 * cos_pi + f2 * lam**n2 * sin_pi_over_rho


def build_g(lam, d0, d1, p: int, grid) -> HpVector:
    """Companion row built from the characteristic functions Delta0/Delta1.

    At an eigenvalue this vector is collinear with v(., lambda); the sign
    pattern pairs +Delta0 with the f1 slots and -Delta1 with the f2 slots.
    Only the odd branch is defined.
    """
    _check_p(p)
    if p % 2 == 0:
        raise ParityMismatch("companion rows are defined for odd p only")
    t = _as_grid(grid)
    lam = complex(lam)
    rho = complex(branch_sqrt(lam))
    d0, d1 = complex(d0), complex(d1)
    n1 = (p - 1) // 2
    h1 = d0 * lam ** (n1 + 1) * (t * np.asarray(sinc(rho * t)))
    h2 = -d1 * lam**n1 * np.cos(rho * t).astype(complex)
    slots = []
    for k in range(n1):
        slots.extend([d0 * lam**k, -d1 * lam**k])
    slots.append(d0 * lam**n1)
    return HpVector(h1, h2, np.array(slots, dtype=complex))


def u_from_cauchy(data: CauchyData) -> HpVector:
    """Pack Cauchy data into the unknown vector (entry-wise conjugation)."""
    return HpVector(np.conj(data.j), np.conj(data.g), np.conj(data.a))


def moment_identity_check(u: HpVector, lam, f: EntirePair,
                          pair: BoundaryPolyPair, sigma: SigmaFunction) -> float:
    """Relative residual of (u, v(., lambda)) = Delta(lambda) + w(lambda)."""
    p = pair.p
    v = build_v(lam, f, p, u.grid_size - 1)
    lhs = hp_inner(u, v)
    delta = complex(np.asarray(char_delta(sigma, pair, f, np.array([lam]))).ravel()[0])
    w = build_w(lam, f, p)
    scale = max(abs(delta), abs(w), abs(lhs), 1.0)
    return abs(lhs - delta - w) / scale


def row_norm_exact(lam, f: EntirePair, p: int, f_values=None) -> float:
    """Continuum norm of v(., lambda) from closed-form trig integrals."""
    lam = complex(lam)
    rho = complex(branch_sqrt(lam))
    if f_values is None:
        f_values = f(np.array([lam]))
    f1, f2 = (complex(np.asarray(v).ravel()[0]) for v in f_values)
    rb = np.conj(rho)
    if abs(rho) > 1e-6:
        int_sin = complex(overlap_sin_sin(rho, rb)) / (rho * rb)
        int_cos = complex(overlap_cos_cos(rho, rb))
    else:
        int_sin = np.pi**3 / 3.0
        int_cos = np.pi
    total = 0.0
    if p % 2:
        n1 = (p - 1) // 2
        total += abs(f1 * lam ** (n1 + 1)) ** 2 * int_sin.real
        total += abs(f2 * lam**n1) ** 2 * int_cos.real
        for k in range(n1):
            total += abs(f1 * lam**k) ** 2 + abs(f2 * lam**k) ** 2
        total += abs(f1 * lam**n1) ** 2
    else:
        n2 = p // 2
        total += abs(f1 * lam**n2) ** 2 * int_cos.real
        total += abs(f2 * lam**n2) ** 2 * int_sin.real
        for k in range(n2):
            total += abs(f1 * lam**k) ** 2 + abs(f2 * lam**k) ** 2
    return float(np.sqrt(total))


@dataclass(frozen=True)
class MomentSystem:
    """Rows v_n = v(., lambda_n), targets w_n, and row norms for a subspectrum."""

    vs: list
    ws: np.ndarray
    norms: np.ndarray
    lambdas: Subspectrum
    parity: str
    p: int
    grid_size: int
    f_values: Optional[tuple] = field(default=None, compare=False)

    def __len__(self):
        return len(self.vs)


def build_moment_system(subspectrum: Subspectrum, f: EntirePair, p: int, grid) -> MomentSystem:
    """Assemble rows and targets for every eigenvalue of a simple subspectrum."""
    _check_p(p)
    subspectrum.require_simple()
    t = _as_grid(grid)
    lams = subspectrum.lambdas
    f1s, f2s = f(lams)
    vs = [build_v(lam, f, p, t, f_values=(f1s[i], f2s[i]))
          for i, lam in enumerate(lams)]
    ws = np.array([build_w(lam, f, p, f_values=(f1s[i], f2s[i]))
                   for i, lam in enumerate(lams)], dtype=complex)
    norms = np.array([row_norm_exact(lam, f, p, f_values=(f1s[i], f2s[i]))
                      for i, lam in enumerate(lams)])
    return MomentSystem(vs=vs, ws=ws, norms=norms, lambdas=subspectrum,
                        parity="odd" if p % 2 else "even", p=p,
                        grid_size=t.size, f_values=(f1s, f2s))


def xi_identity_residual(rhos: Sequence[complex], order: int = 12,
                         panels: Optional[int] = None) -> float:
    """Max residual of the folding identity between sine products on (0, 2pi)
    and two-component products on (0, pi).

    Both sides are evaluated by composite Gauss-Legendre quadrature (panel
    count follows the largest frequency), independently of the closed-form
    overlaps used elsewhere.
    """
    rho = np.atleast_1d(np.asarray(rhos, dtype=complex))
    if panels is None:
        panels = int(max(24, 4 * np.ceil(np.max(np.abs(rho)))))

    def sines_2pi(tvals):
        return np.sin(rho[:, None] * tvals[None, :])

    def xi_parts(tvals):
        s = np.sin(rho[:, None] * tvals[None, :])
        c = np.cos(rho[:, None] * tvals[None, :])
        return s * np.cos(rho[:, None] * np.pi), -c * np.sin(rho[:, None] * np.pi)

    nodes, weights = np.polynomial.legendre.leggauss(order)

    def grid_w(a, b, n_panels):
        edges = np.linspace(a, b, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        x = (mid[:, None] + half * nodes[None, :]).ravel()
        w = (half * np.broadcast_to(weights, (n_panels, order))).ravel()
        return x, w

    x2, w2 = grid_w(0.0, 2 * np.pi, panels)
    f2 = sines_2pi(x2)
    lhs = (np.conj(f2) * w2[None, :]) @ f2.T

    x1, w1 = grid_w(0.0, np.pi, max(panels // 2, 12))
    a_part, b_part = xi_parts(x1)
    rhs = (np.conj(a_part) * w1[None, :]) @ a_part.T + (np.conj(b_part) * w1[None, :]) @ b_part.T

    return float(np.max(np.abs(lhs - 2.0 * rhs)))


@dataclass(frozen=True)
class BasisDiagnostics:
    sizes: tuple
    conds: tuple
    smin: float
    smax: float
    basis_like: bool
    growth_ratio: float


def _gram_normalized(vectors: list) -> np.ndarray:
    n = len(vectors)
    g = np.empty((n, n), dtype=complex)
    norms = [v.norm() for v in vectors]
    for i in range(n):
        for k in range(i, n):
            val = hp_inner(vectors[i], vectors[k]) / max(norms[i] * norms[k], 1e-300)
            g[i, k] = val
            g[k, i] = np.conj(val)
    return g


def _gram_sine_family(rhos: np.ndarray, length: float) -> np.ndarray:
    r = rhos[:, None]
    c = rhos[None, :]
    g = np.asarray(overlap_sin_sin(np.conj(r), c, length))
    norms = np.sqrt(np.abs(np.diag(g)))
    return g / np.maximum(np.outer(norms, norms), 1e-300)


def basis_diagnostics(system: Union[MomentSystem, list, np.ndarray],
                      length: float = 2 * np.pi,
                      cond_threshold: float = 1e3) -> BasisDiagnostics:
    """Condition estimates for the normalized Gram matrix under truncation.

    Accepts a MomentSystem, a list of HpVector rows, or an array of rho values
    (interpreted as the sine family sin(rho_n t) on (0, length)).  Flags the
    family "basis-like" when the full condition number stays below the
    threshold and grows by no more than 20% from the half truncation.
    """
    if isinstance(system, MomentSystem):
        gram = _gram_normalized(system.vs)
    elif isinstance(system, (list, tuple)) and system and isinstance(system[0], HpVector):
        gram = _gram_normalized(list(system))
    else:
        rhos = np.atleast_1d(np.asarray(system, dtype=complex))
        gram = _gram_sine_family(rhos, length)

    n = gram.shape[0]
    if n < 2:
        raise ValueError("need at least two vectors")
    sizes = tuple(sorted({max(2, n // 4), max(2, n // 2), n}))
    conds = []
    smin = smax = None
    for size in sizes:
        s = np.linalg.svd(gram[:size, :size], compute_uv=False)
        conds.append(float(s[0] / s[-1]) if s[-1] > 0 else np.inf)
        if size == n:
            smin, smax = float(s[-1]), float(s[0])
    growth = conds[-1] / conds[-2] if len(conds) >= 2 and conds[-2] > 0 else np.inf
    basis_like = bool(conds[-1] <= cond_threshold and growth <= 1.2)
    return BasisDiagnostics(sizes=sizes, conds=tuple(conds), smin=smin, smax=smax,
                            basis_like=basis_like, growth_ratio=float(growth))
