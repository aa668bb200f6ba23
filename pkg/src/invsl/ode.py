"""Cauchy problems for the regularized quasi-derivative system.

The stored antiderivative is piecewise linear, so the potential q = sigma' is
constant on every grid cell and y'' = (s_k - lambda) y holds exactly inside
cell k.  The production path therefore propagates (y, y') with the exact
constant-coefficient 2x2 transfer matrix per cell; cost is independent of
|lambda| and the Lagrange identity holds to rounding.

A classical RK4 path over the same piecewise-linear sigma is kept as an
independent cross-check (`method="rk4"`); it converges at order 4 to the exact
propagator as the per-cell substep count grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StepFailure
from .trig import cos_sqrt, dsinc_sqrt, sinc_sqrt
from .types import SigmaFunction, branch_sqrt


@dataclass(frozen=True)
class Trajectory:
    """Samples of (y, y^{[1]}) along the integration interval."""

    x: np.ndarray
    y: np.ndarray
    yq: np.ndarray
    lam: complex
    direction: str = "forward"

    @property
    def end(self):
        return self.y[-1], self.yq[-1]


def _propagate_exact(sigma: SigmaFunction, lams, y0, v0, record=False, dlam=False,
                     dy0=0.0, dv0=0.0):
    """Exact cell-by-cell propagation of (y, y') for a batch of lambda values.

    `v0` is y'(0) = y^{[1]}(0) + sigma(0) y(0); conversion back to the
    quasi-derivative is the caller's job.  `dy0`/`dv0` seed the
    lambda-derivative state for lambda-dependent initial conditions.
    """
    lam = np.atleast_1d(np.asarray(lams, dtype=complex))
    h = sigma.dx
    slopes = np.diff(sigma.samples) / h

    y = np.broadcast_to(np.asarray(y0, complex), lam.shape).astype(complex)
    v = np.broadcast_to(np.asarray(v0, complex), lam.shape).astype(complex)
    dy = np.broadcast_to(np.asarray(dy0, complex), lam.shape).astype(complex)
    dv = np.broadcast_to(np.asarray(dv0, complex), lam.shape).astype(complex)

    if record:
        ys = np.empty((sigma.m + 1,) + lam.shape, dtype=complex)
        vs = np.empty_like(ys)
        dys = np.empty_like(ys) if dlam else None
        dvs = np.empty_like(ys) if dlam else None
        ys[0], vs[0] = y, v
        if dlam:
            dys[0], dvs[0] = dy, dv

    h2 = h * h
    for k in range(sigma.m):
        mu2 = lam - slopes[k]
        z2 = mu2 * h2
        c = cos_sqrt(z2)
        sn = h * sinc_sqrt(z2)
        y_new = c * y + sn * v
        v_new = -mu2 * sn * y + c * v
        if dlam:
            dc = -0.5 * h * sn
            dsn = h * h2 * dsinc_sqrt(z2)
            dy_new = dc * y + dsn * v + c * dy + sn * dv
            dv_new = (-sn - mu2 * dsn) * y - mu2 * sn * dy + dc * v + c * dv
            dy, dv = dy_new, dv_new
        y, v = y_new, v_new
        if record:
            ys[k + 1], vs[k + 1] = y, v
            if dlam:
                dys[k + 1], dvs[k + 1] = dy, dv

    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(v))):
        raise StepFailure("propagation produced non-finite values; lambda or sigma out of range")

    if record:
        out = {"y": ys, "v": vs}
        if dlam:
            out.update(dy=dys, dv=dvs)
        return out
    out = {"y": y, "v": v}
    if dlam:
        out.update(dy=dy, dv=dv)
    return out


def _substeps(lam, h, refine):
    rho_mag = float(np.max(np.abs(branch_sqrt(np.atleast_1d(lam)))))
    return max(1, int(np.ceil(rho_mag * h / 0.02))) * max(1, int(refine))


def _propagate_rk4(sigma: SigmaFunction, lam, y0, yq0, refine=1, record=False):
    """RK4 on the first-order quasi-derivative system with linearly interpolated sigma."""
    lam = complex(lam)
    h = sigma.dx
    sig = sigma.samples
    slopes = np.diff(sig) / h
    nsub = _substeps(lam, h, refine)
    hs = h / nsub

    def rhs(sig_x, y, yq):
        return yq + sig_x * y, -sig_x * yq - (sig_x * sig_x + lam) * y

    y, yq = complex(y0), complex(yq0)
    if record:
        ys = np.empty(sigma.m + 1, dtype=complex)
        yqs = np.empty_like(ys)
        ys[0], yqs[0] = y, yq
    for k in range(sigma.m):
        for j in range(nsub):
            s0 = sig[k] + slopes[k] * (j * hs)
            sh = sig[k] + slopes[k] * ((j + 0.5) * hs)
            s1 = sig[k] + slopes[k] * ((j + 1) * hs)
            k1 = rhs(s0, y, yq)
            k2 = rhs(sh, y + 0.5 * hs * k1[0], yq + 0.5 * hs * k1[1])
            k3 = rhs(sh, y + 0.5 * hs * k2[0], yq + 0.5 * hs * k2[1])
            k4 = rhs(s1, y + hs * k3[0], yq + hs * k3[1])
            y = y + hs / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            yq = yq + hs / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if record:
            ys[k + 1], yqs[k + 1] = y, yq
    if not (np.isfinite(y) and np.isfinite(yq)):
        raise StepFailure("RK4 propagation produced non-finite values")
    if record:
        return {"y": ys, "yq": yqs}
    return {"y": y, "yq": yq}


def solve_cauchy(sigma: SigmaFunction, lam, y0, yq0, direction="forward",
                 method="exact", refine=1) -> Trajectory:
    """Solve the Cauchy problem for one lambda and return the node samples.

    Forward starts from x = 0, backward from x = X; backward integration is
    carried out as forward integration of the reflected system.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    if direction == "backward":
        refl = sigma.reflected()
        traj = solve_cauchy(refl, lam, y0, -np.asarray(yq0, complex), "forward",
                            method=method, refine=refine)
        return Trajectory(x=sigma.nodes, y=traj.y[::-1].copy(), yq=-traj.yq[::-1].copy(),
                          lam=complex(lam), direction="backward")

    if method == "exact":
        v0 = np.asarray(yq0, complex) + sigma.samples[0] * np.asarray(y0, complex)
        out = _propagate_exact(sigma, [lam], y0, v0, record=True)
        y = out["y"][:, 0]
        yq = out["v"][:, 0] - sigma.samples * y
    elif method == "rk4":
        out = _propagate_rk4(sigma, lam, y0, yq0, refine=refine, record=True)
        y, yq = out["y"], out["yq"]
    else:
        raise ValueError(f"unknown method {method!r}")
    return Trajectory(x=sigma.nodes, y=y, yq=yq, lam=complex(lam), direction="forward")


def fundamental_pair(sigma: SigmaFunction, lam, method="exact", refine=1):
    """Trajectories S (y(0)=0, y^{[1]}(0)=1) and C (y(0)=1, y^{[1]}(0)=0)."""
    s = solve_cauchy(sigma, lam, 0.0, 1.0, method=method, refine=refine)
    c = solve_cauchy(sigma, lam, 1.0, 0.0, method=method, refine=refine)
    return s, c


def lambda_derivative(sigma: SigmaFunction, lam, which="S") -> Trajectory:
    """Samples of (d/dlambda y, d/dlambda y^{[1]}) for the fundamental solution `which`."""
    if which not in ("S", "C"):
        raise ValueError("which must be 'S' or 'C'")
    y0, yq0 = (0.0, 1.0) if which == "S" else (1.0, 0.0)
    v0 = yq0 + sigma.samples[0] * y0
    out = _propagate_exact(sigma, [lam], y0, v0, record=True, dlam=True)
    y = out["y"][:, 0]
    dy = out["dy"][:, 0]
    dyq = out["dv"][:, 0] - sigma.samples * dy
    return Trajectory(x=sigma.nodes, y=dy, yq=dyq, lam=complex(lam), direction="forward")


def endpoint_data(sigma: SigmaFunction, lams, derivative=False) -> dict:
    """Endpoint values of both fundamental solutions for a batch of lambdas.

    Returns S, S1, C, C1 at x = X (value and quasi-derivative), plus their
    lambda-derivatives when `derivative` is set.  This is the workhorse used
    by the characteristic-function layer.
    """
    lam = np.atleast_1d(np.asarray(lams, dtype=complex))
    sig0 = sigma.samples[0]
    sig_end = sigma.samples[-1]
    out = {}
    for name, (y0, yq0) in (("S", (0.0, 1.0)), ("C", (1.0, 0.0))):
        v0 = yq0 + sig0 * y0
        res = _propagate_exact(sigma, lam, y0, v0, record=False, dlam=derivative)
        out[name] = res["y"]
        out[name + "1"] = res["v"] - sig_end * res["y"]
        if derivative:
            out["d" + name] = res["dy"]
            out["d" + name + "1"] = res["dv"] - sig_end * res["dy"]
    return out
