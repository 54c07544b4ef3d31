"""Constrained Rayleigh minimization for the p-Laplacian on raster domains.

Solves  lambda_{p,q} = min { grad_energy_p(u) : u in the domain, lq_norm(u, q) = 1 }
for p in (1, 2] and subcritical q by lagged-diffusivity inverse iteration:
each outer step freezes the gradient weights, solves one sparse linear
elliptic system, renormalizes, and backtracks to keep the regularized energy
monotone. A halving epsilon schedule grades the p -> 1 degeneracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import ndimage

from .domain_grid import GridDomain, ScalarField, grad_energy_p, lq_norm

__all__ = [
    "SolveParams",
    "SolveResult",
    "minimize_rayleigh",
    "el_residual",
    "lane_emden",
    "rayleigh_quotient",
    "sup_normalized",
    "critical_exponent",
]

_CLAMP_REL = 1e-12  # lower clamp on u, relative to sup u, for singular q < 1


def critical_exponent(p: float, n_dim: int = 2) -> float:
    """Critical embedding exponent p* = N p / (N - p); infinite at p = N."""
    if p >= n_dim:
        return math.inf
    return n_dim * p / (n_dim - p)


@dataclass(frozen=True)
class SolveParams:
    """Tolerances and schedule knobs of the Rayleigh minimizer.

    ``epsilon_start``/``epsilon_min`` default to spacing and 1e-3 * spacing.
    ``max_outer`` caps the total outer (reweighting) iterations. ``seed``
    drives the 1 percent perturbation of the initial bump.
    """

    epsilon_start: Optional[float] = None
    epsilon_min: Optional[float] = None
    tol_lambda: float = 1e-8
    tol_residual: float = 1e-6
    max_outer: int = 2000
    inner_solver_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tol_lambda <= 0.0 or self.tol_residual <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.epsilon_start is not None and self.epsilon_min is not None:
            if self.epsilon_min > self.epsilon_start:
                raise ValueError("epsilon_min must not exceed epsilon_start")


@dataclass(frozen=True)
class SolveResult:
    """Converged minimizer and diagnostics of one (p, q) solve."""

    lam: float
    u: ScalarField
    residual: float
    iterations: int
    converged: bool
    p: float
    q: float

    def to_json_dict(self) -> dict:
        """JSON-ready summary; the field is reported through its norms."""
        return {
            "p": self.p,
            "q": self.q,
            "lambda": self.lam,
            "l1": lq_norm(self.u, 1.0),
            "linf": lq_norm(self.u, math.inf),
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


class _Stencil:
    """Forward-difference divergence-form operator A^T diag(w) A on mask cells."""

    def __init__(self, domain: GridDomain):
        self.h = domain.spacing
        self.mask = domain.inside
        idx = -np.ones(self.mask.shape, dtype=np.int64)
        ii, jj = np.nonzero(self.mask)
        idx[ii, jj] = np.arange(len(ii))
        self.n_unknown = len(ii)
        # forward-difference pairs; the weight of a pair is the weight of the
        # cell whose energy term the difference belongs to
        pairs = []
        for axis in (0, 1):
            if axis == 0:
                a, b = idx[:-1, :].ravel(), idx[1:, :].ravel()
            else:
                a, b = idx[:, :-1].ravel(), idx[:, 1:].ravel()
            live = (a >= 0) | (b >= 0)
            pairs.append((a[live], b[live], np.nonzero(live)[0]))
        self._pairs = pairs
        # static sparsity pattern: diagonal plus live off-diagonal pairs
        rows, cols = [], []
        for a, b, _ in pairs:
            both = (a >= 0) & (b >= 0)
            rows += [a[a >= 0], b[b >= 0], a[both], b[both]]
            cols += [a[a >= 0], b[b >= 0], b[both], a[both]]
        self._rows = np.concatenate(rows)
        self._cols = np.concatenate(cols)

    def assemble(self, w: np.ndarray) -> sp.csc_matrix:
        """Assemble with per-cell weights ``w`` on the full raster."""
        inv_h2 = 1.0 / (self.h * self.h)
        vals = []
        for axis, (a, b, flat) in enumerate(self._pairs):
            if axis == 0:
                wv = w[:-1, :].ravel()[flat] * inv_h2
            else:
                wv = w[:, :-1].ravel()[flat] * inv_h2
            both = (a >= 0) & (b >= 0)
            vals += [wv[a >= 0], wv[b >= 0], -wv[both], -wv[both]]
        return sp.csc_matrix(
            (np.concatenate(vals), (self._rows, self._cols)),
            shape=(self.n_unknown, self.n_unknown),
        )


def _weights(values: np.ndarray, h: float, p: float, eps: float) -> np.ndarray:
    gx = np.zeros_like(values)
    gy = np.zeros_like(values)
    gx[:-1, :] = (values[1:, :] - values[:-1, :]) / h
    gy[:, :-1] = (values[:, 1:] - values[:, :-1]) / h
    return (gx * gx + gy * gy + eps * eps) ** ((p - 2.0) / 2.0)


def _raw_lq(values: np.ndarray, mask: np.ndarray, q: float, h: float) -> float:
    return float((np.abs(values[mask]) ** q).sum() * h * h) ** (1.0 / q)


def _raw_energy(values: np.ndarray, h: float, p: float, eps: float) -> float:
    gx = np.zeros_like(values)
    gy = np.zeros_like(values)
    gx[:-1, :] = (values[1:, :] - values[:-1, :]) / h
    gy[:, :-1] = (values[:, 1:] - values[:, :-1]) / h
    return float(((gx * gx + gy * gy + eps * eps) ** (p / 2.0)).sum()) * h * h


def _clamped_power(values: np.ndarray, mask: np.ndarray, expo: float) -> np.ndarray:
    """u^expo on mask cells with the singular-regime lower clamp."""
    top = float(values.max())
    floor = _CLAMP_REL * top if top > 0.0 else _CLAMP_REL
    return np.maximum(values[mask], floor) ** expo


def _initial_guess(domain: GridDomain, seed: int) -> np.ndarray:
    bump = ndimage.distance_transform_edt(domain.inside, sampling=domain.spacing)
    rng = np.random.default_rng(seed)
    values = bump * (1.0 + 0.01 * rng.standard_normal(domain.inside.shape))
    values[~domain.inside] = 0.0
    return np.abs(values)


def minimize_rayleigh(
    domain: GridDomain,
    p: float,
    q: float,
    params: SolveParams | None = None,
    warm_start: ScalarField | None = None,
    trace: list | None = None,
) -> SolveResult:
    """Minimize the p-energy under the L^q normalization constraint.

    Parameters
    ----------
    domain : GridDomain
    p : float
        Exponent in (1, 2].
    q : float
        Normalization exponent in (0, p*), p* = 2p/(2-p).
    params : SolveParams, optional
    warm_start : ScalarField, optional
        Starting field, typically the minimizer at a neighboring (p, q).
    trace : list, optional
        If given, receives one (eps, lambda_eps) tuple per outer iteration,
        for convergence diagnostics.

    Returns
    -------
    SolveResult
        ``lam`` is the unregularized Rayleigh value of the final iterate;
        ``converged`` requires the Euler-Lagrange residual to reach
        ``params.tol_residual``.
    """
    if not (1.0 < p <= 2.0):
        raise ValueError(f"p must lie in (1, 2], got {p}")
    if not (0.0 < q < critical_exponent(p)):
        raise ValueError(f"q must lie in (0, p*)=(0, {critical_exponent(p):g}), got {q}")
    params = params or SolveParams()
    h = domain.spacing
    mask = domain.inside
    eps = params.epsilon_start if params.epsilon_start is not None else h
    eps_min = params.epsilon_min if params.epsilon_min is not None else 1e-3 * h
    if eps_min > eps:
        raise ValueError("epsilon_min exceeds epsilon_start")

    stencil = _Stencil(domain)
    if warm_start is not None:
        values = np.abs(warm_start.values.copy())
    else:
        values = _initial_guess(domain, params.seed)
    values /= _raw_lq(values, mask, q, h)

    iterations = 0
    lu = None
    # for p = 2 the weights are identically 1, independent of eps: one level
    eps_levels = [eps_min] if p == 2.0 else _halving_schedule(eps, eps_min)

    for level, eps_k in enumerate(eps_levels):
        lam_eps = _raw_energy(values, h, p, eps_k)
        while iterations < params.max_outer:
            if p != 2.0 or lu is None:
                lu = spla.factorized(stencil.assemble(_weights(values, h, p, eps_k)))
            rhs = _clamped_power(values, mask, q - 1.0)
            sol = lu(rhs)
            vnew = np.zeros_like(values)
            vnew[mask] = np.abs(sol)
            vnew /= _raw_lq(vnew, mask, q, h)
            # backtracking keeps the regularized energy non-increasing
            step = 1.0
            accepted = None
            while step >= 1e-4:
                cand = np.abs(values + step * (vnew - values))
                cand /= _raw_lq(cand, mask, q, h)
                cand_energy = _raw_energy(cand, h, p, eps_k)
                if cand_energy <= lam_eps * (1.0 + 1e-14):
                    accepted = (cand, cand_energy)
                    break
                step *= 0.5
            iterations += 1
            if accepted is None:
                if trace is not None:
                    trace.append((eps_k, lam_eps))
                break  # stagnated at this level's floor
            values, new_energy = accepted
            rel_drop = (lam_eps - new_energy) / max(1.0, lam_eps)
            lam_eps = new_energy
            if trace is not None:
                trace.append((eps_k, lam_eps))
            if rel_drop < params.tol_lambda:
                break

    # residual polish at the final regularization level
    u_field = ScalarField(values, domain)
    lam = grad_energy_p(u_field, p, 0.0)
    res = el_residual(domain, u_field, lam, p, q, eps=eps_min)
    while res > params.tol_residual and iterations < params.max_outer:
        lu_final = lu if p == 2.0 else spla.factorized(
            stencil.assemble(_weights(values, h, p, eps_min))
        )
        sol = lu_final(_clamped_power(values, mask, q - 1.0))
        vnew = np.zeros_like(values)
        vnew[mask] = np.abs(sol)
        vnew /= _raw_lq(vnew, mask, q, h)
        values = vnew
        iterations += 1
        u_field = ScalarField(values, domain)
        lam = grad_energy_p(u_field, p, 0.0)
        res = el_residual(domain, u_field, lam, p, q, eps=eps_min)

    return SolveResult(
        lam=lam,
        u=u_field,
        residual=res,
        iterations=iterations,
        converged=bool(res <= params.tol_residual),
        p=p,
        q=q,
    )


def _halving_schedule(eps_start: float, eps_min: float) -> list[float]:
    levels = [eps_start]
    while levels[-1] > eps_min * (1.0 + 1e-12):
        levels.append(max(eps_min, levels[-1] / 2.0))
    return levels


def el_residual(
    domain: GridDomain,
    u: ScalarField,
    lam: float,
    p: float,
    q: float,
    eps: float | None = None,
) -> float:
    """Scaled Euler-Lagrange residual of -div(|grad u|^{p-2} grad u) = lam u^{q-1}.

    Evaluated with the epsilon_min regularization (eps defaults to
    1e-3 * spacing) and the singular-regime clamp on u^{q-1}. The returned
    value is the L^2 residual relative to lam times the L^2 size of the
    right-hand side, plus the normalization defect |lq_norm(u, q) - 1|, so a
    correctly scaled solution must also be correctly normalized.
    """
    mask = domain.inside
    values = u.values
    if not values.any():
        if lam == 0.0:
            return 0.0
        raise ValueError("zero field with nonzero lambda is degenerate")
    h = domain.spacing
    eps = 1e-3 * h if eps is None else eps
    stencil = _Stencil(domain)
    a_mat = stencil.assemble(_weights(values, h, p, eps))
    rhs = _clamped_power(values, mask, q - 1.0)
    r = a_mat @ values[mask] - lam * rhs
    scale = abs(lam) * float(np.linalg.norm(rhs))
    if scale == 0.0:
        return float(np.linalg.norm(r))
    return float(np.linalg.norm(r)) / scale + abs(lq_norm(u, q) - 1.0)


def lane_emden(result: SolveResult) -> tuple[ScalarField, float]:
    """Rescale the minimizer to the unconstrained Lane-Emden solution.

    v = lam^(1/(q-p)) * u solves the same equation with the multiplier
    absorbed; the identity lq_norm(v, q)^(q-p) = lam then holds by pure
    algebra. Returns (v, relative identity defect).
    """
    if result.q == result.p:
        raise ValueError("rescaling exponent 1/(q-p) is singular at q = p")
    factor = result.lam ** (1.0 / (result.q - result.p))
    v = ScalarField(result.u.values * factor, result.u.domain)
    check = abs(lq_norm(v, result.q) ** (result.q - result.p) - result.lam) / result.lam
    return v, float(check)


def rayleigh_quotient(domain: GridDomain, values: np.ndarray, p: float, q: float) -> float:
    """grad_energy_p(u, p, 0) / lq_norm(u, q)^p for an arbitrary test field."""
    clean = np.array(values, dtype=float)
    clean[~domain.inside] = 0.0
    f = ScalarField(clean, domain)
    nq = lq_norm(f, q)
    if nq == 0.0:
        raise ValueError("test field vanishes on the domain")
    return grad_energy_p(f, p, 0.0) / nq**p


def sup_normalized(u: ScalarField) -> ScalarField:
    """Field divided by its sup norm."""
    top = float(np.abs(u.values).max())
    if top == 0.0:
        raise ValueError("cannot sup-normalize the zero field")
    return ScalarField(u.values / top, u.domain)
