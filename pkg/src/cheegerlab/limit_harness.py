"""Continuation sweeps p -> 1+ along q-paths, extrapolation, and limit checks.

The sweep machinery produces one record per p with the observables that the
limit statements constrain: lambda, the L1 and sup norms, and the rescaled
Lane-Emden powers. Limits are estimated by a linear least-squares fit in
(p - 1) over the sweep tail and compared against the Cheeger reference; every
check lands in the report with its numeric margin, pass or fail.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .cheeger_solver import superlevel_check
from .domain_grid import GridDomain, ScalarField, lq_norm
from .plap_solver import (
    SolveParams,
    SolveResult,
    critical_exponent,
    lane_emden,
    minimize_rayleigh,
)
from .special_constants import ball_cheeger, i_sigma_q, sobolev_constant, SobolevParams

__all__ = [
    "QPath",
    "SweepRecord",
    "CheckRow",
    "LimitReport",
    "DEFAULT_TOLERANCES",
    "run_sweep",
    "extrapolate_limit",
    "check_theorem_main",
    "check_lemma_estim",
    "check_corollary_le1",
    "sweep_csv_text",
    "write_sweep_csv",
    "SWEEP_CSV_HEADER",
]

SWEEP_CSV_HEADER = "p,q,lambda,l1,linf,linf_pow,lane_emden_q_pow,residual,iterations"

DEFAULT_TOLERANCES = {
    "lambda": 0.05,       # extrapolated lambda vs h_ref
    "l1": 0.03,           # extrapolated ||u||_1 vs 1
    "linf_pow": 0.05,     # extrapolated ||u||_inf^(q-p) vs 1
    "linf_bounds": 0.15,  # sup-norm bracket at the smallest p
    "lemma_pa": 0.10,     # lambda overshoot for p <= 1.1
    "superlevel": 0.10,   # superlevel ratios vs h_ref
    "fit": 0.10,          # fit residual relative to the fitted value
    "corollary": 0.07,    # rescaled-power extrapolations vs h_ref
}


@dataclass(frozen=True)
class QPath:
    """Normalization exponent q as a function of p along a sweep.

    Kinds: ``constant_one`` (q = 1), ``equal_p`` (q = p), ``power`` (q = p^beta
    for a fixed beta), ``explicit`` (one q per sweep point). Every named kind
    satisfies q(p) -> 1 as p -> 1 by construction.
    """

    kind: str
    beta: Optional[float] = None
    values: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.kind == "power":
            if self.beta is None:
                raise ValueError("power path requires beta")
        elif self.kind == "explicit":
            if not self.values:
                raise ValueError("explicit path requires a q list")
            if any(q <= 0.0 for q in self.values):
                raise ValueError("explicit q values must be positive")
        elif self.kind not in ("constant_one", "equal_p"):
            raise ValueError(f"unknown q-path kind {self.kind!r}")

    @classmethod
    def constant_one(cls) -> "QPath":
        return cls("constant_one")

    @classmethod
    def equal_p(cls) -> "QPath":
        return cls("equal_p")

    @classmethod
    def power(cls, beta: float) -> "QPath":
        return cls("power", beta=beta)

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "QPath":
        return cls("explicit", values=tuple(float(v) for v in values))

    def q_list(self, p_list: Sequence[float]) -> list[float]:
        """Evaluate q(p) along the sweep and validate subcriticality."""
        if self.kind == "constant_one":
            qs = [1.0 for _ in p_list]
        elif self.kind == "equal_p":
            qs = [float(p) for p in p_list]
        elif self.kind == "power":
            qs = [float(p) ** self.beta for p in p_list]
        else:
            if len(self.values) != len(p_list):
                raise ValueError("explicit path length does not match p_list")
            qs = list(self.values)
        for p, q in zip(p_list, qs):
            if not (0.0 < q < critical_exponent(p)):
                raise ValueError(f"q={q:g} leaves (0, p*) at p={p:g}")
        return qs

    def label(self) -> str:
        if self.kind == "power":
            return f"power({self.beta:g})"
        return self.kind


@dataclass(frozen=True)
class SweepRecord:
    """Observables of one converged sweep point; carries its solution field."""

    p: float
    q: float
    lam: float
    l1: float
    linf: float
    linf_pow: float
    lane_emden_q_pow: float
    residual: float
    iterations: int
    solution: ScalarField = field(repr=False, compare=False)

    def csv_row(self) -> list[str]:
        return [
            repr(self.p),
            repr(self.q),
            repr(self.lam),
            repr(self.l1),
            repr(self.linf),
            repr(self.linf_pow),
            repr(self.lane_emden_q_pow),
            repr(self.residual),
            str(self.iterations),
        ]


@dataclass(frozen=True)
class CheckRow:
    """One named verification with its numbers; failures are rows, not errors."""

    name: str
    value: float
    reference: float
    tolerance: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "reference": self.reference,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class LimitReport:
    """Outcome of the limit checks for one sweep."""

    extrapolated_lambda: float
    extrapolated_l1: float
    extrapolated_linf_pow: float
    h_ref: float
    checks: tuple[CheckRow, ...]
    superlevel_rows: tuple[tuple[float, float, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "extrapolated_lambda": self.extrapolated_lambda,
            "extrapolated_l1": self.extrapolated_l1,
            "extrapolated_linf_pow": self.extrapolated_linf_pow,
            "h_ref": self.h_ref,
            "checks": [row.to_json_dict() for row in self.checks],
            "superlevel": [list(row) for row in self.superlevel_rows],
        }

    def passed(self, names: Sequence[str] | None = None) -> bool:
        rows = self.checks if names is None else [r for r in self.checks if r.name in names]
        return all(r.passed for r in rows)


def _record_from(result: SolveResult) -> SweepRecord:
    l1 = lq_norm(result.u, 1.0)
    linf = lq_norm(result.u, math.inf)
    if result.q == result.p:
        le_pow = math.nan
    else:
        v, _ = lane_emden(result)
        le_pow = lq_norm(v, result.q) ** (result.q - result.p)
    return SweepRecord(
        p=result.p,
        q=result.q,
        lam=result.lam,
        l1=l1,
        linf=linf,
        linf_pow=linf ** (result.q - result.p),
        lane_emden_q_pow=le_pow,
        residual=result.residual,
        iterations=result.iterations,
        solution=result.u,
    )


def run_sweep(
    domain: GridDomain,
    qpath: QPath,
    p_list: Sequence[float],
    params: SolveParams | None = None,
) -> list[SweepRecord]:
    """Continuation sweep: walk p downward, warm-starting each solve.

    Parameters
    ----------
    domain : GridDomain
    qpath : QPath
        Normalization exponent schedule q(p).
    p_list : sequence of float
        Strictly decreasing, inside [1.02, 2]; 1.02 is the resolution floor
        below which regularization error swamps the signal.
    params : SolveParams, optional

    Returns
    -------
    list of SweepRecord
        One record per converged point. The continuation seed is the (2, 2)
        solve; each later point warm-starts from its predecessor. A
        non-converged point aborts the sweep with a warning and the records
        computed so far are returned.
    """
    p_list = [float(p) for p in p_list]
    if any(b >= a for a, b in zip(p_list, p_list[1:])):
        raise ValueError("p_list must be strictly decreasing")
    if not (1.02 <= p_list[-1] and p_list[0] <= 2.0):
        raise ValueError("p_list must stay within [1.02, 2]")
    params = params or SolveParams()
    qs = qpath.q_list(p_list)

    seed_result = minimize_rayleigh(domain, 2.0, 2.0, params)
    warm = seed_result.u
    records: list[SweepRecord] = []
    for p, q in zip(p_list, qs):
        result = minimize_rayleigh(domain, p, q, params, warm_start=warm)
        if not result.converged:
            warnings.warn(
                f"sweep aborted at p={p:g}, q={q:g}: residual {result.residual:.3e} "
                f"after {result.iterations} iterations",
                stacklevel=2,
            )
            break
        records.append(_record_from(result))
        warm = result.u
    return records


def extrapolate_limit(
    records: Sequence[SweepRecord],
    observable: str | Callable[[SweepRecord], float] = "lam",
    tail: int = 3,
) -> tuple[float, float]:
    """Limit estimate at p = 1 by a linear least-squares fit in (p - 1).

    Parameters
    ----------
    records : sequence of SweepRecord
    observable : str or callable
        Field name on the record, or a function of the record.
    tail : int
        How many trailing records enter the fit, clamped to 3..5.

    Returns
    -------
    value : float
        The fitted intercept, i.e. the estimate at p = 1.
    rms : float
        Root-mean-square fit residual, a quality score: above ten percent
        of the value means the tail is not yet in the linear regime.
    """
    if len(records) < 3:
        raise ValueError("extrapolation needs at least 3 records")
    tail = max(3, min(5, tail, len(records)))
    pick = records[-tail:]
    getter = (lambda r: getattr(r, observable)) if isinstance(observable, str) else observable
    x = np.array([r.p - 1.0 for r in pick])
    y = np.array([float(getter(r)) for r in pick])
    design = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return float(coef[0]), rms


def check_theorem_main(
    records: Sequence[SweepRecord],
    h_ref: float,
    tolerances: dict | None = None,
) -> LimitReport:
    """Verdicts for the limit statements of the main convergence theorem.

    Checks, in order: extrapolated lambda -> h_ref; extrapolated L1 norm -> 1;
    extrapolated sup-norm power -> 1; the sup-norm two-sided bound at the
    smallest p; the asymptotic upper bound lambda <= h_ref (evaluated on
    records with p <= 1.1, an asymptotic statement reported at face value);
    superlevel-set ratios at the smallest p; and the fit quality of the
    lambda extrapolation. Failures are report rows, never exceptions.
    """
    if not records:
        raise ValueError("no records to check")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    domain = records[-1].solution.domain
    area = domain.area

    lam_fit, lam_rms = extrapolate_limit(records, "lam")
    l1_fit, _ = extrapolate_limit(records, "l1")
    linf_pow_fit, _ = extrapolate_limit(records, "linf_pow")

    checks: list[CheckRow] = []
    checks.append(
        CheckRow("limit_lambda", lam_fit, h_ref, tol["lambda"],
                 abs(lam_fit - h_ref) <= tol["lambda"] * h_ref)
    )
    checks.append(
        CheckRow("limit_l1", l1_fit, 1.0, tol["l1"], abs(l1_fit - 1.0) <= tol["l1"])
    )
    checks.append(
        CheckRow("limit_linf_pow", linf_pow_fit, 1.0, tol["linf_pow"],
                 abs(linf_pow_fit - 1.0) <= tol["linf_pow"])
    )

    last = records[-1]
    delta = tol["linf_bounds"]
    lower = (1.0 / area) * (1.0 - delta)
    h_ball = ball_cheeger(2, volume=area)
    upper = (h_ref**2) / (area * h_ball**2) * (1.0 + delta)
    checks.append(
        CheckRow("linf_lower", last.linf, 1.0 / area, delta, last.linf >= lower)
    )
    checks.append(
        CheckRow("linf_upper", last.linf, (h_ref**2) / (area * h_ball**2), delta,
                 last.linf <= upper)
    )

    near = [r for r in records if r.p <= 1.1 + 1e-12]
    if near:
        overshoot = max(r.lam / h_ref - 1.0 for r in near)
        checks.append(
            CheckRow("lemma_pa_upper", overshoot, 0.0, tol["lemma_pa"],
                     overshoot <= tol["lemma_pa"])
        )

    sup = last.linf
    rows, _ = superlevel_check(last.solution, h_ref, [0.3 * sup, 0.5 * sup, 0.7 * sup])
    worst = max((abs(ratio - h_ref) / h_ref for _, ratio, _ in rows), default=math.inf)
    checks.append(
        CheckRow("superlevel_ratios", worst, 0.0, tol["superlevel"],
                 worst <= tol["superlevel"])
    )

    checks.append(
        CheckRow("fit_quality", lam_rms, 0.0, tol["fit"],
                 lam_rms <= tol["fit"] * abs(lam_fit))
    )

    return LimitReport(
        extrapolated_lambda=lam_fit,
        extrapolated_l1=l1_fit,
        extrapolated_linf_pow=linf_pow_fit,
        h_ref=h_ref,
        checks=tuple(checks),
        superlevel_rows=tuple(rows),
    )


def check_lemma_estim(
    record: SweepRecord, domain: GridDomain, sigma: float
) -> tuple[float, float, bool]:
    """Sup-norm lower-bound inequality for one record.

    Evaluates C * ||u||_inf^((N(p-q) + p sigma)/p) <= ||u||_sigma^sigma with
    C = (S_{2,p} / lambda)^(N/p) * (p / (p + N(p-1)))^(N+1) * I_{sigma,q},
    where S_{2,p} is the closed-form critical Sobolev constant. The domain
    must be the one the record was solved on. Returns (lhs, rhs, pass) with
    a one percent discretization slack.
    """
    if sigma < 1.0:
        raise ValueError(f"sigma must be >= 1, got {sigma}")
    own = record.solution.domain
    if domain is not own and not (
        domain.spacing == own.spacing and np.array_equal(domain.inside, own.inside)
    ):
        raise ValueError("domain does not match the record's solution")
    p, q = record.p, record.q
    n_dim = 2
    if not p < n_dim:
        raise ValueError("the inequality needs p < N = 2 for the Sobolev constant")
    s_np = sobolev_constant(SobolevParams(n_dim, p))
    c_val = (
        (s_np / record.lam) ** (n_dim / p)
        * (p / (p + n_dim * (p - 1.0))) ** (n_dim + 1)
        * i_sigma_q(sigma, q, p, n_dim)
    )
    lhs = c_val * record.linf ** ((n_dim * (p - q) + p * sigma) / p)
    rhs = lq_norm(record.solution, sigma) ** sigma
    return lhs, rhs, bool(lhs <= rhs * 1.01)


def check_corollary_le1(
    records: Sequence[SweepRecord], h_ref: float, tolerances: dict | None = None
) -> LimitReport:
    """Rescaled-solution limits: both Lane-Emden powers approach h_ref.

    Per record (q != p; q = p rows are skipped) the quantities
    ||v||_q^(q-p) (identically lambda) and ||v||_inf^(q-p) = lambda *
    ||u||_inf^(q-p) are extrapolated to p = 1 and compared with h_ref.
    Boundedness of ||v||_inf^(q-p) is asserted over the extrapolation tail,
    where the bounded branch of the alternative must hold; far from the limit
    the quantity is large for every correct solution, so the tail is the
    meaningful window.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    usable = [r for r in records if r.q != r.p]
    if len(usable) < 3:
        raise ValueError("need at least 3 records with q != p")

    lam_fit, lam_rms = extrapolate_limit(usable, "lam")
    vinf = lambda r: r.lam * r.linf_pow
    vinf_fit, _ = extrapolate_limit(usable, vinf)

    checks = [
        CheckRow("le1_vq_pow", lam_fit, h_ref, tol["corollary"],
                 abs(lam_fit - h_ref) <= tol["corollary"] * h_ref),
        CheckRow("le1_vinf_pow", vinf_fit, h_ref, tol["corollary"],
                 abs(vinf_fit - h_ref) <= tol["corollary"] * h_ref),
    ]
    tail_max = max(vinf(r) for r in usable[-3:])
    checks.append(
        CheckRow("le1_bounded", tail_max, 2.0 * h_ref, 0.0, tail_max <= 2.0 * h_ref)
    )
    identity_defect = max(
        abs(r.lane_emden_q_pow - r.lam) / r.lam for r in usable
    )
    checks.append(
        CheckRow("le1_identity", identity_defect, 0.0, 1e-10, identity_defect <= 1e-10)
    )
    return LimitReport(
        extrapolated_lambda=lam_fit,
        extrapolated_l1=math.nan,
        extrapolated_linf_pow=vinf_fit,
        h_ref=h_ref,
        checks=tuple(checks),
        superlevel_rows=(),
    )


def sweep_csv_text(records: Sequence[SweepRecord]) -> str:
    """CSV serialization of a sweep: fixed header, reproducible float repr."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER.split(","))
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()


def write_sweep_csv(records: Sequence[SweepRecord], path: str | Path) -> None:
    """One CSV row per record under the fixed header, reproducible formatting."""
    Path(path).write_text(sweep_csv_text(records))
