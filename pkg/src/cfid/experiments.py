"""Desk-scale studies on the bivariate Gaussian model.

In the model x and y are zero-mean and unit-variance with correlation rho; a
second model uses correlation rhohat. The studies are the contour grids over
(rho, rhohat), the input-scaling sweep, and the comparison of three 2x2
covariance estimators (SC, NSC1, NSC2) under MFID, RFID and CFID.

Random draws use numpy's PCG64 bit generator with the ziggurat normal sampler.
Trial ``t`` of a run seeded with ``seed`` uses the stream seeded by
``SeedSequence([seed, t])``, so trials do not depend on evaluation order.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .errors import DataError, DomainError, InsufficientDataError
from .stats import CondPairStats, scale_x

RNG_ALGORITHM = "numpy PCG64 / SeedSequence([seed, index]) / ziggurat normal"
METRICS = ("MFID", "RFID", "CFID")


class EstimatorKind(str, enum.Enum):
    SC = "SC"
    NSC1 = "NSC1"
    NSC2 = "NSC2"


@dataclass(frozen=True)
class BvnModel:
    rho: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and abs(self.rho) <= 1.0):
            raise DomainError(f"correlation must lie in [-1, 1], got {self.rho}")

    def cov(self) -> np.ndarray:
        return np.array([[1.0, self.rho], [self.rho, 1.0]])


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def sample_bvn(model: BvnModel, n: int, seed: int, index: int = 0):
    """Draw ``n`` paired samples ``(x, y)`` as two ``(n, 1)`` tables."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    z = rng_for(seed, index).standard_normal((n, 2))
    x = z[:, :1]
    y = model.rho * z[:, :1] + math.sqrt(1.0 - model.rho * model.rho) * z[:, 1:]
    return x, y


def fit_covariance(kind: EstimatorKind | str, x, y) -> np.ndarray:
    """2x2 covariance estimate of ``z = [x, y]`` (means are known to be zero).

    SC is ``(1/n) sum z z^T``. NSC1 rescales SC so that the output variance is
    one; NSC2 rescales both variances to one.
    """
    kind = EstimatorKind(kind)
    z = np.column_stack([np.asarray(x, float).reshape(-1), np.asarray(y, float).reshape(-1)])
    n = z.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    s = z.T @ z / n
    s = 0.5 * (s + s.T)
    if kind is EstimatorKind.SC:
        return s
    d = np.array([1.0, s[1, 1]]) if kind is EstimatorKind.NSC1 else np.diag(s).copy()
    if np.any(d <= 0.0):
        raise DataError(f"{kind.value}: zero sample variance, cannot normalize")
    scale = 1.0 / np.sqrt(d)
    out = s * np.outer(scale, scale)
    # normalized variances are exactly one by construction
    out[1, 1] = 1.0
    if kind is EstimatorKind.NSC2:
        out[0, 0] = 1.0
    return out


def estimator_to_pair_stats(est, truth: BvnModel, cxx: str = "true") -> CondPairStats:
    """Pair the true model with the model implied by a 2x2 estimate.

    With ``cxx="true"`` the estimate's output variance and cross-covariance
    are used as they are, next to the true input variance 1 (the estimate's
    own input variance is discarded). With ``cxx="estimated"`` the generated
    model is the conditional ``yhat | x`` implied by the whole estimate
    (slope ``C_yx / C_xx``, residual variance from the Schur complement),
    driven by the true input distribution.
    """
    est = np.asarray(est, dtype=np.float64)
    if est.shape != (2, 2) or not np.all(np.isfinite(est)):
        raise DataError("estimate must be a finite 2x2 matrix")
    if cxx == "true":
        c_yhatx = est[1, 0]
        c_yhatyhat = est[1, 1]
    elif cxx == "estimated":
        if est[0, 0] <= 0.0:
            raise DataError("estimated input variance must be positive")
        slope = est[1, 0] / est[0, 0]
        resid = max(est[1, 1] - est[1, 0] * slope, 0.0)
        c_yhatx = slope
        c_yhatyhat = resid + slope * slope
    else:
        raise DomainError(f"cxx must be 'true' or 'estimated', got {cxx!r}")
    zero = np.zeros(1)
    return CondPairStats(
        mean_x=zero, c_xx=[[1.0]],
        mean_y=zero, c_yx=[[truth.rho]], c_yy=[[1.0]],
        mean_yhat=zero, c_yhatx=[[c_yhatx]], c_yhatyhat=[[c_yhatyhat]],
    )


def scalar_pair_stats(rho: float, rhohat: float) -> CondPairStats:
    BvnModel(rho)
    BvnModel(rhohat)
    zero = np.zeros(1)
    return CondPairStats(
        mean_x=zero, c_xx=[[1.0]],
        mean_y=zero, c_yx=[[rho]], c_yy=[[1.0]],
        mean_yhat=zero, c_yhatx=[[rhohat]], c_yhatyhat=[[1.0]],
    )


def cfid_scalar(rho: float, rhohat: float) -> float:
    """CFID between the two bivariate models, by direct scalar substitution."""
    BvnModel(rho)
    BvnModel(rhohat)
    return (rho - rhohat) ** 2 + (math.sqrt(1.0 - rho * rho) - math.sqrt(1.0 - rhohat * rhohat)) ** 2


def _three(ps: CondPairStats) -> dict[str, float]:
    return {
        "MFID": metrics.mfid(ps).value,
        "RFID": metrics.rfid(ps).value,
        "CFID": metrics.cfid(ps).value,
    }


@dataclass
class TrialTable:
    rho: float
    n: int
    trials: int
    seed: int
    cxx: str
    values: dict[str, dict[str, list[float]]] = field(default_factory=dict)

    def medians(self) -> dict[str, dict[str, float]]:
        return {
            kind: {m: float(np.median(v)) for m, v in per.items()}
            for kind, per in self.values.items()
        }

    def to_dict(self) -> dict:
        return {
            "experiment": "synthetic",
            "rho": self.rho,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "cxx": self.cxx,
            "rng": RNG_ALGORITHM,
            "medians": self.medians(),
            "values": self.values,
        }

    def rows(self):
        """Flat ``(trial, estimator, metric, value)`` rows."""
        for kind, per in self.values.items():
            for m, vals in per.items():
                for t, v in enumerate(vals):
                    yield t, kind, m, v


def run_synthetic(
    rho: float = 0.5, n: int = 50, trials: int = 200, seed: int = 0, cxx: str = "true"
) -> TrialTable:
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    truth = BvnModel(rho)
    table = TrialTable(rho, n, trials, seed, cxx)
    table.values = {k.value: {m: [] for m in METRICS} for k in EstimatorKind}
    for t in range(trials):
        x, y = sample_bvn(truth, n, seed, t)
        for kind in EstimatorKind:
            ps = estimator_to_pair_stats(fit_covariance(kind, x, y), truth, cxx)
            for m, v in _three(ps).items():
                table.values[kind.value][m].append(v)
    return table


@dataclass
class GridResult:
    rho_axis: np.ndarray
    rhohat_axis: np.ndarray
    values: dict[str, np.ndarray]

    def to_dict(self) -> dict:
        return {
            "experiment": "contour",
            "rho_axis": self.rho_axis.tolist(),
            "rhohat_axis": self.rhohat_axis.tolist(),
            "values": {k: v.tolist() for k, v in self.values.items()},
        }

    def rows(self):
        for i, r in enumerate(self.rho_axis):
            for j, rh in enumerate(self.rhohat_axis):
                yield (r, rh) + tuple(self.values[k][i, j] for k in ("squared_diff", "RFID", "CFID"))


def contour_grid(resolution: int = 41, limit: float = 0.99) -> GridResult:
    if resolution < 2:
        raise DomainError(f"resolution must be at least 2, got {resolution}")
    axis = np.linspace(-limit, limit, resolution)
    sq = (axis[:, None] - axis[None, :]) ** 2
    rf = np.empty_like(sq)
    cf = np.empty_like(sq)
    for i, r in enumerate(axis):
        for j, rh in enumerate(axis):
            ps = scalar_pair_stats(r, rh)
            rf[i, j] = metrics.rfid(ps).value
            cf[i, j] = metrics.cfid(ps).value
    return GridResult(axis, axis.copy(), {"squared_diff": sq, "RFID": rf, "CFID": cf})


DEFAULT_ALPHAS = (0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def alpha_sweep(rho: float, rhohat: float, alphas=DEFAULT_ALPHAS) -> list[dict[str, float]]:
    """MFID, RFID and CFID of the bivariate pair after scaling x by each alpha."""
    base = scalar_pair_stats(rho, rhohat)
    out = []
    for a in alphas:
        row = {"alpha": float(a)}
        row.update(_three(scale_x(base, float(a))))
        out.append(row)
    return out
