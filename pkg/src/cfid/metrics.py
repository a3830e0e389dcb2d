"""Closed-form Frechet distances between Gaussian (conditional) models.

All values are squared Wasserstein-2 distances; no square root is taken.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .report import MetricReport, clamp_noise
from .stats import CondPairStats, JointStats, block_cov, conditional_cov
from .errors import DataError


@dataclass(frozen=True)
class GaussianDesc:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).reshape(-1)
        cov = linalg.as_sym(self.cov)
        if cov.shape[0] != len(mean):
            raise DataError(f"mean has length {len(mean)} but covariance is {cov.shape}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


def _w2(ma, ca, mb, cb, clamp_tol: float) -> float:
    diff = ma - mb
    value = float(diff @ diff) + float(np.trace(ca) + np.trace(cb))
    value -= 2.0 * linalg.trace_sqrt_product(ca, cb, clamp_tol)
    return clamp_noise(value)


def gaussian_w2(a: GaussianDesc, b: GaussianDesc, clamp_tol: float = linalg.CLAMP_TOL) -> float:
    if a.cov.shape != b.cov.shape:
        raise DataError(f"dimension mismatch: {a.cov.shape} vs {b.cov.shape}")
    return _w2(a.mean, a.cov, b.mean, b.cov, clamp_tol)


def _report(name, value, ps, clamp_tol, eps=None, dim_x=None) -> MetricReport:
    tol = {"clamp_tol": clamp_tol}
    if eps is not None:
        tol["pinv_eps"] = eps
    return MetricReport(
        name, value, n_samples=ps.n_samples,
        dim_x=ps.dim_x if dim_x is None else dim_x, dim_y=ps.dim_y, tolerances=tol,
    )


def mfid(ps: CondPairStats, clamp_tol: float = linalg.CLAMP_TOL) -> MetricReport:
    """Classical FID between the two output marginals; the input is ignored."""
    value = _w2(ps.mean_y, ps.c_yy, ps.mean_yhat, ps.c_yhatyhat, clamp_tol)
    return _report("MFID", value, ps, clamp_tol)


def rfid(ps: CondPairStats, clamp_tol: float = linalg.CLAMP_TOL) -> MetricReport:
    """Frechet distance between the joints (x, y) and (x, yhat) sharing ``p(x)``.

    The shared input means cancel, so only the output means enter the mean term.
    """
    ca = block_cov(ps.c_xx, ps.c_yx, ps.c_yy)
    cb = block_cov(ps.c_xx, ps.c_yhatx, ps.c_yhatyhat)
    value = _w2(ps.mean_y, ca, ps.mean_yhat, cb, clamp_tol)
    return _report("RFID", value, ps, clamp_tol)


def cfid_terms(
    ps: CondPairStats, eps: float = linalg.PINV_EPS, clamp_tol: float = linalg.CLAMP_TOL
) -> tuple[float, float, float]:
    """The three CFID contributions: output-mean, cross-covariance and conditional-covariance."""
    dm = ps.mean_y - ps.mean_yhat
    mean_term = float(dm @ dm)
    d_cross = ps.c_yx - ps.c_yhatx
    cross_term = float(np.trace(d_cross @ linalg.pinv_psd(ps.c_xx, eps) @ d_cross.T))
    cov_t = conditional_cov(ps.true_joint(), eps)
    cov_g = conditional_cov(ps.generated_joint(), eps)
    cov_term = float(np.trace(cov_t) + np.trace(cov_g))
    cov_term -= 2.0 * linalg.trace_sqrt_product(cov_t, cov_g, clamp_tol)
    return mean_term, cross_term, cov_term


def cfid(
    ps: CondPairStats, eps: float = linalg.PINV_EPS, clamp_tol: float = linalg.CLAMP_TOL
) -> MetricReport:
    """Expected Frechet distance between the conditional outputs given x."""
    value = clamp_noise(sum(cfid_terms(ps, eps, clamp_tol)))
    return _report("CFID", value, ps, clamp_tol, eps)


def jfd(a: JointStats, b: JointStats, clamp_tol: float = linalg.CLAMP_TOL) -> MetricReport:
    """Frechet joint distance; the two input marginals may differ."""
    if (a.dim_x, a.dim_y) != (b.dim_x, b.dim_y):
        raise DataError(
            f"joint dimensions differ: ({a.dim_x}, {a.dim_y}) vs ({b.dim_x}, {b.dim_y})"
        )
    value = _w2(a.joint_mean(), a.block(), b.joint_mean(), b.block(), clamp_tol)
    return MetricReport(
        "JFD", value, n_samples=min(a.n_samples, b.n_samples),
        dim_x=a.dim_x, dim_y=a.dim_y, tolerances={"clamp_tol": clamp_tol},
    )
