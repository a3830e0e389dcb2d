"""Second-order statistics of (x, y) and (x, y, yhat) samples.

Covariances use the 1/n normalization. The input statistics of a
:class:`CondPairStats` are stored once and shared by both models, so the two
joints have the same input marginal by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import DataError, DomainError, InsufficientDataError, PairingError


def _vector(v, dim: int | None = None, name: str = "vector") -> np.ndarray:
    a = np.array(v, dtype=np.float64, copy=True).reshape(-1)
    if dim is not None and a.shape[0] != dim:
        raise DataError(f"{name} has length {a.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(a)):
        raise DataError(f"{name} has non-finite entries")
    return a


def block_cov(c_xx, c_yx, c_yy) -> np.ndarray:
    """Assemble ``[[C_xx, C_xy], [C_yx, C_yy]]`` with the input block first."""
    return np.block([[c_xx, c_yx.T], [c_yx, c_yy]])


@dataclass(frozen=True)
class JointStats:
    mean_x: np.ndarray
    mean_y: np.ndarray
    c_xx: np.ndarray
    c_yx: np.ndarray
    c_yy: np.ndarray
    n_samples: int = 0

    def __post_init__(self):
        mx = _vector(self.mean_x, name="mean_x")
        my = _vector(self.mean_y, name="mean_y")
        dx, dy = len(mx), len(my)
        c_xx = linalg.as_sym(self.c_xx)
        c_yy = linalg.as_sym(self.c_yy)
        c_yx = linalg.as_rect(self.c_yx, dy, dx)
        if c_xx.shape[0] != dx or c_yy.shape[0] != dy:
            raise DataError("covariance blocks do not match the mean dimensions")
        for name, v in (("mean_x", mx), ("mean_y", my), ("c_xx", c_xx), ("c_yx", c_yx), ("c_yy", c_yy)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        linalg.check_psd(block_cov(c_xx, c_yx, c_yy))

    @property
    def dim_x(self) -> int:
        return len(self.mean_x)

    @property
    def dim_y(self) -> int:
        return len(self.mean_y)

    def block(self) -> np.ndarray:
        return block_cov(self.c_xx, self.c_yx, self.c_yy)

    def joint_mean(self) -> np.ndarray:
        return np.concatenate([self.mean_x, self.mean_y])


@dataclass(frozen=True)
class CondPairStats:
    """Shared input moments plus output/cross blocks for a true and a generated model."""

    mean_x: np.ndarray
    c_xx: np.ndarray
    mean_y: np.ndarray
    c_yx: np.ndarray
    c_yy: np.ndarray
    mean_yhat: np.ndarray
    c_yhatx: np.ndarray
    c_yhatyhat: np.ndarray
    n_samples: int = 0

    def __post_init__(self):
        # Delegate validation to the two induced joints.
        t = JointStats(self.mean_x, self.mean_y, self.c_xx, self.c_yx, self.c_yy)
        g = JointStats(self.mean_x, self.mean_yhat, self.c_xx, self.c_yhatx, self.c_yhatyhat)
        if t.dim_y != g.dim_y:
            raise DataError(f"output dimensions differ: {t.dim_y} vs {g.dim_y}")
        for name, v in (
            ("mean_x", t.mean_x), ("c_xx", t.c_xx),
            ("mean_y", t.mean_y), ("c_yx", t.c_yx), ("c_yy", t.c_yy),
            ("mean_yhat", g.mean_y), ("c_yhatx", g.c_yx), ("c_yhatyhat", g.c_yy),
        ):
            object.__setattr__(self, name, v)

    @property
    def dim_x(self) -> int:
        return len(self.mean_x)

    @property
    def dim_y(self) -> int:
        return len(self.mean_y)

    def true_joint(self) -> JointStats:
        return JointStats(self.mean_x, self.mean_y, self.c_xx, self.c_yx, self.c_yy, self.n_samples)

    def generated_joint(self) -> JointStats:
        return JointStats(
            self.mean_x, self.mean_yhat, self.c_xx, self.c_yhatx, self.c_yhatyhat, self.n_samples
        )

    def swapped(self) -> "CondPairStats":
        """Exchange the roles of the two models."""
        return replace(
            self,
            mean_y=self.mean_yhat, c_yx=self.c_yhatx, c_yy=self.c_yhatyhat,
            mean_yhat=self.mean_y, c_yhatx=self.c_yx, c_yhatyhat=self.c_yy,
        )


@dataclass(frozen=True)
class CondMoments:
    mean_given_x: np.ndarray
    cov_given_x: np.ndarray


def _table(rows, name: str) -> np.ndarray:
    a = np.asarray(rows, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DataError(f"{name}: expected an n x d table, got shape {a.shape}")
    bad = ~np.all(np.isfinite(a), axis=1)
    if bad.any():
        raise DataError(f"{name}: non-finite value in row {int(np.argmax(bad))}")
    return a


def _check_rows(tables: dict[str, np.ndarray]) -> int:
    counts = {k: v.shape[0] for k, v in tables.items()}
    n = next(iter(counts.values()))
    if any(c != n for c in counts.values()):
        raise PairingError(f"row counts differ: {counts}")
    if n < 2:
        raise InsufficientDataError(f"need at least 2 paired rows, got {n}")
    return n


def _moments(x: np.ndarray, y: np.ndarray):
    n = x.shape[0]
    mx = x.mean(axis=0)
    my = y.mean(axis=0)
    xc = x - mx
    yc = y - my
    return mx, my, xc.T @ xc / n, yc.T @ xc / n, yc.T @ yc / n


def estimate_joint(x_rows, y_rows) -> JointStats:
    x = _table(x_rows, "x")
    y = _table(y_rows, "y")
    n = _check_rows({"x": x, "y": y})
    mx, my, c_xx, c_yx, c_yy = _moments(x, y)
    return JointStats(mx, my, c_xx, c_yx, c_yy, n)


def estimate_cond_pair(x_rows, y_rows, yhat_rows) -> CondPairStats:
    x = _table(x_rows, "x")
    y = _table(y_rows, "y")
    yh = _table(yhat_rows, "yhat")
    n = _check_rows({"x": x, "y": y, "yhat": yh})
    mx, my, c_xx, c_yx, c_yy = _moments(x, y)
    myh = yh.mean(axis=0)
    yhc = yh - myh
    xc = x - mx
    return CondPairStats(
        mean_x=mx, c_xx=c_xx,
        mean_y=my, c_yx=c_yx, c_yy=c_yy,
        mean_yhat=myh, c_yhatx=yhc.T @ xc / n, c_yhatyhat=yhc.T @ yhc / n,
        n_samples=n,
    )


def explained_cov(c_yx, c_xx, eps: float = linalg.PINV_EPS) -> np.ndarray:
    """``C_yx pinv(C_xx) C_xy``, the part of C_yy explained by the input."""
    r = c_yx @ linalg.pinv_psd(c_xx, eps) @ c_yx.T
    return 0.5 * (r + r.T)


def conditional_moments(js: JointStats, x, eps: float = linalg.PINV_EPS) -> CondMoments:
    xv = _vector(x, js.dim_x, name="x")
    gain = js.c_yx @ linalg.pinv_psd(js.c_xx, eps)
    mean = js.mean_y + gain @ (xv - js.mean_x)
    return CondMoments(mean, conditional_cov(js, eps))


def conditional_cov(js: JointStats, eps: float = linalg.PINV_EPS) -> np.ndarray:
    """Schur complement ``C_yy - C_yx pinv(C_xx) C_xy``; it does not depend on x."""
    c = js.c_yy - explained_cov(js.c_yx, js.c_xx, eps)
    return 0.5 * (c + c.T)


def scale_x(ps: CondPairStats, alpha: float) -> CondPairStats:
    """Statistics of ``(alpha * x, y, yhat)``."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return ps
    return replace(
        ps,
        mean_x=alpha * ps.mean_x,
        c_xx=alpha * alpha * ps.c_xx,
        c_yx=alpha * ps.c_yx,
        c_yhatx=alpha * ps.c_yhatx,
    )
