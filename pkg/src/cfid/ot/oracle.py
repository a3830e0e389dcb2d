"""Exact optimal transport over finite supports.

Every distance here is a squared-Euclidean transport cost (a squared W2),
solved as an exact transportation LP. The programs compared are

* MWD  - transport between the output marginals,
* RWD  - transport between the joints (x, y) and (x', y') with cost on both,
* RWD3 - coupling of (y, y', x) that keeps x fixed, cost on the outputs only,
* CWD  - the input-weighted average of per-input conditional transports.

RWD3 and CWD require the two joints to have the same input marginal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, InputError, NumericalError, RestrictionError
from ..report import MetricReport, clamp_noise
from . import _backend

WEIGHT_TOL = 1e-12
MARGINAL_TOL = 1e-9
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class CouplingPlan:
    plan: np.ndarray
    objective: float
    iterations: int = 0


@dataclass(frozen=True)
class DiscreteJoint:
    """Finite joint distribution over (x, y) support points."""

    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = _points(self.x, "x")
        y = _points(self.y, "y")
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if not (len(x) == len(y) == len(w)):
            raise DataError(f"support sizes differ: x {len(x)}, y {len(y)}, weights {len(w)}")
        _check_probability(w, "weights")
        for name, v in (("x", x), ("y", y), ("weights", w)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def dim_x(self) -> int:
        return self.x.shape[1]

    @property
    def dim_y(self) -> int:
        return self.y.shape[1]

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "y": self.y.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "DiscreteJoint":
        try:
            return cls(d["x"], d["y"], d["weights"])
        except KeyError as exc:
            raise InputError(f"joint is missing field {exc}") from None


def _points(p, name):
    a = np.array(p, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] == 0:
        raise DataError(f"{name}: expected a non-empty list of points, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError(f"{name}: support points must be finite")
    return a


def _check_probability(w, name):
    if w.ndim != 1 or len(w) == 0:
        raise InputError(f"{name}: expected a non-empty weight vector")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise InputError(f"{name}: weights must be finite and nonnegative")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise InputError(f"{name}: weights sum to {w.sum()!r}, expected 1")


def sq_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances between the rows of ``a`` and ``b``."""
    d = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", d, d)


def _transport(cost, a, b) -> CouplingPlan:
    """Exact transport between nonnegative vectors of equal total mass."""
    mass_a, mass_b = a.sum(), b.sum()
    if abs(mass_a - mass_b) > MARGINAL_TOL * max(1.0, mass_a):
        raise InputError(f"total masses differ: {mass_a!r} vs {mass_b!r}")
    rows = np.flatnonzero(a > 0)
    cols = np.flatnonzero(b > 0)
    plan = np.zeros(cost.shape)
    if len(rows) == 0 or len(cols) == 0:
        return CouplingPlan(plan, 0.0)
    sub = np.ascontiguousarray(cost[np.ix_(rows, cols)])
    m, n = sub.shape
    tol = 1e-11 * max(1.0, float(np.abs(sub).max()))
    max_iter = max(1000, 20 * m * n)
    flow, status, iters = _backend.transport(sub, a[rows], b[cols], tol, max_iter)
    if status != 0:
        raise NumericalError(
            f"transportation simplex hit its iteration cap ({max_iter}) on a {m}x{n} problem"
        )
    plan[np.ix_(rows, cols)] = flow
    return CouplingPlan(plan, float(np.sum(plan * cost)), iters)


def solve_ot(cost, p, q) -> CouplingPlan:
    """Optimal coupling of probability vectors ``p`` and ``q`` under ``cost``."""
    c = np.array(cost, dtype=np.float64)
    p = np.array(p, dtype=np.float64).reshape(-1)
    q = np.array(q, dtype=np.float64).reshape(-1)
    _check_probability(p, "p")
    _check_probability(q, "q")
    if c.shape != (len(p), len(q)):
        raise InputError(f"cost has shape {c.shape}, expected {(len(p), len(q))}")
    if not np.all(np.isfinite(c)):
        raise InputError("cost matrix must be finite")
    return _transport(c, p, q)


def _report(metric, value, a: DiscreteJoint) -> MetricReport:
    return MetricReport(
        metric, clamp_noise(value), n_samples=a.size, dim_x=a.dim_x, dim_y=a.dim_y,
        tolerances={"marginal_tol": MARGINAL_TOL, "merge_tol": MERGE_TOL},
    )


def _check_dims(a: DiscreteJoint, b: DiscreteJoint, with_x: bool):
    if a.dim_y != b.dim_y:
        raise DataError(f"output dimensions differ: {a.dim_y} vs {b.dim_y}")
    if with_x and a.dim_x != b.dim_x:
        raise DataError(f"input dimensions differ: {a.dim_x} vs {b.dim_x}")


def mwd_coupling(a: DiscreteJoint, b: DiscreteJoint) -> CouplingPlan:
    _check_dims(a, b, with_x=False)
    return _transport(sq_dist(a.y, b.y), a.weights, b.weights)


def _is_uniform(w) -> bool:
    return bool(np.all(w == w[0]))


def mwd_discrete(a: DiscreteJoint, b: DiscreteJoint, method: str = "auto") -> MetricReport:
    """Transport between the output marginals.

    ``method="auto"`` uses the sorted-sample formula when both marginals are
    one-dimensional, uniformly weighted and of equal size; ``"lp"`` always
    solves the LP.
    """
    _check_dims(a, b, with_x=False)
    if method not in ("auto", "lp", "quantile"):
        raise InputError(f"unknown method {method!r}")
    quantile_ok = (
        a.dim_y == 1 and a.size == b.size and _is_uniform(a.weights) and _is_uniform(b.weights)
    )
    if method == "quantile" and not quantile_ok:
        raise InputError("quantile method needs equal-size, uniformly weighted 1-D marginals")
    if method == "quantile" or (method == "auto" and quantile_ok and a.size > 1):
        value = quantile_w2_1d(np.sort(a.y[:, 0]), np.sort(b.y[:, 0]))
    else:
        value = mwd_coupling(a, b).objective
    return _report("MWD", value, a)


def rwd_coupling(a: DiscreteJoint, b: DiscreteJoint) -> CouplingPlan:
    _check_dims(a, b, with_x=True)
    cost = sq_dist(a.y, b.y) + sq_dist(a.x, b.x)
    return _transport(cost, a.weights, b.weights)


def rwd_discrete(a: DiscreteJoint, b: DiscreteJoint) -> MetricReport:
    return _report("RWD", rwd_coupling(a, b).objective, a)


def _x_groups(j: DiscreteJoint):
    """Merge input points closer than ``MERGE_TOL`` (max-norm); representatives sorted."""
    reps: list[np.ndarray] = []
    members: list[list[int]] = []
    for idx, xv in enumerate(j.x):
        for g, r in enumerate(reps):
            if np.max(np.abs(r - xv)) <= MERGE_TOL:
                members[g].append(idx)
                break
        else:
            reps.append(xv)
            members.append([idx])
    order = sorted(range(len(reps)), key=lambda g: tuple(reps[g]))
    return [(reps[g], np.array(members[g])) for g in order]


def shared_inputs(a: DiscreteJoint, b: DiscreteJoint):
    """Pair up the input atoms of ``a`` and ``b``.

    Returns ``[(x, mass, rows_of_a, rows_of_b), ...]`` in a fixed order, or
    raises :class:`RestrictionError` if the input marginals differ.
    """
    _check_dims(a, b, with_x=True)
    ga = _x_groups(a)
    gb = _x_groups(b)
    if len(ga) != len(gb):
        raise RestrictionError(
            f"input supports differ: {len(ga)} distinct points vs {len(gb)}"
        )
    out = []
    for (xa, ia), (xb, ib) in zip(ga, gb):
        if np.max(np.abs(xa - xb)) > MERGE_TOL:
            raise RestrictionError(f"input point {xa.tolist()} has no match in the other joint")
        wa = a.weights[ia].sum()
        wb = b.weights[ib].sum()
        if abs(wa - wb) > MARGINAL_TOL:
            raise RestrictionError(
                f"input point {xa.tolist()} has mass {wa!r} in one joint and {wb!r} in the other"
            )
        out.append((xa, wa, ia, ib))
    return out


def rwd3_couplings(a: DiscreteJoint, b: DiscreteJoint):
    """Optimal RWD3 coupling, one block per shared input point.

    The constraints of the program only link cells with the same input, so the
    coupling is block diagonal. Each block transports the unnormalized slices
    ``Q(y, x)`` and ``Q(y', x)``. Returns ``[(rows_a, rows_b, CouplingPlan)]``.
    """
    blocks = []
    for _, _, ia, ib in shared_inputs(a, b):
        cost = sq_dist(a.y[ia], b.y[ib])
        blocks.append((ia, ib, _transport(cost, a.weights[ia], b.weights[ib])))
    return blocks


def rwd3_discrete(a: DiscreteJoint, b: DiscreteJoint) -> MetricReport:
    total = 0.0
    for _, _, cp in rwd3_couplings(a, b):
        total += cp.objective
    return _report("RWD3", total, a)


def cwd_terms(a: DiscreteJoint, b: DiscreteJoint):
    """Per-input conditional transport costs ``[(x, mass, W(Q_y|x, Q_y'|x))]``."""
    terms = []
    for xv, mass, ia, ib in shared_inputs(a, b):
        pa = a.weights[ia] / a.weights[ia].sum()
        pb = b.weights[ib] / b.weights[ib].sum()
        cost = sq_dist(a.y[ia], b.y[ib])
        terms.append((xv, mass, _transport(cost, pa, pb).objective))
    return terms


def cwd_discrete(a: DiscreteJoint, b: DiscreteJoint) -> MetricReport:
    total = 0.0
    for _, mass, w in cwd_terms(a, b):
        total += mass * w
    return _report("CWD", total, a)


def quantile_w2_1d(samples_a, samples_b) -> float:
    """Squared W2 between two equal-size 1-D empirical measures given sorted samples."""
    sa = np.asarray(samples_a, dtype=np.float64).reshape(-1)
    sb = np.asarray(samples_b, dtype=np.float64).reshape(-1)
    if len(sa) != len(sb):
        raise InputError(f"sample counts differ: {len(sa)} vs {len(sb)}")
    if len(sa) == 0:
        raise InputError("empty samples")
    if np.any(np.diff(sa) < 0) or np.any(np.diff(sb) < 0):
        raise InputError("samples must be sorted ascending")
    d = sa - sb
    return float(np.mean(d * d))


def chain_slacks(a: DiscreteJoint, b: DiscreteJoint) -> dict[str, float]:
    """All four oracle distances plus the slack of each link in the ordering chain."""
    mwd = mwd_discrete(a, b, method="lp").value
    rwd = rwd_discrete(a, b).value
    rwd3 = rwd3_discrete(a, b).value
    cwd = cwd_discrete(a, b).value
    return {
        "MWD": mwd,
        "RWD": rwd,
        "RWD3": rwd3,
        "CWD": cwd,
        "slack_rwd_mwd": rwd - mwd,
        "slack_rwd3_rwd": rwd3 - rwd,
        "slack_cwd_rwd3": cwd - rwd3,
    }


def shuffled_pairing_instance() -> tuple[DiscreteJoint, DiscreteJoint]:
    """Two joints with identical output marginals but swapped input/output pairing.

    The first maps x=0 to y=0 and x=1 to y=1; the second maps them the other
    way round. MWD is 0 and CWD is 1.
    """
    x = [[0.0], [1.0]]
    w = [0.5, 0.5]
    return DiscreteJoint(x, [[0.0], [1.0]], w), DiscreteJoint(x, [[1.0], [0.0]], w)


def random_instance(
    rng: np.random.Generator, max_x: int = 4, max_y: int = 5, max_dim: int = 3
) -> tuple[DiscreteJoint, DiscreteJoint]:
    """Random pair of joints sharing an input marginal.

    Each model draws its own pool of at most ``max_y`` output points; every
    input atom picks a random subset of the pool with random conditional
    weights.
    """
    dx = int(rng.integers(1, max_dim + 1))
    dy = int(rng.integers(1, max_dim + 1))
    kx = int(rng.integers(1, max_x + 1))
    xs = rng.normal(size=(kx, dx))
    px = rng.dirichlet(np.ones(kx))

    def model():
        ky = int(rng.integers(1, max_y + 1))
        pool = rng.normal(size=(ky, dy))
        pts_x, pts_y, ws = [], [], []
        for i in range(kx):
            size = int(rng.integers(1, ky + 1))
            chosen = rng.choice(ky, size=size, replace=False)
            cond = rng.dirichlet(np.ones(size))
            for c, wc in zip(chosen, cond):
                pts_x.append(xs[i])
                pts_y.append(pool[c])
                ws.append(px[i] * wc)
        ws = np.array(ws)
        return DiscreteJoint(np.array(pts_x), np.array(pts_y), ws / ws.sum())

    return model(), model()
