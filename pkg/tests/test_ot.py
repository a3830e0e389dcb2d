import numpy as np
import pytest
from scipy.optimize import linprog

from cfid.errors import InputError, NumericalError, RestrictionError
from cfid.ot import (
    DiscreteJoint,
    chain_slacks,
    cwd_discrete,
    cwd_terms,
    mwd_coupling,
    mwd_discrete,
    quantile_w2_1d,
    random_instance,
    rwd3_couplings,
    rwd3_discrete,
    rwd_coupling,
    rwd_discrete,
    shuffled_pairing_instance,
    solve_ot,
)
from cfid.ot import _backend
from cfid.ot.oracle import shared_inputs, sq_dist

KERNELS = sorted(_backend.kernels())


@pytest.fixture(params=KERNELS)
def kernel(request, monkeypatch):
    monkeypatch.setattr(_backend, "transport", _backend.kernels()[request.param])
    return request.param


def highs_transport(cost, p, q, allowed=None):
    """Reference LP value from scipy's HiGHS solver, optionally over a subset of cells."""
    m, n = cost.shape
    allowed = np.ones((m, n), bool) if allowed is None else allowed
    cells = np.argwhere(allowed)
    a_eq = np.zeros((m + n, len(cells)))
    for k, (i, j) in enumerate(cells):
        a_eq[i, k] = 1.0
        a_eq[m + j, k] = 1.0
    res = linprog(cost[allowed], A_eq=a_eq, b_eq=np.concatenate([p, q]), bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


def test_point_mass(kernel):
    assert solve_ot([[3.5]], [1.0], [1.0]).objective == 3.5


def test_identity_matching(kernel):
    cp = solve_ot([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5])
    assert cp.objective == 0.0
    np.testing.assert_array_equal(cp.plan, [[0.5, 0.0], [0.0, 0.5]])


def test_shifted_pair_brute_force(kernel):
    # y in {0, 1} vs yhat in {1, 2}; couplings are [[t, 1/2 - t], [1/2 - t, t]]
    cost = sq_dist(np.array([[0.0], [1.0]]), np.array([[1.0], [2.0]]))
    ts = np.linspace(0.0, 0.5, 5001)
    brute = min(t * cost[0, 0] + (0.5 - t) * (cost[0, 1] + cost[1, 0]) + t * cost[1, 1] for t in ts)
    cp = solve_ot(cost, [0.5, 0.5], [0.5, 0.5])
    assert cp.objective == pytest.approx(brute, abs=1e-12)
    assert cp.objective == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(cp.plan, [[0.5, 0.0], [0.0, 0.5]], atol=1e-15)


def test_matches_highs_on_random_problems(kernel):
    rng = np.random.default_rng(5)
    for t in range(150):
        m, n = (int(v) for v in rng.integers(1, 16, size=2))
        p = rng.dirichlet(np.ones(m))
        q = rng.dirichlet(np.ones(n))
        if t % 4 == 0:
            p, q = np.full(m, 1 / m), np.full(n, 1 / n)
        cost = rng.integers(0, 3, size=(m, n)).astype(float) if t % 3 == 0 else rng.random((m, n)) * 10
        cp = solve_ot(cost, p, q)
        assert cp.objective == pytest.approx(highs_transport(cost, p, q), abs=1e-9)
        np.testing.assert_allclose(cp.plan.sum(axis=1), p, atol=1e-9)
        np.testing.assert_allclose(cp.plan.sum(axis=0), q, atol=1e-9)
        assert cp.plan.min() >= 0.0
        assert cp.objective == pytest.approx(float(np.sum(cp.plan * cost)), abs=1e-9)


def test_backends_agree_bitwise():
    if len(KERNELS) < 2:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(11)
    ks = _backend.kernels()
    for _ in range(50):
        m, n = (int(v) for v in rng.integers(1, 30, size=2))
        cost = rng.random((m, n))
        p, q = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(n))
        q *= p.sum() / q.sum()
        a = ks["python"](cost, p, q, 1e-11, 100000)
        b = ks["cython"](cost, p, q, 1e-11, 100000)
        assert a[1] == b[1] == 0 and a[2] == b[2]
        assert np.array_equal(a[0], b[0])


def test_iteration_cap_is_reported(kernel):
    rng = np.random.default_rng(0)
    cost = rng.random((12, 12))
    w = np.full(12, 1 / 12)
    flow, status, iters = _backend.transport(cost, w, w, 1e-11, 1)
    assert status == 1 and iters == 1


@pytest.mark.parametrize(
    "cost, p, q",
    [
        ([[0.0]], [0.5], [1.0]),
        ([[0.0, 1.0]], [1.0], [1.2, -0.2]),
        ([[0.0, 1.0]], [1.0], [0.5, 0.5, 0.0]),
        ([[np.inf, 1.0]], [1.0], [0.5, 0.5]),
    ],
)
def test_invalid_inputs(cost, p, q):
    with pytest.raises(InputError):
        solve_ot(cost, p, q)


def test_oracle_on_identical_joints(kernel):
    rng = np.random.default_rng(3)
    a, _ = random_instance(rng)
    for f in (mwd_discrete, rwd_discrete, rwd3_discrete, cwd_discrete):
        assert f(a, a).value == pytest.approx(0.0, abs=1e-12)


def test_point_masses():
    a = DiscreteJoint([[0.0]], [[0.0]], [1.0])
    b = DiscreteJoint([[0.0]], [[1.0]], [1.0])
    assert mwd_discrete(a, b).value == 1.0


def test_single_shared_input_reduces_to_mwd(kernel):
    rng = np.random.default_rng(8)
    x = [[0.3, -1.0]] * 4
    a = DiscreteJoint(x, rng.normal(size=(4, 2)), rng.dirichlet(np.ones(4)))
    b = DiscreteJoint(x[:3], rng.normal(size=(3, 2)), rng.dirichlet(np.ones(3)))
    m = mwd_discrete(a, b).value
    assert rwd_discrete(a, b).value == pytest.approx(m, abs=1e-12)
    assert rwd3_discrete(a, b).value == pytest.approx(m, abs=1e-12)
    assert cwd_discrete(a, b).value == pytest.approx(m, abs=1e-12)


def test_quantile_examples():
    assert quantile_w2_1d([0.0, 1.0, 2.0], [0.0, 1.0, 2.0]) == 0.0
    assert quantile_w2_1d([0.0, 0.0], [1.0, 1.0]) == 1.0
    with pytest.raises(InputError):
        quantile_w2_1d([0.0], [0.0, 1.0])
    with pytest.raises(InputError):
        quantile_w2_1d([1.0, 0.0], [0.0, 1.0])


def test_quantile_gaussians():
    rng = np.random.default_rng(17)
    n = 100_000
    a = np.sort(rng.normal(0.0, 1.0, n))
    b = np.sort(rng.normal(1.0, 2.0, n))
    # closed form (0 - 1)^2 + (1 - 2)^2
    assert quantile_w2_1d(a, b) == pytest.approx(2.0, rel=0.05)


def test_mwd_lp_matches_sorted_coupling(kernel):
    rng = np.random.default_rng(21)
    for n in (1, 2, 7, 40):
        ya, yb = rng.normal(size=n), rng.normal(1.0, 2.0, size=n)
        w = np.full(n, 1 / n)
        a = DiscreteJoint(np.zeros(n), ya, w)
        b = DiscreteJoint(np.zeros(n), yb, w)
        lp = mwd_discrete(a, b, method="lp").value
        assert lp == pytest.approx(quantile_w2_1d(np.sort(ya), np.sort(yb)), abs=1e-9)
        assert mwd_discrete(a, b).value == pytest.approx(lp, abs=1e-9)


def test_random_instances_have_shared_input_marginal():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = random_instance(rng)
        shared_inputs(a, b)


def test_rwd_not_below_mwd_on_four_point_joints(kernel):
    rng = np.random.default_rng(4)
    for _ in range(30):
        a = DiscreteJoint(rng.normal(size=(4, 2)), rng.normal(size=(4, 2)), rng.dirichlet(np.ones(4)))
        b = DiscreteJoint(rng.normal(size=(4, 2)), rng.normal(size=(4, 2)), rng.dirichlet(np.ones(4)))
        assert rwd_discrete(a, b).value >= mwd_discrete(a, b).value - 1e-9


def test_chain_on_random_instances(kernel):
    rng = np.random.default_rng(99)
    for _ in range(200 if kernel == "cython" else 60):
        a, b = random_instance(rng)
        s = chain_slacks(a, b)
        for k in ("slack_rwd_mwd", "slack_rwd3_rwd", "slack_cwd_rwd3"):
            assert s[k] >= -1e-9, (k, s)


def test_rwd3_against_global_lp(kernel):
    # independent route: RWD3 as one LP over all (i, j) cells with matching inputs
    rng = np.random.default_rng(123)
    for _ in range(40):
        a, b = random_instance(rng)
        allowed = np.zeros((a.size, b.size), bool)
        for _, _, ia, ib in shared_inputs(a, b):
            allowed[np.ix_(ia, ib)] = True
        ref = highs_transport(sq_dist(a.y, b.y), a.weights, b.weights, allowed)
        assert rwd3_discrete(a, b).value == pytest.approx(ref, abs=1e-9)


def test_lifted_rwd3_plan_is_feasible_for_rwd(kernel):
    rng = np.random.default_rng(7)
    for _ in range(50):
        a, b = random_instance(rng)
        lifted = np.zeros((a.size, b.size))
        for ia, ib, cp in rwd3_couplings(a, b):
            lifted[np.ix_(ia, ib)] = cp.plan
        np.testing.assert_allclose(lifted.sum(axis=1), a.weights, atol=1e-9)
        np.testing.assert_allclose(lifted.sum(axis=0), b.weights, atol=1e-9)
        rwd_cost = sq_dist(a.y, b.y) + sq_dist(a.x, b.x)
        assert np.sum(lifted * rwd_cost) == pytest.approx(rwd3_discrete(a, b).value, abs=1e-12)
        assert np.sum(lifted * rwd_cost) >= rwd_discrete(a, b).value - 1e-9


def test_projected_rwd_plan_is_feasible_for_mwd(kernel):
    rng = np.random.default_rng(8)
    for _ in range(50):
        a, b = random_instance(rng)
        plan = rwd_coupling(a, b).plan
        np.testing.assert_allclose(plan.sum(axis=1), a.weights, atol=1e-9)
        np.testing.assert_allclose(plan.sum(axis=0), b.weights, atol=1e-9)
        y_cost = float(np.sum(plan * sq_dist(a.y, b.y)))
        assert y_cost >= mwd_coupling(a, b).objective - 1e-9
        assert y_cost <= rwd_discrete(a, b).value + 1e-12


def test_symmetry(kernel):
    rng = np.random.default_rng(10)
    for _ in range(40):
        a, b = random_instance(rng)
        for f in (mwd_discrete, rwd_discrete, rwd3_discrete, cwd_discrete):
            assert f(a, b).value == pytest.approx(f(b, a).value, abs=1e-9)


def test_shuffled_pairing(kernel):
    a, b = shuffled_pairing_instance()
    assert mwd_discrete(a, b, method="lp").value == 0.0
    assert cwd_discrete(a, b).value == pytest.approx(1.0)
    assert rwd3_discrete(a, b).value == pytest.approx(1.0)
    assert rwd_discrete(a, b).value == pytest.approx(1.0)


def test_cwd_terms_are_weighted_conditionals():
    a, b = shuffled_pairing_instance()
    terms = cwd_terms(a, b)
    assert [t[1] for t in terms] == [0.5, 0.5]
    assert [t[2] for t in terms] == [1.0, 1.0]


def test_restriction_violations():
    a = DiscreteJoint([[0.0], [1.0]], [[0.0], [1.0]], [0.5, 0.5])
    b = DiscreteJoint([[0.0], [2.0]], [[0.0], [1.0]], [0.5, 0.5])
    c = DiscreteJoint([[0.0], [1.0]], [[0.0], [1.0]], [0.25, 0.75])
    d = DiscreteJoint([[0.0]], [[0.0]], [1.0])
    for other in (b, c, d):
        with pytest.raises(RestrictionError):
            cwd_discrete(a, other)
        with pytest.raises(RestrictionError):
            rwd3_discrete(a, other)


def test_input_merge_tolerance():
    a = DiscreteJoint([[0.0], [0.0]], [[0.0], [1.0]], [0.5, 0.5])
    b = DiscreteJoint([[1e-13]], [[0.5]], [1.0])
    assert cwd_discrete(a, b).value == pytest.approx(0.25)


def test_duplicate_support_points_add_up():
    a = DiscreteJoint([[0.0], [0.0]], [[1.0], [1.0]], [0.5, 0.5])
    b = DiscreteJoint([[0.0]], [[1.0]], [1.0])
    assert cwd_discrete(a, b).value == 0.0


def test_discrete_joint_validation():
    with pytest.raises(InputError):
        DiscreteJoint([[0.0]], [[0.0]], [0.9])
    with pytest.raises(InputError):
        DiscreteJoint([[0.0], [1.0]], [[0.0]], [0.5, 0.5])
    with pytest.raises(InputError):
        DiscreteJoint([[np.nan]], [[0.0]], [1.0])


def test_python_fallback_iteration_cap_raises(monkeypatch):
    monkeypatch.setattr(_backend, "transport", lambda *args: (None, 1, 5))
    with pytest.raises(NumericalError):
        solve_ot([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5])
