import numpy as np
import pytest

from cfid.stats import CondPairStats


def random_psd(rng, d, rank=None, scale=1.0):
    k = d if rank is None else rank
    w = rng.normal(size=(d, k)) * scale
    return w @ w.T


def random_pair_stats(rng, max_dim=8, dx=None, dy=None, rank_deficient=False):
    """Random CondPairStats from one (x, y, yhat) covariance, so both joints are PSD."""
    dx = dx or int(rng.integers(1, max_dim + 1))
    dy = dy or int(rng.integers(1, max_dim + 1))
    d = dx + 2 * dy
    k = int(rng.integers(1, d + 1)) if rank_deficient else d + 2
    c = random_psd(rng, d, rank=k)
    xs, ys, hs = slice(0, dx), slice(dx, dx + dy), slice(dx + dy, d)
    return CondPairStats(
        mean_x=rng.normal(size=dx), c_xx=c[xs, xs],
        mean_y=rng.normal(size=dy), c_yx=c[ys, xs], c_yy=c[ys, ys],
        mean_yhat=rng.normal(size=dy), c_yhatx=c[hs, xs], c_yhatyhat=c[hs, hs],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_criteria = []


@pytest.fixture
def criterion(request):
    """Record an acceptance criterion label and measured details for the summary."""
    def record(label, **detail):
        request.node.user_properties.append(("criterion", label))
        request.node.user_properties.append(("detail", detail))
        return detail
    return record


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _criteria.append((props["criterion"], report.outcome, props.get("detail", {})))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, detail in sorted(_criteria, key=lambda c: c[0]):
        extra = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in detail.items())
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'} {label}  {extra}")
