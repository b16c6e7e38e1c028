import numpy as np
import pytest

from ecspade import verify
from ecspade.verify import Check


def test_check_line_format():
    assert Check("x", True, 1e-9, 1e-6, "n=3").line().startswith("[PASS] x ")
    assert Check("x", False, 2.0, 1.0).line().startswith("[FAIL]")


@pytest.mark.parametrize("seed", [1, 2])
def test_battery_passes_for_other_seeds(seed):
    checks = verify.run_all(seed=seed)
    assert len({c.name for c in checks}) == len(checks)
    failed = [c.line() for c in checks if not c.passed]
    assert not failed


def test_pixel_generators():
    model, ctx = verify.fig1_setup()
    X = verify.mixed_pixels(model, ctx, 4000, seed=3)
    assert X.shape == (4000, 10) and np.all(np.isfinite(X))
    Y = verify.wide_pixels(model, ctx, 4000, seed=3)
    assert not np.array_equal(X, Y)
    # roughly half the pixels carry the target, visible as a shift in band 0
    assert 0.4 < np.mean(X[:, 0] > 2 + 0.2 * 15 / 2) < 0.7


def test_random_spd_condition():
    rng = np.random.default_rng(0)
    R = verify.random_spd(rng, 6, cond=50)
    eig = np.linalg.eigvalsh(R)
    assert np.allclose(R, R.T) and eig.min() > 0
    assert eig.max() / eig.min() == pytest.approx(50, rel=1e-8)
