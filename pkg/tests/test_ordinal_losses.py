import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ordinaldet.gradcheck import central_difference, max_relative_error
from ordinaldet.ordinal_losses import (
    LossConfig,
    bce_soft,
    expected_class,
    focal_soft,
    penalized_loss,
    penalty_factor,
)
from ordinaldet.ordinal_targets import SoftTargetConfig, soft_targets

STEP, RTOL, ATOL = 1e-6, 1e-6, 1e-9
logit = st.floats(-8.0, 8.0)
logits = st.lists(logit, min_size=5, max_size=5).map(np.array)


def one_hot(c, s=1.0):
    y = np.zeros(5)
    y[c] = s
    return y


def naive_bce(z, y):
    total = 0.0
    for zk, yk in zip(z, y):
        p = 1 / (1 + math.exp(-zk))
        total += -yk * math.log(p) - (1 - yk) * math.log(1 - p)
    return total


def naive_focal(z, y, gamma):
    e = [math.exp(v) for v in z]
    p = [v / sum(e) for v in e]
    return -sum(yk * (1 - pk) ** gamma * math.log(pk) for yk, pk in zip(y, p))


def fd(fn, z):
    grad = np.zeros(5)
    for i in range(5):
        up, down = z.copy(), z.copy()
        up[i] += STEP
        down[i] -= STEP
        grad[i] = (fn(up) - fn(down)) / (2 * STEP)
    return grad


def assert_grad_close(analytic, numeric, value):
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    floor = ATOL * max(1.0, abs(value))
    assert np.all((diff <= floor) | (diff < RTOL * scale)), (analytic, numeric)


def test_bce_zero_logits():
    assert bce_soft(np.zeros(5), one_hot(2)).value == pytest.approx(5 * math.log(2), abs=1e-12)


def test_bce_stationary_at_matching_probabilities():
    z = np.array([-1.0, 0.3, 2.0, -0.5, 0.0])
    y = 1 / (1 + np.exp(-z))
    assert np.allclose(bce_soft(z, y).gradient, 0.0, atol=1e-15)


def test_bce_saturation():
    z = np.array([-40.0, -40.0, 40.0, -40.0, -40.0])
    assert bce_soft(z, one_hot(2)).value < 1e-15


def test_bce_stable_for_huge_logits():
    out = bce_soft(np.array([-1000.0, 1000.0, 0.0, 0.0, 0.0]), one_hot(0))
    assert math.isfinite(out.value) and out.value == pytest.approx(2000 + 3 * math.log(2), rel=1e-15)


def test_focal_uniform_logits():
    expected = -(0.8**1.5) * math.log(0.2)
    assert focal_soft(np.zeros(5), one_hot(1), 1.5).value == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(1.1517, abs=1e-4)


def test_focal_gamma_zero_is_cross_entropy():
    z = np.array([0.2, -1.0, 1.5, 0.7, -0.3])
    logp = z - math.log(np.exp(z).sum())
    assert focal_soft(z, one_hot(3), 0.0).value == pytest.approx(-logp[3], abs=1e-12)


def test_focal_saturation():
    assert focal_soft(np.array([0.0, 0.0, 60.0, 0.0, 0.0]), one_hot(2)).value < 1e-20


def test_expected_class():
    assert expected_class(np.zeros(5)) == pytest.approx(2.0, abs=1e-12)
    assert expected_class(np.array([0.0, 0.0, 0.0, 80.0, 0.0])) == pytest.approx(3.0, abs=1e-12)
    assert expected_class(np.log([0.1, 0.2, 0.4, 0.2, 0.1])) == pytest.approx(2.0, abs=1e-12)


def test_penalty_factor_hand_value():
    assert penalty_factor(0.5, 3, 0.1) == 1.25


def test_penalty_disabled_is_identity():
    z = np.array([0.3, -1.2, 2.0, 0.1, 0.4])
    y = soft_targets(2, 0.8, SoftTargetConfig(0.5, 1))
    for base, ref in (("bce", bce_soft(z, y)), ("focal", focal_soft(z, y, 1.5))):
        out = penalized_loss(z, y, 2, LossConfig(lam=0.0), base)
        assert out.value == ref.value
        assert np.array_equal(out.gradient, ref.gradient)
        assert out.factor == 1.0
        assert out.expected_class == pytest.approx(expected_class(z))


def test_zero_distance_factor_is_one():
    out = penalized_loss(np.zeros(5), one_hot(2), 2, LossConfig(lam=5.0), "focal")
    assert out.factor == 1.0
    assert out.value == focal_soft(np.zeros(5), one_hot(2), 1.5).value


def test_baseline_equivalence():
    z = np.array([0.3, -1.2, 2.0, 0.1, 0.4])
    for c in range(5):
        targets = soft_targets(c, 1.0, SoftTargetConfig(0.5, 0))
        assert bce_soft(z, targets).value == pytest.approx(naive_bce(z, one_hot(c)), rel=1e-14)


@given(logits, st.integers(0, 4), st.floats(0.05, 3.0), st.sampled_from([0, 1, 2, None]), st.floats(0.01, 1.0))
def test_values_match_naive_forms(z, c, psi, k, s):
    y = soft_targets(c, s, SoftTargetConfig(psi, k)).targets
    assert bce_soft(z, y).value == pytest.approx(naive_bce(z, y), rel=1e-10, abs=1e-12)
    assert focal_soft(z, y, 1.5).value == pytest.approx(naive_focal(z, y, 1.5), rel=1e-10, abs=1e-12)


@given(logits, st.lists(st.floats(0, 1), min_size=5, max_size=5), st.floats(0, 4))
def test_focal_nonnegative(z, y, gamma):
    assert focal_soft(z, np.array(y), gamma).value >= 0.0


@given(logits, st.integers(0, 4), st.floats(0, 2), st.sampled_from(["bce", "focal"]))
def test_penalty_never_lowers_loss(z, c, lam, base):
    y = one_hot(c, 0.9)
    plain = penalized_loss(z, y, c, LossConfig(lam=0.0), base).value
    out = penalized_loss(z, y, c, LossConfig(lam=lam), base)
    assert out.value >= plain
    if lam == 0 or out.expected_class == c:
        assert out.value == plain
    elif plain > 0 and lam * abs(out.expected_class - c) > 1e-12:
        assert out.value > plain


@given(logits, st.floats(-50, 50), st.lists(st.floats(0, 1), min_size=5, max_size=5))
def test_softmax_ops_shift_invariant(z, shift, y):
    y = np.array(y)
    assert expected_class(z + shift) == pytest.approx(expected_class(z), abs=1e-12)
    assert focal_soft(z + shift, y).value == pytest.approx(focal_soft(z, y).value, abs=1e-12)


def draws(seed, n=100):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        z = rng.normal(0.0, 2.0, size=5)
        c = int(rng.integers(0, 5))
        k = [0, 1, 2, 3, 4, None][int(rng.integers(0, 6))]
        y = soft_targets(c, float(rng.uniform(0.05, 1.0)), SoftTargetConfig(float(rng.uniform(0.1, 3.0)), k))
        yield z, y, c, float(rng.uniform(0.0, 3.0)), float(rng.uniform(0.0, 1.0))


def test_bce_gradient_finite_differences():
    for z, y, *_ in draws(1):
        out = bce_soft(z, y)
        assert_grad_close(out.gradient, fd(lambda v: bce_soft(v, y).value, z), out.value)


def test_focal_gradient_finite_differences():
    for z, y, _, gamma, _ in draws(2):
        out = focal_soft(z, y, gamma)
        assert_grad_close(out.gradient, fd(lambda v: focal_soft(v, y, gamma).value, z), out.value)


@pytest.mark.parametrize("base", ["bce", "focal"])
@pytest.mark.parametrize("detached", [False, True])
def test_penalized_gradient_finite_differences(base, detached):
    for z, y, c, gamma, lam in draws(3 + detached + 2 * (base == "focal")):
        config = LossConfig(gamma, lam, detached)
        out = penalized_loss(z, y, c, config, base)
        if detached:
            inner = penalized_loss(z, y, c, LossConfig(gamma, 0.0), base)
            fn = lambda v: out.factor * penalized_loss(v, y, c, LossConfig(gamma, 0.0), base).value  # noqa: E731
            assert out.factor * inner.value == pytest.approx(out.value, rel=1e-15)
        else:
            fn = lambda v: penalized_loss(v, y, c, config, base).value  # noqa: E731
        assert_grad_close(out.gradient, fd(fn, z), out.value)


def test_package_gradcheck_agrees():
    z = np.array([0.5, -0.2, 1.1, 0.0, -2.0])
    y = one_hot(1, 0.7)
    out = penalized_loss(z, y, 1, LossConfig(1.5, 0.3), "focal")
    numeric = central_difference(lambda v: penalized_loss(v, y, 1, LossConfig(1.5, 0.3), "focal").value, z)
    assert max_relative_error(out.gradient, numeric) < 1e-6


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        bce_soft(np.zeros(4), one_hot(0))
    with pytest.raises(ValueError):
        bce_soft(np.array([0, 0, np.nan, 0, 0]), one_hot(0))
    with pytest.raises(ValueError):
        bce_soft(np.zeros(5), np.array([0, 0, 1.5, 0, 0]))
    with pytest.raises(ValueError):
        LossConfig(gamma=-1)
    with pytest.raises(ValueError):
        penalized_loss(np.zeros(5), one_hot(0), 0, LossConfig(), "hinge")
