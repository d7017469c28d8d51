"""Soft-target classification losses with analytic gradients.

Two base losses are provided, BCE-with-logits over independent sigmoids and
softmax focal loss, plus a multiplicative ordinal-distance penalty
``(1 + lam * |c_hat - c|)`` where ``c_hat`` is the softmax expected class.
Every function returns the loss for a single sample and its gradient with
respect to the logits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .domain import NUM_CLASSES, as_damage_state
from .ordinal_targets import SoftTargetDistribution

Targets = Union[SoftTargetDistribution, np.ndarray, list]
BASES = ("bce", "focal")


@dataclass(frozen=True)
class LossConfig:
    gamma: float = 1.5
    lam: float = 0.0
    detach_penalty: bool = False

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")


@dataclass(frozen=True)
class LossOutput:
    value: float
    gradient: np.ndarray
    expected_class: Optional[float] = None
    factor: float = 1.0


def _logits(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (NUM_CLASSES,):
        raise ValueError(f"expected {NUM_CLASSES} logits, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    return z


def _targets(targets: Targets) -> np.ndarray:
    y = targets.targets if isinstance(targets, SoftTargetDistribution) else targets
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (NUM_CLASSES,):
        raise ValueError(f"expected {NUM_CLASSES} targets, got shape {y.shape}")
    if np.any(y < 0) or np.any(y > 1):
        raise ValueError("targets must lie in [0, 1]")
    return y


def sigmoid(z: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max()
    return shifted - np.log(np.exp(shifted).sum())


def softmax(z) -> np.ndarray:
    shifted = np.asarray(z, dtype=np.float64) - np.max(z)
    e = np.exp(shifted)
    return e / e.sum()


def _one_minus_softmax(z: np.ndarray) -> np.ndarray:
    # sum of the other classes' mass; keeps precision when p_k is close to 1
    e = np.exp(z - z.max())
    return (e.sum() - e) / e.sum()


def bce_soft(z, targets: Targets) -> LossOutput:
    z = _logits(z)
    y = _targets(targets)
    # -y log s(z) - (1-y) log(1-s(z)) == softplus(z) - y z
    value = float(np.sum(np.logaddexp(0.0, z) - y * z))
    return LossOutput(value, sigmoid(z) - y)


def focal_soft(z, targets: Targets, gamma: float = 1.5) -> LossOutput:
    if not gamma >= 0:
        raise ValueError(f"gamma must be >= 0, got {gamma!r}")
    z = _logits(z)
    y = _targets(targets)
    logp = log_softmax(z)
    p = np.exp(logp)
    q = _one_minus_softmax(z)
    if gamma == 0:
        mod = np.ones(NUM_CLASSES)
        g = mod
    else:
        mod = q**gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            dmod = np.where(q > 0, gamma * mod * p * logp / q, 0.0)
        g = mod - dmod
    value = float(-np.sum(y * mod * logp))
    gradient = -(y * g - p * np.sum(y * g))
    return LossOutput(value, gradient)


def expected_class(z) -> float:
    p = softmax(_logits(z))
    return float(np.dot(np.arange(NUM_CLASSES), p))


def _expected_class_grad(z: np.ndarray) -> tuple[float, np.ndarray]:
    p = softmax(z)
    c_hat = float(np.dot(np.arange(NUM_CLASSES), p))
    return c_hat, p * (np.arange(NUM_CLASSES) - c_hat)


def penalty_factor(c_hat: float, true_class: int, lam: float) -> float:
    return 1.0 + lam * abs(c_hat - true_class)


def base_loss(z, targets: Targets, base: str, gamma: float = 1.5) -> LossOutput:
    if base == "bce":
        return bce_soft(z, targets)
    if base == "focal":
        return focal_soft(z, targets, gamma)
    raise ValueError(f"unknown base loss {base!r}, expected one of {BASES}")


def penalized_loss(z, targets: Targets, true_class: int, config: LossConfig = LossConfig(), base: str = "bce") -> LossOutput:
    """Base loss scaled by ``1 + lam * |c_hat - c|``.

    The gradient includes the factor's dependence on the logits through
    ``c_hat`` unless ``config.detach_penalty`` is set. The subgradient of
    ``|c_hat - c|`` at zero is taken as 0.
    """
    z = _logits(z)
    c = int(as_damage_state(true_class))
    inner = base_loss(z, targets, base, config.gamma)
    c_hat, dc_hat = _expected_class_grad(z)
    if config.lam == 0:
        return LossOutput(inner.value, inner.gradient, c_hat, 1.0)
    factor = penalty_factor(c_hat, c, config.lam)
    gradient = factor * inner.gradient
    if not config.detach_penalty:
        gradient = gradient + config.lam * np.sign(c_hat - c) * dc_hat * inner.value
    return LossOutput(factor * inner.value, gradient, c_hat, factor)
