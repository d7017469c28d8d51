"""Soft ordinal targets: Gaussian weights about the true class, truncated to
a K-neighbourhood, normalised and scaled by the task-aligned score."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import NUM_CLASSES, DamageState, as_damage_state

PSI_SWEEP = (0.1, 0.3, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class AlignmentParams:
    alpha: float = 1.0  # classification exponent
    beta: float = 6.0  # localisation exponent

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"alpha and beta must be positive, got {self.alpha}, {self.beta}")


@dataclass(frozen=True)
class SoftTargetConfig:
    psi: float = 0.5
    k_neighbors: Optional[int] = None  # None means unbounded
    num_classes: int = NUM_CLASSES

    def __post_init__(self):
        if not (isinstance(self.psi, (int, float)) and math.isfinite(self.psi) and self.psi > 0):
            raise ValueError(f"psi must be a positive real, got {self.psi!r}")
        if self.k_neighbors is not None:
            if isinstance(self.k_neighbors, bool) or not isinstance(self.k_neighbors, int):
                raise ValueError(f"k_neighbors must be an integer or None, got {self.k_neighbors!r}")
            if not 0 <= self.k_neighbors <= self.num_classes - 1:
                raise ValueError(f"k_neighbors must be in 0..{self.num_classes - 1}, got {self.k_neighbors}")
        if self.num_classes != NUM_CLASSES:
            raise ValueError(f"num_classes is fixed at {NUM_CLASSES}")


@dataclass(frozen=True)
class SoftTargetDistribution:
    raw_weights: np.ndarray  # Gaussian weights before truncation
    targets: np.ndarray
    true_class: DamageState
    scale: float

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(k) for k in np.flatnonzero(self.targets))


def task_aligned_score(iou_value: float, p_c: float, params: AlignmentParams = AlignmentParams()) -> float:
    if not 0.0 <= iou_value <= 1.0:
        raise ValueError(f"iou must be in [0, 1], got {iou_value!r}")
    if not 0.0 <= p_c <= 1.0:
        raise ValueError(f"p_c must be in [0, 1], got {p_c!r}")
    return iou_value**params.beta * p_c**params.alpha


def gaussian_weights(true_class: int, psi: float) -> np.ndarray:
    c = as_damage_state(true_class)
    if not (math.isfinite(psi) and psi > 0):
        raise ValueError(f"psi must be positive, got {psi!r}")
    k = np.arange(NUM_CLASSES, dtype=np.float64)
    return np.exp(-((k - c) ** 2) / (2.0 * psi * psi))


def soft_targets(true_class: int, scale: float, config: SoftTargetConfig) -> SoftTargetDistribution:
    c = as_damage_state(true_class)
    if not (0.0 < scale <= 1.0):
        raise ValueError(f"scale must be in (0, 1], got {scale!r}")
    raw = gaussian_weights(c, config.psi)
    w = raw.copy()
    if config.k_neighbors is not None:
        w[np.abs(np.arange(NUM_CLASSES) - c) > config.k_neighbors] = 0.0
    targets = scale * (w / w.sum())
    return SoftTargetDistribution(raw, targets, c, float(scale))
