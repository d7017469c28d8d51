"""Damage-state decision matrix for wood-frame residential archetypes T1-T5.

Each observed element maps to a damage level on its own; the building's
state is the most severe of those levels. Boundary values go to the more
severe bucket.

=====================  =====  =====  =========  ===================  ============
element                DS0    DS1    DS2        DS3                  DS4
=====================  =====  =====  =========  ===================  ============
roof covering (%)      <2     2-15   15-50      >=50                 (not alone)
windows/doors failed   0      1      2-3        >3                   (not alone)
roof sheathing         none   none   1-3 secs   >3 secs and <35%     >=35%
roof-to-wall failure   no     no     no         no                   yes
=====================  =====  =====  =========  ===================  ============
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .domain import DamageState, InputError

ROOF_COVERING_BOUNDS = (2.0, 15.0, 50.0)
SHEATHING_COMPLETE_PCT = 35.0


@dataclass(frozen=True)
class ElementObservation:
    roof_covering_damage: float = 0.0  # percent of roof covering damaged
    windows_doors_failed: int = 0
    roof_sheathing_sections_failed: int = 0
    roof_sheathing_failed_pct: float = 0.0
    roof_to_wall_failure: bool = False

    def __post_init__(self):
        for name in ("roof_covering_damage", "roof_sheathing_failed_pct"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InputError(f"{name} must be a finite number, got {value!r}", name)
            if not 0.0 <= value <= 100.0:
                raise InputError(f"{name} must be within [0, 100], got {value}", name)
        for name in ("windows_doors_failed", "roof_sheathing_sections_failed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise InputError(f"{name} must be a non-negative integer, got {value!r}", name)
        if not isinstance(self.roof_to_wall_failure, bool):
            raise InputError(f"roof_to_wall_failure must be a boolean, got {self.roof_to_wall_failure!r}",
                             "roof_to_wall_failure")
        if self.roof_sheathing_sections_failed > 0 and self.roof_sheathing_failed_pct <= 0:
            raise InputError("failed sheathing sections require a positive failed percentage",
                             "roof_sheathing_failed_pct")


def roof_covering_level(pct: float) -> DamageState:
    low, mid, high = ROOF_COVERING_BOUNDS
    if pct < low:
        return DamageState.DS0
    if pct < mid:
        return DamageState.DS1
    if pct < high:
        return DamageState.DS2
    return DamageState.DS3


def windows_doors_level(failed: int) -> DamageState:
    if failed == 0:
        return DamageState.DS0
    if failed == 1:
        return DamageState.DS1
    if failed <= 3:
        return DamageState.DS2
    return DamageState.DS3


def sheathing_level(sections: int, pct: float) -> DamageState:
    # an intact sheathing does not separate DS0 from DS1
    if pct >= SHEATHING_COMPLETE_PCT:
        return DamageState.DS4
    if sections > 3:
        return DamageState.DS3
    if sections >= 1:
        return DamageState.DS2
    return DamageState.DS0


def classify_damage(obs: ElementObservation) -> DamageState:
    if obs.roof_to_wall_failure:
        return DamageState.DS4
    return max(
        roof_covering_level(obs.roof_covering_damage),
        windows_doors_level(obs.windows_doors_failed),
        sheathing_level(obs.roof_sheathing_sections_failed, obs.roof_sheathing_failed_pct),
    )


def observation_from_record(record: dict) -> ElementObservation:
    if not isinstance(record, dict):
        raise InputError(f"expected an object, got {type(record).__name__}")
    known = set(ElementObservation.__dataclass_fields__)
    unknown = sorted(set(record) - known)
    if unknown:
        raise InputError(f"unknown fields {unknown}")
    return ElementObservation(**record)
