import itertools

import pytest

from ordinaldet.damage_rules import ElementObservation, classify_damage, observation_from_record
from ordinaldet.domain import DamageState, InputError

ROOF = [0, 0.5, 1, 1.99, 2, 5, 10, 14.99, 15, 30, 49.99, 50, 50.01, 75, 90, 100]
WINDOWS = [0, 1, 2, 3, 4, 5, 8]
SECTIONS = [0, 1, 2, 3, 4, 6, 10]
SHEATHING_PCT = [0, 5, 20, 34.99, 35, 50, 60, 100]


def obs(**kw):
    return ElementObservation(**kw)


def test_no_damage():
    assert classify_damage(obs()) == DamageState.DS0


def test_slight_example():
    assert classify_damage(obs(roof_covering_damage=10, windows_doors_failed=1)) == DamageState.DS1


def test_roof_to_wall_is_complete():
    assert classify_damage(obs(roof_to_wall_failure=True)) == DamageState.DS4


@pytest.mark.parametrize(
    "pct, expected",
    [(1.99, 0), (2, 1), (14.99, 1), (15, 2), (49.99, 2), (50, 3), (100, 3)],
)
def test_roof_covering_boundaries(pct, expected):
    assert classify_damage(obs(roof_covering_damage=pct)) == expected


@pytest.mark.parametrize("failed, expected", [(0, 0), (1, 1), (2, 2), (3, 2), (4, 3), (20, 3)])
def test_window_counts(failed, expected):
    assert classify_damage(obs(windows_doors_failed=failed)) == expected


@pytest.mark.parametrize(
    "sections, pct, expected",
    [(0, 0, 0), (1, 2, 2), (3, 10, 2), (4, 20, 3), (4, 34.99, 3), (4, 35, 4), (2, 35, 4), (0, 40, 4)],
)
def test_sheathing(sections, pct, expected):
    obs_ = obs(roof_sheathing_sections_failed=sections, roof_sheathing_failed_pct=pct)
    assert classify_damage(obs_) == expected


def test_worst_element_wins():
    assert classify_damage(obs(roof_covering_damage=60, windows_doors_failed=1)) == DamageState.DS3
    assert classify_damage(obs(roof_covering_damage=3, roof_sheathing_sections_failed=2,
                               roof_sheathing_failed_pct=4)) == DamageState.DS2


@pytest.mark.parametrize(
    "kw",
    [
        {"roof_covering_damage": -1},
        {"roof_covering_damage": 101},
        {"windows_doors_failed": -1},
        {"windows_doors_failed": 1.5},
        {"roof_sheathing_sections_failed": 2, "roof_sheathing_failed_pct": 0},
        {"roof_to_wall_failure": 1},
        {"roof_sheathing_failed_pct": float("nan")},
    ],
)
def test_invalid_observations(kw):
    with pytest.raises(InputError):
        obs(**kw)


def test_record_parsing():
    rec = {"roof_covering_damage": 20, "roof_to_wall_failure": False}
    assert classify_damage(observation_from_record(rec)) == DamageState.DS2
    with pytest.raises(InputError):
        observation_from_record({"roof_damage": 20})


def _grid():
    for roof, win, sec, pct, rtw in itertools.product(ROOF, WINDOWS, SECTIONS, SHEATHING_PCT, (False, True)):
        if sec > 0 and pct == 0:
            continue
        yield (roof, win, sec, pct, rtw)


def _make(point):
    roof, win, sec, pct, rtw = point
    return ElementObservation(roof, win, sec, pct, rtw)


def test_monotone_over_grid():
    axes = [ROOF, WINDOWS, SECTIONS, SHEATHING_PCT, [False, True]]
    grid = set(_grid())
    assert len(grid) > 10_000
    for point in grid:
        state = classify_damage(_make(point))
        assert state in set(DamageState)
        if point[4] or point[3] >= 35:
            assert state == DamageState.DS4
        for axis, values in enumerate(axes):
            i = values.index(point[axis])
            if i + 1 == len(values):
                continue
            bigger = list(point)
            bigger[axis] = values[i + 1]
            if tuple(bigger) in grid:
                assert classify_damage(_make(bigger)) >= state
