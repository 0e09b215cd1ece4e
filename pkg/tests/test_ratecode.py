import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from klinokinesis.lif import NeuronParams, run_constant_drive
from klinokinesis.ratecode import (DEFAULT_LEVELS, DEFAULT_TABLE, CalibrationError, LevelTable,
                                   SensoryEncoder, calibrate_sensory, decode_count, default_encoder,
                                   level_to_period, period_to_level, periodic_train, quantize,
                                   sensory_drive, spikes_per_window)


@pytest.mark.parametrize("c,level", [(0.55, 0.5), (6.7, 6.7), (-1.1, None), (0.0999, None),
                                     (0.1, 0.1), (100.0, 6.7), (5.0, 3.4), (1.3, 1.2)])
def test_quantize_examples(c, level):
    assert quantize(c) == level


def test_quantize_boundary_float_noise():
    # 0.6 - 0.1 + 0.1 + ... style sums land just below a level; they must not drop a cell
    assert quantize(0.1 + 0.2 + 0.3) == 0.6
    assert quantize(0.6 - 1e-12) == 0.6
    assert quantize(0.6 - 1e-6) == 0.5


def test_quantize_rejects_non_finite():
    with pytest.raises(ValueError):
        quantize(float("nan"))


@pytest.mark.parametrize("level,period", [(6.7, 2), (3.4, 3), (2.3, 4), (1.8, 5), (0.1, 17)])
def test_level_to_period_examples(level, period):
    assert level_to_period(level) == period
    assert period_to_level(period) == level


def test_level_to_period_rejects_non_member():
    with pytest.raises(ValueError):
        level_to_period(0.55)


def test_period_mapping_is_bijective():
    periods = [level_to_period(lvl) for lvl in DEFAULT_TABLE]
    assert sorted(periods) == list(range(2, 18))


def test_sensory_drive():
    assert sensory_drive(None) == 0.0
    assert sensory_drive(6.7) == 6.7


def test_window_counts(encoder):
    # [DERIVED] floor(1000 / period) for periods 2..17, checked on the emitted trains
    expected = {lvl: 1000 // (len(DEFAULT_LEVELS) - i + 1) for i, lvl in enumerate(DEFAULT_LEVELS)}
    assert expected[6.7] == 500 and expected[3.4] == 333 and expected[2.3] == 250
    assert expected[1.8] == 200 and expected[0.1] == 58
    for lvl, n in expected.items():
        assert encoder.count(lvl) == n
    assert encoder.count(None) == 0
    counts = [encoder.count(lvl) for lvl in DEFAULT_LEVELS]
    assert all(a < b for a, b in zip(counts, counts[1:]))


def test_trains_are_periodic_with_phase_reset(encoder):
    tr = encoder.train(3.4)
    assert list(np.flatnonzero(tr)[:3]) == [2, 5, 8]
    assert set(np.diff(np.flatnonzero(tr))) == {3}
    assert not tr.flags.writeable


def test_periodic_train():
    assert list(periodic_train(2, 6)) == [False, True, False, True, False, True]
    assert not periodic_train(None, 5).any()


def test_round_trip(encoder):
    for lvl in DEFAULT_TABLE:
        assert decode_count(encoder.count(lvl), 1000) == lvl
    assert decode_count(0, 1000) is None
    with pytest.raises(ValueError):
        decode_count(7, 1000)


def test_aliasing_between_top_levels(encoder):
    for c in np.linspace(3.4, 6.7, 50)[1:-1]:
        assert encoder.count(quantize(c)) == 333


@given(st.floats(0.1, 1e6))
def test_quantize_idempotent(c):
    q = quantize(c)
    assert quantize(q) == q


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_quantize_monotone(a, b):
    a, b = min(a, b), max(a, b)
    qa, qb = quantize(a), quantize(b)
    assert qa is None or (qb is not None and qa <= qb)


def test_default_table_needs_synthesis():
    cal = calibrate_sensory(DEFAULT_TABLE, 1000)
    assert cal.synthesized and cal.params is None
    assert cal.searched == 6000 and 0 < cal.matched_levels < 16
    with pytest.raises(CalibrationError):
        calibrate_sensory(DEFAULT_TABLE, 1000, allow_synthesis=False)


def test_single_level_table_calibrates_with_isi_two():
    table = LevelTable((6.7,))
    cal = calibrate_sensory(table, 1000, allow_synthesis=False)
    assert not cal.synthesized
    train = run_constant_drive(cal.params, 6.7, 1000)
    assert set(np.diff(np.flatnonzero(train))) == {2}
    enc = SensoryEncoder(cal)
    assert enc.count(6.7) == 500


def test_empty_table_is_an_error():
    with pytest.raises(ValueError):
        calibrate_sensory(LevelTable(()), 1000)


def test_window_too_short_for_calibration():
    with pytest.raises(CalibrationError):
        calibrate_sensory(DEFAULT_TABLE, 20)


@pytest.mark.parametrize("levels", [(), (0.2, 0.1), (0.1, 0.1), (0.1, float("inf"))])
def test_level_table_validation(levels):
    with pytest.raises(ValueError):
        LevelTable(levels)


def test_cell_width():
    assert DEFAULT_TABLE.cell_width(0.5) == pytest.approx(0.1)
    assert DEFAULT_TABLE.cell_width(1.24) == pytest.approx(0.2)
    assert DEFAULT_TABLE.cell_width(6.7) == pytest.approx(3.3)


def test_short_window_counts_alias():
    # 34 steps: periods 16 and 17 both give 2 spikes, so distinct counts need longer windows
    enc = default_encoder(34)
    assert enc.count(0.1) == enc.count(0.2) == 2
    assert spikes_per_window(2, 34) == 17
