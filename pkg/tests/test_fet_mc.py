import json
import math

import numpy as np
import pytest

from levyexit import fet_mc
from levyexit.fet_mc import BatchValidationError, EmpiricalFet, dkw_epsilon


def test_quantile_example():
    fet = EmpiricalFet.from_times([4, 1, 3, 2])
    assert fet.quantile(0.5) == 2.0
    assert fet.quantile(0.0) == 1.0
    assert fet.quantile(1.0) == 4.0
    assert fet.quantile(0.26) == 2.0


def test_quantile_domain():
    fet = EmpiricalFet.from_times([1.0])
    with pytest.raises(ValueError):
        fet.quantile(1.5)
    with pytest.raises(ValueError):
        EmpiricalFet.from_times([]).quantile(0.5)


def test_cdf_at_right_continuous():
    fet = EmpiricalFet.from_times([1, 2, 2, 3])
    np.testing.assert_allclose(fet.cdf_at([0.5, 1, 2, 2.5, 3]), [0, 0.25, 0.75, 0.75, 1.0])
    assert fet.cdf_at(2) == 0.75


def test_merge_and_counts():
    a = EmpiricalFet.from_times([3, 1], abandoned=1)
    b = EmpiricalFet.from_times([2])
    m = a.merge(b)
    np.testing.assert_array_equal(m.sorted_times, [1, 2, 3])
    assert m.trials == 4 and m.abandoned == 1


def test_validation_limit():
    EmpiricalFet(np.ones(1000), 1001, 1).validate()
    with pytest.raises(BatchValidationError):
        EmpiricalFet(np.ones(997), 1000, 3).validate()


def test_dkw_epsilon():
    assert dkw_epsilon(10**5) == pytest.approx(math.sqrt(math.log(200) / 2e5))


def test_run_batch_walk_floor_and_coupling():
    f = fet_mc.run_batch("flight", 1.5, 2.0**12, 0.25, 2000, 3)
    w = fet_mc.run_batch("walk", 1.5, 2.0**12, 0.25, 2000, 3)
    r = 0.25 * 64
    assert w.sorted_times.min() >= r
    np.testing.assert_array_equal(f.records.step_count, w.records.step_count)
    assert w.quantile(0.5) >= f.quantile(0.5) - 1


def test_cap_triggers_validation():
    with pytest.raises(BatchValidationError):
        fet_mc.run_batch("flight", 2.0, 2.0**14, 0.45, 200, 0, cap=3)
    fet = fet_mc.run_batch("flight", 2.0, 2.0**14, 0.45, 200, 0, cap=3, validate=False)
    assert fet.abandoned > 0 and fet.trials == 200


@pytest.mark.parametrize("workers", [1, 2])
def test_independent_of_worker_count(workers):
    ref = fet_mc.simulate_batch(fet_mc.StepLaw(1.2, 2.0**12), 16.0, 2500, 11, workers=1)
    got = fet_mc.simulate_batch(fet_mc.StepLaw(1.2, 2.0**12), 16.0, 2500, 11, workers=workers)
    np.testing.assert_array_equal(ref.walk_time, got.walk_time)


def test_block_size_changes_stream_but_not_law():
    a = fet_mc.simulate_batch(fet_mc.StepLaw(1.0, 2.0**10), 8.0, 3000, 1, block=1024)
    b = fet_mc.simulate_batch(fet_mc.StepLaw(1.0, 2.0**10), 8.0, 3000, 1, block=1024)
    np.testing.assert_array_equal(a.step_count, b.step_count)


def test_write_batch(tmp_path):
    fet = fet_mc.run_batch("walk", 1.0, 2.0**10, 0.25, 5, 2)
    fet_mc.write_batch(fet, tmp_path / "t.csv", tmp_path / "t.json", extra={"note": 1})
    text = (tmp_path / "t.csv").read_bytes()
    assert b"\r" not in text
    lines = text.decode().splitlines()
    assert lines[0] == "trial_index,exit_time,step_count,truncated_last"
    assert len(lines) == 6
    meta = json.loads((tmp_path / "t.json").read_text())
    assert meta["model"] == "walk" and meta["trials"] == 5 and meta["note"] == 1


def test_csv_number_format(tmp_path):
    fet_mc.write_csv(tmp_path / "x.csv", ("a", "b", "c"), [(1 / 3, 7, float("nan"))])
    assert (tmp_path / "x.csv").read_text() == "a,b,c\n0.333333333333,7,\n"
