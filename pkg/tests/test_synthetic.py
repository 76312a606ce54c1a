from __future__ import annotations

import numpy as np
import pytest

from jobtuner.errors import DimensionMismatchError
from jobtuner.executors.base import JobSpec
from jobtuner.executors.synthetic import SurfaceSpec, SyntheticExecutor, synthetic_eval
from jobtuner.paramspace import TrialPoint, parse_param_file

BOWL = SurfaceSpec(family="bowl", base_s=100.0, weights=(200.0, 100.0),
                   optimum=(0.8, 0.9))
NOISY_BOWL = SurfaceSpec(family="bowl", base_s=100.0, weights=(200.0, 100.0),
                         optimum=(0.8, 0.9), noise_sd_s=5.0, seed=42)


def test_bowl_value_at_optimum_is_base():
    assert synthetic_eval(BOWL, [0.8, 0.9], 1, 1) == 100.0


def test_bowl_hand_value():
    # 100 + 200 * 0.25 + 100 * 0.25 = 175
    assert synthetic_eval(BOWL, [0.3, 0.4], 1, 1) == pytest.approx(175.0, abs=1e-12)


def test_same_counter_same_value():
    a = synthetic_eval(NOISY_BOWL, [0.3, 0.4], 7, 2)
    b = synthetic_eval(NOISY_BOWL, [0.3, 0.4], 7, 2)
    assert a == b


def test_distinct_counters_differ():
    a = synthetic_eval(NOISY_BOWL, [0.3, 0.4], 7, 1)
    b = synthetic_eval(NOISY_BOWL, [0.3, 0.4], 7, 2)
    c = synthetic_eval(NOISY_BOWL, [0.3, 0.4], 8, 1)
    assert len({a, b, c}) == 3


def test_noise_sample_sd_matches_parameter():
    draws = np.array(
        [synthetic_eval(NOISY_BOWL, [0.3, 0.4], t, 1) for t in range(1, 10_001)]
    )
    sd = draws.std(ddof=1)
    assert abs(sd - 5.0) / 5.0 < 0.05


def test_noise_is_zero_mean():
    draws = np.array(
        [synthetic_eval(NOISY_BOWL, [0.3, 0.4], t, 1) for t in range(1, 10_001)]
    )
    assert abs(draws.mean() - 175.0) < 0.25  # 3 sigma of the mean is ~0.15


def test_plane_family_minimum_at_ones_corner():
    plane = SurfaceSpec(family="monotone_plane_basin", base_s=60.0, weights=(10.0, 20.0))
    assert synthetic_eval(plane, [1.0, 1.0], 1, 1) == 60.0
    assert synthetic_eval(plane, [0.0, 0.0], 1, 1) == pytest.approx(90.0)
    assert synthetic_eval(plane, [0.5, 1.0], 1, 1) == pytest.approx(65.0)


def test_rosenbrock_family():
    rosen = SurfaceSpec(family="rosenbrock", base_s=50.0, weights=(1.0, 1.0),
                        optimum=(1.0, 1.0))
    assert synthetic_eval(rosen, [1.0, 1.0], 1, 1) == 50.0
    # 50 + 100*(0.5 - 0.25)^2 + (1 - 0.5)^2 = 50 + 6.25 + 0.25
    assert synthetic_eval(rosen, [0.5, 0.5], 1, 1) == pytest.approx(56.5)


def test_lookup_table_nearest_cell():
    table = SurfaceSpec(
        family="lookup_table", base_s=1.0,
        table=(((0.0, 0.0), 120.0), ((1.0, 1.0), 95.0)),
    )
    assert synthetic_eval(table, [0.1, 0.2], 1, 1) == 120.0
    assert synthetic_eval(table, [0.9, 0.7], 1, 1) == 95.0


def test_runtime_floor():
    tiny = SurfaceSpec(family="bowl", base_s=0.002, weights=(1.0,), optimum=(0.5,),
                       noise_sd_s=1.0, seed=3)
    values = [synthetic_eval(tiny, [0.5], t, 1) for t in range(1, 200)]
    assert min(values) >= 0.001


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        synthetic_eval(BOWL, [0.5], 1, 1)


def test_invalid_surfaces():
    with pytest.raises(ValueError):
        SurfaceSpec(family="volcano", base_s=1.0)
    with pytest.raises(ValueError):
        SurfaceSpec(family="bowl", base_s=0.0, weights=(1.0,), optimum=(0.5,))
    with pytest.raises(ValueError):
        SurfaceSpec(family="bowl", base_s=1.0, weights=(-1.0,), optimum=(0.5,))
    with pytest.raises(ValueError):
        SurfaceSpec(family="rosenbrock", base_s=1.0, weights=(1.0,), optimum=(0.5,))
    with pytest.raises(ValueError):
        SurfaceSpec(family="lookup_table", base_s=1.0)


def test_executor_repetition_cardinality():
    space = parse_param_file("a float min=0 max=1 step=0.01\nb float min=0 max=1 step=0.01")
    executor = SyntheticExecutor(space, NOISY_BOWL)
    result = executor.execute_trial(
        JobSpec(repetitions=3), TrialPoint({"a": 0.25, "b": 0.5}), trial_id=4
    )
    assert result.status == "success"
    assert len(result.rep_times_s) == 3


def test_executor_purity():
    space = parse_param_file("a float min=0 max=1 step=0.01\nb float min=0 max=1 step=0.01")
    executor = SyntheticExecutor(space, NOISY_BOWL)
    job = JobSpec(repetitions=5)
    point = TrialPoint({"a": 0.25, "b": 0.5})
    first = executor.execute_trial(job, point, trial_id=2)
    second = executor.execute_trial(job, point, trial_id=2)
    assert first == second
