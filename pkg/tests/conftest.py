from __future__ import annotations

import pytest

from jobtuner.paramspace import ParamSpace, parse_param_file

from helpers import UNIT_SQUARE_PARAMS


@pytest.fixture
def two_param_space() -> ParamSpace:
    return parse_param_file(
        "mapreduce.reduce.tasks int min=1 max=16 step=1\n"
        "mapreduce.task.io.sort.mb int min=64 max=512 step=64\n"
    )


@pytest.fixture
def unit_square_space() -> ParamSpace:
    return parse_param_file(UNIT_SQUARE_PARAMS)
