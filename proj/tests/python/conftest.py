import os
import pathlib

import pytest


@pytest.fixture
def data_dir():
    return pathlib.Path(os.environ.get("ROADFUSE_TEST_DATA", pathlib.Path(__file__).parents[1] / "data"))


@pytest.fixture
def cli():
    path = os.environ.get("ROADFUSE_CLI")
    if not path:
        pytest.skip("ROADFUSE_CLI not set")
    return path
