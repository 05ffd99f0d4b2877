# conftest.py
import json

import pytest
from fastapi.testclient import TestClient

from app.main import app


##########################################################################################
# CONFIGS

@pytest.fixture
def tiny_config(tmp_path):
    """Two coarse grid sizes and two seeds on the unit square."""
    return {
        "params": {"d": 2, "s": 0.5, "p": 2.0, "ell": 0.0, "alpha": 0.0, "c": 1.0,
                   "C_tilde": 0.5},
        "eps_sequence": [0.25, 0.125],
        "seeds": [0, 1],
        "workers": 1,
        "output": str(tmp_path / "artifacts"),
    }


@pytest.fixture
def config_file(tmp_path, tiny_config):
    """Factory writing a config (the tiny one updated with `changes`) to a JSON file."""
    def _write(name="config.json", **changes):
        path = tmp_path / name
        path.write_text(json.dumps({**tiny_config, **changes}))
        return str(path)
    return _write


##########################################################################################
# SERVICE

@pytest.fixture
def client():
    """Fixture that sets up a TestClient for testing purposes."""
    with TestClient(app) as client:
        yield client
