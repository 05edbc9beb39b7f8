import functools
import json
import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from metapop_hj.model import ModelParams

settings.register_profile("default", deadline=None, max_examples=40)
settings.register_profile("ci", deadline=None, max_examples=15)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ORACLES = json.loads((Path(__file__).parent / "oracles" / "oracles.json").read_text())

SYM_MONO = ModelParams.symmetric(1.5, 0.5, 1.0, 1.2, 1.0)
SYM_DIM = ModelParams.symmetric(1.0, 1.0, 1.0, 0.5, 1.0)
ASYM_MONO = ModelParams(1.6, 1.4, 0.5, 0.5, 1.0, 1.0, 1.2, 1.2, 1.0)


def oracle_params(name: str) -> ModelParams:
    return ModelParams.from_mapping(ORACLES["configs"][name])


@pytest.fixture
def oracles():
    return ORACLES


@functools.lru_cache(maxsize=None)
def cached_solve(p: ModelParams, eps: float, n_pts: int = 3201, init=None, L=None):
    from metapop_hj.fd import steady_state_solve
    return steady_state_solve(p, eps, L=L, n_pts=n_pts, init=init)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
