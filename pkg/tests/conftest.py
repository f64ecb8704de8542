from pathlib import Path

import pytest

from cobotcell.job import load_job
from cobotcell.sim import SimConfig, load_scenario

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"
SCENARIOS = DATA / "scenarios"


@pytest.fixture(scope="session")
def assembly_job():
    return load_job(DATA / "assembly11.job")


@pytest.fixture(scope="session")
def fine_config():
    # 0.005 ticks divide every task duration exactly, so nominal runs land on
    # exact boundaries.
    return SimConfig(tick=0.005)


@pytest.fixture(scope="session")
def scenario_loader():
    def load(name: str):
        return load_scenario(SCENARIOS / f"{name}.scn")

    return load
