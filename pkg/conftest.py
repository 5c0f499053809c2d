from os.path import abspath, dirname, join

import pytest

from data_module.system_file import SystemFile
from models import ControlSystem
from utils.common import make_generator

SYSTEMS_DIR = join(dirname(abspath(__file__)), "systems")
SEED = 42


def system_path(name: str) -> str:
    return join(SYSTEMS_DIR, f"{name}.sys")


@pytest.fixture
def generator():
    return make_generator(SEED)


@pytest.fixture
def load_file():
    def load(name: str) -> SystemFile:
        return SystemFile.read(system_path(name))

    return load


@pytest.fixture
def load_system(load_file):
    def load(name: str) -> ControlSystem:
        return load_file(name).system()

    return load
