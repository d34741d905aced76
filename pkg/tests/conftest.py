from importlib import resources

import pytest

from abdux.parser import parse_explanation, parse_observation, parse_theory

DATA = resources.files("abdux") / "data"


def load(name: str):
    theory = parse_theory((DATA / f"{name}.abd").read_text(), f"{name}.abd")
    obs = parse_observation((DATA / f"{name}.obs").read_text(), theory)
    return theory, obs


def load_expl(name: str):
    return parse_explanation((DATA / f"{name}.exp").read_text(), f"{name}.exp")


@pytest.fixture
def data_dir():
    return DATA
