import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from taskvis.data import load_dataset
from taskvis.ranking import load_cost_table

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")
RESOURCES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "resources")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def load_fixture(name: str):
    with open(fixture_path(name), "rb") as fh:
        return load_dataset(fh.read())


@pytest.fixture(scope="session")
def cars():
    return load_fixture("cars.csv")


@pytest.fixture(scope="session")
def covid():
    return load_fixture("covid.csv")


@pytest.fixture(scope="session")
def hollywood():
    return load_fixture("hollywood.csv")


@pytest.fixture(scope="session")
def cost_table():
    return load_cost_table()


@pytest.fixture(scope="session")
def vl_validator():
    jsonschema = pytest.importorskip("jsonschema")
    with open(os.path.join(RESOURCES, "vega-lite-schema.json"), "r", encoding="utf-8") as fh:
        schema = json.load(fh)
    return jsonschema.Draft7Validator(schema)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # echo the acceptance table when that module ran
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        status, title = results[num]
        terminalreporter.write_line("criterion %2d %s  %s" % (num, status, title))
