from pathlib import Path

import numpy as np
import pytest

from lzoselect import Dataset, load_csv

DATA_DIR = Path(__file__).resolve().parents[1] / "data"

_acceptance = {}


def load_bundled(name: str) -> Dataset:
    path = DATA_DIR / f"{name}.csv"
    if not path.exists():
        raise FileNotFoundError(
            f"{path} is missing; place the raw file in data/ and run data/make_data.py")
    return load_csv(path, label_column=-1, has_header=True)


@pytest.fixture(scope="session")
def iris():
    return load_bundled("iris")


@pytest.fixture(scope="session")
def wine():
    return load_bundled("wine")


@pytest.fixture(scope="session")
def breast():
    return load_bundled("breast")


@pytest.fixture
def two_clusters():
    """Two tight, far-apart clusters in the plane, 10 points each."""
    rng = np.random.default_rng(3)
    a = rng.normal([0.1, 0.1], 0.02, size=(10, 2))
    b = rng.normal([0.9, 0.9], 0.02, size=(10, 2))
    return Dataset(np.vstack([a, b]), [0] * 10 + [1] * 10, 2, "clusters")


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::", 1)[1]
        _acceptance[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        tag = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"[{tag}] {name}")
