import csv
from collections import defaultdict
from pathlib import Path

import pytest

from ecspade.cli import main

_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_CRITERIA] = {}


@pytest.fixture
def record_criterion(request):
    """Store a pass/fail line for the acceptance summary, then assert it."""
    def record(number, passed, detail):
        request.config.stash[_CRITERIA][number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
        assert passed, detail
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results, key=lambda k: (int(str(k).rstrip("abc")), str(k))):
        passed, detail = results[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")


def read_summary(path: Path):
    """summary.csv -> {beta: {detector: [row per trial]}} with float fields."""
    table = defaultdict(lambda: defaultdict(list))
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            beta = round(float(row["beta"]), 6)
            vals = {k: float(v) for k, v in row.items() if k not in ("detector", "beta", "trial")}
            vals["trial"] = int(row["trial"])
            table[beta][row["detector"]].append(vals)
    return table


def _run_preset(tmp_path_factory, preset, name):
    out = tmp_path_factory.mktemp(name)
    status = main(["run", "--preset", preset, "--out", str(out)])
    assert status == 0
    return out


@pytest.fixture(scope="session")
def fig1_run(tmp_path_factory):
    return _run_preset(tmp_path_factory, "fig1", "fig1_a")


@pytest.fixture(scope="session")
def fig1_rerun(tmp_path_factory):
    return _run_preset(tmp_path_factory, "fig1", "fig1_b")


@pytest.fixture(scope="session")
def fig2_run(tmp_path_factory):
    return _run_preset(tmp_path_factory, "fig2", "fig2")


@pytest.fixture(scope="session")
def fig1_summary(fig1_run):
    return read_summary(fig1_run / "summary.csv")


@pytest.fixture(scope="session")
def fig2_summary(fig2_run):
    return read_summary(fig2_run / "summary.csv")
