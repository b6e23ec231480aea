import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stratgraph import Graph  # noqa: E402

TOY_EDGES = [(0, 1), (0, 2), (1, 2), (2, 3)]
TOY_TEXT = "# toy graph\n0 1\n0 2\n1 2\n2 3\n"

DATASET_FILES = {
    "facebook": ("facebook_combined.txt", "facebook_combined.txt.gz"),
    "condmat": ("ca-CondMat.txt", "ca-CondMat.txt.gz"),
    "amazon": ("com-amazon.ungraph.txt", "com-amazon.ungraph.txt.gz"),
}


def make_graph(n, edges):
    e = np.array(edges, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, e[:, 0], e[:, 1])


@pytest.fixture
def toy():
    return make_graph(4, TOY_EDGES)


@pytest.fixture
def toy_file(tmp_path):
    p = tmp_path / "toy.txt"
    p.write_text(TOY_TEXT)
    return p


def data_dirs():
    dirs = []
    if os.environ.get("STRATGRAPH_DATA"):
        dirs.append(Path(os.environ["STRATGRAPH_DATA"]))
    dirs.append(Path(__file__).resolve().parent.parent / "data")
    return dirs


def find_dataset(name):
    for d in data_dirs():
        for fname in DATASET_FILES[name]:
            if (d / fname).exists():
                return d / fname
    return None


# acceptance reporting: one line per criterion at the end of the run
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        msg = getattr(report, "note", "")
        if report.skipped and isinstance(report.longrepr, tuple):
            reason = report.longrepr[2].removeprefix("Skipped: ")
            msg = f"{msg}; {reason}" if msg else reason
        _CRITERIA.setdefault(crit, []).append((report.nodeid.split("::")[-1], outcome, msg))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])
        rep.note = "; ".join(item.user_properties_notes) if hasattr(
            item, "user_properties_notes") else ""


@pytest.fixture
def note(request):
    """Attach a short message to the criterion summary line."""
    request.node.user_properties_notes = []
    return request.node.user_properties_notes.append


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for (num, title), results in sorted(_CRITERIA.items()):
        for name, outcome, msg in results:
            line = f"[{outcome}] criterion {num} ({title}) {name}"
            if msg:
                line += f": {msg}"
            tr.write_line(line)
