import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vqcloud.cloud import ServiceConfig, serve  # noqa: E402

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "outcome": "passed", "detail": ""})
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry["outcome"] = "FAILED" if rep.failed else "skipped"
    if rep.when == "call":
        entry["detail"] = getattr(item, "criterion_detail", "")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        c = _CRITERIA[number]
        status = "PASS" if c["outcome"] == "passed" else c["outcome"].upper()
        line = f"criterion {number} [{status}] {c['title']}"
        if c["detail"]:
            line += f" -- {c['detail']}"
        terminalreporter.write_line(line)


@pytest.fixture
def detail(request):
    """Attach a one-line measurement summary to the current criterion."""

    def record(text: str):
        request.node.criterion_detail = text

    return record


@pytest.fixture
def cloud(tmp_path):
    server = serve(config=ServiceConfig(rng_seed=1234, log_path=tmp_path / "requests.ndjson"))
    yield server
    server.shutdown()
