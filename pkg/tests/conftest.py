from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(*parts: str) -> str:
    return FIXTURES.joinpath(*parts).read_text(encoding="utf-8")


@pytest.fixture
def diamond_source() -> str:
    return fixture_text("null_return", "diamond.mini")


@pytest.fixture
def null_return_pair() -> tuple[str, str]:
    return fixture_text("null_return", "fixed.mini"), fixture_text("null_return", "defect.mini")


@pytest.fixture
def null_return_graphs(null_return_pair):
    from codegraph.codemodel import build_code_graph

    return tuple(build_code_graph(src) for src in null_return_pair)


def corpus_sources() -> list[Path]:
    return sorted(FIXTURES.rglob("*.mini"))


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        detail = dict(report.user_properties).get("detail", "")
        if report.outcome != "passed" and not detail:
            detail = report.longreprtext.strip().splitlines()[-1] if report.longreprtext else ""
        _ACCEPTANCE[report.nodeid.rsplit("::", 1)[1]] = ("PASS" if report.outcome == "passed" else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[name]
        number = int(name.split("_")[2])
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
