from pathlib import Path

import pytest

from storyvar import DyadicContext, UserStory, parse_triples_csv

DATA = Path(__file__).parent / "data"

_criteria: dict[int, list[str]] = {}


@pytest.fixture
def manga_csv() -> str:
    return (DATA / "manga_triples.csv").read_text()


@pytest.fixture
def manga(manga_csv):
    return parse_triples_csv(manga_csv)


@pytest.fixture
def manga_pairs() -> DyadicContext:
    """The system x (role;feature) relation of the manga example, without (ProductManager;mc) on MyManga."""
    s = lambda r, f: UserStory(r, f)
    return DyadicContext.from_rows([
        ("MyManga", [s("FinalUser", "s"), s("Administrator", "s"), s("Administrator", "mc")]),
        ("MangaStore", [s("FinalUser", "s"), s("Administrator", "s")]),
        ("MangaHome", [
            s("FinalUser", "s"), s("FinalUser", "vc"), s("Administrator", "vc"),
            s("ProductManager", "vc"), s("ProductManager", "mc"),
        ]),
    ])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
    _criteria.setdefault(marker.args[0], []).append(status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        if "FAIL" in results:
            status = "FAIL"
        elif all(r == "SKIP" for r in results):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {n:>2}: {status} ({len(results)} checks)")
