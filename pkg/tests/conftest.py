import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cfvc.cli import main  # noqa: E402


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    """Run ``cfvc demo`` once with its default settings and return the working directory."""
    d = tmp_path_factory.mktemp("demo")
    code = main(["-q", "demo", "--dir", str(d)])
    assert code == 0
    return d


@pytest.fixture(scope="session")
def demo_report(demo_dir):
    return json.loads((demo_dir / "output" / "report.json").read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
