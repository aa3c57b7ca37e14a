import numpy as np
import pytest

from dpsubkmeans.datasets import export_reference_datasets, load_named

_ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def _report(label, ok, detail=""):
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else ""))
        print(_ACCEPTANCE[-1])
        return ok

    return _report


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def uci_dir(tmp_path_factory):
    pytest.importorskip("sklearn")
    out = tmp_path_factory.mktemp("uci")
    export_reference_datasets(out)
    return out


@pytest.fixture(scope="session")
def uci(uci_dir):
    return {name: load_named(uci_dir / f"{name}.csv", name, label_column="label")
            for name in ("iris", "wine", "breast_cancer", "digits")}
