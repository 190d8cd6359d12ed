import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def maxabs(x):
    return float(np.max(np.abs(np.asarray(x, dtype=float)))) if np.size(x) else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def _run_cli(args):
    import time
    from extcalc.cli import main
    t0 = time.perf_counter()
    code = main(args)
    return code, time.perf_counter() - t0


@pytest.fixture(scope="session")
def corpus_run(tmp_path_factory):
    """Every bundled scenario through the CLI at its defaults: name -> (exit, seconds, json bytes)."""
    from extcalc.cli import bundled_scenarios
    out = tmp_path_factory.mktemp("corpus")
    runs = {}
    for p in bundled_scenarios():
        name = p.name[:-4]
        path = out / f"{name}.json"
        code, dt = _run_cli(["verify", "--scenario", f"bundled:{name}", "--out", str(path)])
        runs[name] = (code, dt, path.read_bytes())
    return runs


@pytest.fixture(scope="session")
def negative_runs(tmp_path_factory):
    """Every negative-control scenario: name -> (exit, report dict)."""
    import json
    from importlib import resources
    root = resources.files("extcalc") / "scenarios" / "negative"
    out = tmp_path_factory.mktemp("negative")
    runs = {}
    for p in sorted(root.iterdir(), key=lambda q: q.name):
        if not p.name.endswith(".scn"):
            continue
        path = out / (p.name[:-4] + ".json")
        code, _ = _run_cli(["verify", "--scenario", str(p), "--out", str(path)])
        runs[p.name[:-4]] = (code, json.loads(path.read_text()))
    return runs
