import pytest

from indsets.graph import (
    clique, complete_bipartite, cycle, path, petersen, random_bounded_degree, random_regular,
)


def random_suite():
    """Seed-pinned graphs with n <= 12 and maximum degree <= 4."""
    graphs = []
    probs = (0.2, 0.4, 0.6, 0.9)
    for i in range(504):
        n = 1 + i % 12
        max_deg = 1 + (i // 12) % 4
        p = probs[(i // 48) % 4]
        graphs.append(random_bounded_degree(n, max_deg, p, seed=i))
    for n, d in ((8, 3), (10, 3), (12, 3), (6, 4), (9, 4), (12, 4)):
        graphs.append(random_regular(n, d, seed=n * d))
    graphs += [clique(4), clique(5), petersen(), complete_bipartite(3, 3),
               complete_bipartite(4, 4), cycle(5), cycle(12), path(7)]
    return graphs


@pytest.fixture(scope="session")
def suite():
    return random_suite()


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or report.when != "call":
        return
    name = report.nodeid.split("::")[-1]
    if name.startswith("test_criterion_"):
        _CRITERIA[name] = (report.outcome, report.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        number = int(name.split("_")[2])
        outcome, props = _CRITERIA[name]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        detail = "; ".join(f"{k}={_short(v)}" for k, v in props)
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {name}  {detail}".rstrip())


def _short(value):
    if isinstance(value, float):
        return f"{value:.4g}"
    if isinstance(value, list):
        return "[" + ", ".join(_short(v) for v in value) + "]"
    return str(value)
