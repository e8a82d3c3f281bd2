import re

_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    outcomes = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m and rep.when in ("setup", "call"):
                n = int(m.group(1))
                ok = outcomes.get(n, True) and key == "passed"
                outcomes[n] = ok
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(outcomes):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if outcomes[n] else 'FAIL'}")
