import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for tag, ok, text in sorted(mod.RESULTS):
        terminalreporter.write_line(f"{tag} {'PASS' if ok else 'FAIL'}  {text}")
