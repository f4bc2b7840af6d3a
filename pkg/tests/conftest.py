import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                rows.append((props["criterion"], outcome, props.get("summary", ""),
                             props.get("measured", "")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for cid, outcome, summary, measured in sorted(rows):
        tag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{tag}  {cid:<3s} {summary}" + (f"  [{measured}]" if measured else ""))
