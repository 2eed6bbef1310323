from acceptance_log import RESULTS
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, verdict, detail in sorted(RESULTS, key=lambda r: int(r[0][1:])):
        line = f"{cid:<4} {verdict:<9} {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
