"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

from contextlib import contextmanager

RESULTS: list[tuple[str, str, str, str]] = []


@contextmanager
def criterion(cid: str, title: str):
    try:
        yield
    except BaseException as exc:
        first = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        RESULTS.append((cid, title, "FAIL", first))
        raise
    RESULTS.append((cid, title, "PASS", ""))


def soft(cid: str, title: str, ok: bool, detail: str) -> None:
    RESULTS.append((cid, title, "PASS" if ok else "SOFT-FAIL", "" if ok else detail))
