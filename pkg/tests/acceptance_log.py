"""Pass/fail lines for the acceptance criteria, shared with the terminal summary."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

LINES: list[str] = []


@dataclass
class Criterion:
    name: str
    limit: float  # seconds
    elapsed: float = 0.0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @contextmanager
    def timed(self):
        """Accumulate wall time of the code under test (oracles stay outside)."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.elapsed += time.perf_counter() - start

    def require(self, ok: bool, what: str) -> None:
        (self.notes if ok else self.failures).append(what)


@contextmanager
def criterion(name: str, limit: float):
    c = Criterion(name, limit)
    try:
        yield c
    except Exception as exc:  # an exception inside the check counts as a failure
        c.failures.append(f"{type(exc).__name__}: {exc}")
    if c.elapsed > limit:
        c.failures.append(f"runtime {c.elapsed:.4g}s over the {limit:g}s limit")
    status = "PASS" if not c.failures else "FAIL"
    detail = "; ".join(c.failures or c.notes)
    line = f"{status}  {name}  [{c.elapsed * 1e3:.2f} ms / limit {limit * 1e3:g} ms]  {detail}"
    LINES.append(line)
    print(line)
    assert not c.failures, line
