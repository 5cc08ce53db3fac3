"""PASS/FAIL lines collected by the acceptance tests."""

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok
