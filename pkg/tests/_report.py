"""One-line pass/fail records for the acceptance criteria."""

LINES: dict = {}


def record(number: int, ok: bool, detail: str, seconds: float, expected_fail: bool = False):
    status = "PASS" if ok else ("FAIL (expected)" if expected_fail else "FAIL")
    line = f"criterion {number:2d}: {status} {detail} [{seconds:.1f} s]"
    LINES[number] = line
    print(line)
    return ok
