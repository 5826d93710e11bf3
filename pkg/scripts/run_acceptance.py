#!/usr/bin/env python3
"""Run the acceptance gate and echo one PASS/FAIL line per criterion.

Thin wrapper over pytest so the gate can run from CI or by hand without
remembering flags: `python3 scripts/run_acceptance.py`.
"""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    cmd = [
        sys.executable,
        "-m",
        "pytest",
        str(ROOT / "tests" / "test_acceptance.py"),
        "-v",
        "-s",
    ]
    return subprocess.call(cmd, cwd=ROOT)


if __name__ == "__main__":
    sys.exit(main())
