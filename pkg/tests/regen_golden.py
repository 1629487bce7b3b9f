"""Regenerate the committed golden outputs.  Run from the repository root:

    python3 tests/regen_golden.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from golden_cases import CASES, EXPECTED_EXIT, run_case


def main():
    root = pathlib.Path(__file__).parent / "golden"
    root.mkdir(exist_ok=True)
    for fname, argv in CASES:
        code, text = run_case(argv)
        expected = EXPECTED_EXIT.get(fname, 0)
        if code != expected:
            raise SystemExit(f"{fname}: exit {code}, expected {expected}")
        (root / fname).write_text(text, encoding="utf-8")
        print(f"wrote {root / fname}")


if __name__ == "__main__":
    main()
