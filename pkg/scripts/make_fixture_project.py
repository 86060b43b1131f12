#!/usr/bin/env python3
"""Write the synthetic fixture project to a directory.

Dev tooling: used by the frontend integration tests to stand up a real
project for a live service. Mirrors the pytest fixtures.

    python3 scripts/make_fixture_project.py /tmp/fixture-project [--false-positive]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import synthetic  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=Path)
    parser.add_argument("--false-positive", action="store_true")
    parser.add_argument("--no-groundtruth", action="store_true")
    args = parser.parse_args()
    root = synthetic.build_project(
        args.out,
        inject_false_positive=args.false_positive,
        with_groundtruth=not args.no_groundtruth,
    )
    print(root)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
