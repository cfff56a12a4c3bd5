"""Run every acceptance criterion and write a combined JSON report.

    python3 scripts/acceptance_report.py --out runs/acceptance.json
"""
import argparse
import json
import sys
from pathlib import Path

from novikov.acceptance import run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/acceptance.json")
    args = ap.parse_args()
    results = run_all()
    for r in results:
        print(r.line())
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps([r.as_dict() for r in results], indent=2) + "\n")
    return 0 if all(r.ok for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
