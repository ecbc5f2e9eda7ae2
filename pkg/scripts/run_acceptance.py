"""Run the acceptance suite and print one line per criterion."""
import argparse
import re
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


@dataclass
class AcceptanceConfig:
    verbose: bool = False
    hypothesis_seed: int = 0


def main(cfg: AcceptanceConfig) -> int:
    cmd = [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"),
           f"--hypothesis-seed={cfg.hypothesis_seed}", "-q" if not cfg.verbose else "-v"]
    proc = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True)
    lines = proc.stdout.splitlines()
    report = [l for l in lines if re.match(r"criterion\s+\d+: ", l)]
    print("\n".join(report) if report else proc.stdout)
    if cfg.verbose:
        print(proc.stdout)
    return proc.returncode


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--hypothesis-seed", type=int, default=0)
    a = ap.parse_args()
    sys.exit(main(AcceptanceConfig(a.verbose, a.hypothesis_seed)))
