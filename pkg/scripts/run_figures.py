#!/usr/bin/env python3
"""Drive the CLI over every shipped example config.

Each config lands in its own subdirectory of --out (overriding the directory
recorded in the config), so a full reproduction run is one command:

    python scripts/run_figures.py --out results
"""

import argparse
import pathlib
import subprocess
import sys
import time

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"
MODES = {"thermal", "dynamics", "oracle-check"}


def config_mode(path: pathlib.Path) -> str:
    for line in path.read_text().splitlines():
        line = line.strip()
        if line.startswith("mode"):
            return line.split("=", 1)[1].strip().strip('"')
    raise SystemExit(f"{path}: no mode key")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", help="root output directory")
    parser.add_argument("--only", nargs="*", default=None, help="config stems to run (e.g. fig3 fig12)")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    configs = sorted(CONFIG_DIR.glob("*.toml"))
    if args.only:
        configs = [c for c in configs if c.stem in set(args.only)]
    if not configs:
        print("nothing to run", file=sys.stderr)
        return 1

    failures = []
    for cfg in configs:
        mode = config_mode(cfg)
        if mode not in MODES:
            print(f"skipping {cfg.name}: unknown mode {mode!r}")
            continue
        out = pathlib.Path(args.out) / cfg.stem
        cmd = [
            sys.executable, "-m", "spinlink.cli", mode,
            "--config", str(cfg), "--out", str(out), "--threads", str(args.threads),
        ]
        print(f"== {cfg.name} -> {out}")
        t0 = time.time()
        rc = subprocess.run(cmd).returncode
        print(f"   exit {rc} in {time.time() - t0:.0f}s")
        if rc != 0:
            failures.append((cfg.name, rc))

    if failures:
        print("failed:", ", ".join(f"{n} (exit {rc})" for n, rc in failures), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
