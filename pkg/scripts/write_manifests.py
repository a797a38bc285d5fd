"""Regenerate the suite manifests in scripts/manifests/.

full.json: the full 48-run grid at 400 QKT iterations.
ci.json:    the same grid at 100 iterations, for quicker acceptance runs.
"""
import json
from pathlib import Path

from qkbench.bench import full_manifest

HERE = Path(__file__).resolve().parent / "manifests"

if __name__ == "__main__":
    HERE.mkdir(exist_ok=True)
    for name, iters in (("full.json", 400), ("ci.json", 100)):
        (HERE / name).write_text(json.dumps(full_manifest(iters), indent=1) + "\n")
        print(f"wrote {HERE / name}")
