"""Calibrate the constant between the two sides of each identity over a rank range.

    python3 scripts/calibrate_all.py --out reports/
"""

import argparse
import os
from dataclasses import dataclass, field
from typing import Dict, List

from refdet.harness import calibrate_constants, calibration_stable, dumps


@dataclass
class CalibrationConfig:
    out: str = "reports"
    ranges: Dict[str, List[int]] = field(default_factory=lambda: {
        "k1": [1, 2, 3],
        "matrix-tree": [1, 2, 3, 4],
        "keven-pf": [2, 4],
        "mv": [2, 4],
        "bn-tree": [1, 2, 3],
    })


def main(cfg: CalibrationConfig) -> int:
    os.makedirs(cfg.out, exist_ok=True)
    unstable = 0
    for name, values in cfg.ranges.items():
        table = calibrate_constants(name, values)
        with open(os.path.join(cfg.out, f"calibrate_{name}.json"), "w") as fh:
            fh.write(dumps(table))
        ratios = ", ".join(f"n={r['n']}: {r['ratio']}" for r in table["rows"])
        print(f"{name:12s} {ratios}")
        if name == "bn-tree":
            print(f"{'':12s} correction 2^(alpha*l + beta*d): {table['fit']}")
        unstable += not calibration_stable(name, table)
    # the literal per-triangle weight, for comparison
    literal = calibrate_constants("mv", cfg.ranges["mv"], variant="literal")
    print(f"{'mv literal':12s} " + ", ".join(f"n={r['n']}: {r['ratio']}" for r in literal["rows"]))
    return 1 if unstable else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=CalibrationConfig.out)
    raise SystemExit(main(CalibrationConfig(out=ap.parse_args().out)))
