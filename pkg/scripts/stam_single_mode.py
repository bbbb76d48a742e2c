"""Scan single-mode Gaussian inputs for violations of the Stam-type bounds.

A single-mode even state is fixed by one number x in [0, 1), with total Fisher
information 8 x atanh(x). The beam splitter mixes x linearly, so both bounds
reduce to scalar inequalities that can be scanned on a grid.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from fermionic_epi import gaussian, infotheory


@dataclass(frozen=True)
class ScanConfig:
    points: int = 19
    lam: float = 0.5
    x_max: float = 0.95


def single_mode(x: float) -> np.ndarray:
    return gaussian.gaussian_state_from_covariance(np.array([[0.0, x], [-x, 0.0]]))


def scan(cfg: ScanConfig) -> list[tuple[float, float, float]]:
    xs = np.linspace(cfg.x_max / cfg.points, cfg.x_max, cfg.points)
    bad = []
    for xa in xs:
        for xb in xs:
            r = infotheory.stam_check(single_mode(xa), single_mode(xb), cfg.lam, 1.0, 1.0)
            if r.harmonic_slack is not None and r.harmonic_slack < -1e-9:
                bad.append((float(xa), float(xb), r.harmonic_slack))
    return bad


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=ScanConfig.points)
    p.add_argument("--lam", type=float, default=ScanConfig.lam)
    p.add_argument("--x-max", type=float, default=ScanConfig.x_max)
    cfg = ScanConfig(**vars(p.parse_args()))
    bad = scan(cfg)
    print(f"harmonic-form violations: {len(bad)} of {cfg.points ** 2} grid pairs at lambda={cfg.lam}")
    for xa, xb, slack in sorted(bad, key=lambda b: b[2])[:10]:
        print(f"  x_A={xa:.3f} x_B={xb:.3f} slack={slack:.3e}")


if __name__ == "__main__":
    main()
