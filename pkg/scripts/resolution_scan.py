#!/usr/bin/env python3
"""Scan two-point separations through the full pipeline and report where the
Rayleigh-style dip criterion starts to resolve them, against the nominal
limit wavelength * z_o / aperture_diameter.

Usage: python scripts/resolution_scan.py [--out runs/resolution] [--count 16384]
"""

import argparse
import sys

from blindgi.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/resolution")
    parser.add_argument("--count", type=int, default=2**14)
    parser.add_argument("--separations-rel", default="0.35,0.7,1.4,2.0")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    return cli_main([
        "resolution",
        "--out", args.out,
        "--separations-rel", args.separations_rel,
        "--workers", str(args.workers),
        "--optical.aperture-diameter", "2e-3",
        "--ensemble.kind", "random-fixed-fill",
        "--ensemble.count", str(args.count),
        "--ensemble.seed", "42",
        "--psf-seed", "10",
        "--support.box", "half",
        "--schedule.seed", "99",
    ])


if __name__ == "__main__":
    sys.exit(main())
