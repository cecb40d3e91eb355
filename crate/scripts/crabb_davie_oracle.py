#!/usr/bin/env python3
"""Independent numpy re-derivation of the d = 3 von Neumann violation fixture.

Builds the three commuting partial isometries on C^8 from their action on
the basis e, f1, f2, f3, g1, g2, g3, h, compares them with the shipped JSON,
and recomputes lhs = ||p(T)|| and the certified torus bound at M = 256.

    python3 scripts/crabb_davie_oracle.py [--fixture PATH] [--grid M] [--write]

Prints one JSON object. Exit status 0 when the fixture matches and
lhs - sup_upper > 1e-3.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

DEFAULT_FIXTURE = Path(__file__).resolve().parent.parent / "crates" / "cli" / "fixtures" / "crabb_davie.json"

E, F, G, H = 0, (1, 2, 3), (4, 5, 6), 7
POLY = {(1, 1, 1): 1.0, (3, 0, 0): -1.0, (0, 3, 0): -1.0, (0, 0, 3): -1.0}


def build_tuple():
    mats = []
    for i in range(3):
        t = np.zeros((8, 8), dtype=complex)
        t[F[i], E] = 1
        for j in range(3):
            if j == i:
                t[G[i], F[i]] = -1
            else:
                t[G[3 - i - j], F[j]] = 1
        t[H, G[i]] = 1
        mats.append(t)
    return mats


def to_json(mats):
    def matrix(m):
        return {
            "rows": m.shape[0],
            "cols": m.shape[1],
            "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
        }

    return {
        "description": (
            "Commuting partial isometries T1, T2, T3 on C^8 with basis "
            "e, f1, f2, f3, g1, g2, g3, h: T_i e = f_i, T_i f_i = -g_i, "
            "T_i f_j = g_k for {i,j,k} = {1,2,3}, T_i g_j = delta_ij h, T_i h = 0. "
            "p = z1 z2 z3 - z1^3 - z2^3 - z3^3 gives p(T) = 4 h e*, so ||p(T)|| = 4 "
            "while sup over the 3-torus of |p| is below 3.7."
        ),
        "tuple": {"d": 3, "dim": 8, "matrices": [matrix(m) for m in mats]},
        "poly": {
            "d": 3,
            "terms": [{"alpha": list(a), "coeff": [c, 0.0]} for a, c in sorted(POLY.items())],
        },
    }


def load(path):
    doc = json.loads(Path(path).read_text())
    mats = []
    for m in doc["tuple"]["matrices"]:
        data = np.array([complex(re, im) for re, im in m["data"]])
        mats.append(data.reshape(m["rows"], m["cols"]))
    poly = {tuple(t["alpha"]): complex(*t["coeff"]) for t in doc["poly"]["terms"]}
    return mats, poly


def eval_poly(mats, poly):
    out = np.zeros_like(mats[0])
    for alpha, c in poly.items():
        term = np.eye(mats[0].shape[0], dtype=complex)
        for m, a in zip(mats, alpha):
            term = term @ np.linalg.matrix_power(m, a)
        out = out + c * term
    return out


def torus_bound(poly, grid):
    theta = 2 * np.pi * np.arange(grid) / grid
    z = np.exp(1j * theta)
    z1, z2, z3 = np.meshgrid(z, z, z, indexing="ij", sparse=True)
    value = sum(c * z1 ** a[0] * z2 ** a[1] * z3 ** a[2] for a, c in poly.items())
    grid_sup = float(np.abs(value).max())
    pad = math.pi / grid * sum(abs(c) * sum(a) for a, c in poly.items())
    return grid_sup, pad


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", type=Path, default=DEFAULT_FIXTURE)
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--write", action="store_true", help="regenerate the fixture file")
    args = ap.parse_args()

    built = build_tuple()
    if args.write:
        args.fixture.parent.mkdir(parents=True, exist_ok=True)
        args.fixture.write_text(json.dumps(to_json(built), indent=2) + "\n")

    mats, poly = load(args.fixture)
    matches = all(np.array_equal(a, b) for a, b in zip(mats, built)) and poly == {k: complex(v) for k, v in POLY.items()}
    commutator = max(np.linalg.norm(a @ b - b @ a, 2) for a in mats for b in mats)
    norms = [float(np.linalg.norm(m, 2)) for m in mats]
    lhs = float(np.linalg.norm(eval_poly(mats, poly), 2))
    grid_sup, pad = torus_bound(poly, args.grid)
    sup_upper = grid_sup + pad
    report = {
        "fixture_matches_construction": bool(matches),
        "max_commutator": float(commutator),
        "norms": norms,
        "M": args.grid,
        "lhs": lhs,
        "grid_sup": grid_sup,
        "lipschitz_pad": pad,
        "sup_upper": sup_upper,
        "margin": lhs - sup_upper,
    }
    print(json.dumps(report, indent=2))
    ok = matches and commutator == 0.0 and max(norms) <= 1 + 1e-12 and lhs - sup_upper > 1e-3
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
