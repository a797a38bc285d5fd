"""Generate the 7-qubit labelling-cosets-with-error table used for ``adhoc-cov``.

The reference table is not vendored, so this builds an equivalent instance:

* fiducial state: the path-graph state on 7 qubits, i.e. what the covariant
  map prepares from ``RY(pi/2)`` on every qubit followed by its CZ chain;
* subgroup K: the Pauli stabilizer group of that graph state (all 2**7 elements);
* two coset representatives ``c_+1, c_-1``: seeded random local unitaries of the
  form ``RX(a) RZ(b)`` per qubit;
* a point of class ``y`` encodes ``c_y k`` for a uniformly drawn ``k`` in K, written
  in the covariant map's angle layout (``x[2q]`` RX angle, ``x[2q+1]`` RZ angle),
  perturbed by Gaussian noise and wrapped into [0, 2pi).

Usage: python scripts/make_lce_surrogate.py [--seed 0] [--sigma 0.2] [--out PATH]
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from qkbench.data import DatasetSplit, write_split_csv

N_QUBITS = 7
EDGES = [(k, k + 1) for k in range(N_QUBITS - 1)]
DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "qkbench" / "resources" / "lce_graph7.csv"


def stabilizer_generators():
    """``X_v Z_{N(v)}`` as (x_bits, z_bits) per vertex."""
    gens = []
    for v in range(N_QUBITS):
        xs = np.zeros(N_QUBITS, dtype=int)
        zs = np.zeros(N_QUBITS, dtype=int)
        xs[v] = 1
        for a, b in EDGES:
            if v in (a, b):
                zs[b if a == v else a] = 1
        gens.append((xs, zs))
    return gens


def coset_angles(alpha, beta, xs, zs):
    """Angles of ``RX(alpha) RZ(beta) P`` for the Pauli ``P ~ X^xs Z^zs``, up to phase.

    Uses ``RZ(b) X = X RZ(-b)``, so an X factor adds pi to the RX angle and flips
    the RZ angle; a Z factor adds pi to the RZ angle.
    """
    a = alpha + np.pi * xs
    b = np.where(xs == 1, -beta, beta) + np.pi * zs
    return a, b


def generate(seed: int = 0, sigma: float = 0.2, per_class: int = 30) -> DatasetSplit:
    rng = np.random.default_rng(seed)
    reps = {label: (rng.uniform(0, 2 * np.pi, N_QUBITS), rng.uniform(0, 2 * np.pi, N_QUBITS))
            for label in (1, -1)}
    gens = stabilizer_generators()

    def draw(label, n):
        rows = []
        for _ in range(n):
            xs = np.zeros(N_QUBITS, dtype=int)
            zs = np.zeros(N_QUBITS, dtype=int)
            for gx, gz in gens:
                if rng.random() < 0.5:
                    xs ^= gx
                    zs ^= gz
            a, b = coset_angles(*reps[label], xs, zs)
            x = np.empty(2 * N_QUBITS)
            x[0::2], x[1::2] = a, b
            rows.append(np.mod(x + rng.normal(0.0, sigma, x.size), 2 * np.pi))
        return np.array(rows)

    X_train = np.vstack([draw(1, per_class), draw(-1, per_class)])
    X_test = np.vstack([draw(1, per_class), draw(-1, per_class)])
    y = np.r_[np.ones(per_class, dtype=int), -np.ones(per_class, dtype=int)]
    return DatasetSplit(X_train, X_test, y, y.copy(), "adhoc-cov")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sigma", type=float, default=0.2)
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = parser.parse_args(argv)
    split = generate(args.seed, args.sigma)
    write_split_csv(split, args.out)
    print(f"wrote {len(split.y_train) + len(split.y_test)} rows to {args.out}")


if __name__ == "__main__":
    main()
