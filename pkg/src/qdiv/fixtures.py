"""Pinned test fixtures: two full-rank non-commuting qubit pairs, one qutrit
pair, a commuting control pair, and conversion sources.

The divergence values were generated with an independent high-precision
eigendecomposition (40-digit arithmetic, mpmath) and committed; the test
suite recomputes them through the package and through a second oracle path.
"""

import numpy as np

from .states import DensityMatrix


def _bloch(x: float, y: float, z: float) -> np.ndarray:
    return np.array([[0.5 * (1 + z), 0.5 * (x - 1j * y)],
                     [0.5 * (x + 1j * y), 0.5 * (1 - z)]])


QUBIT_A = (DensityMatrix(_bloch(0.0, 0.0, 0.64)),
           DensityMatrix(_bloch(0.34, 0.0, -0.24)))

QUBIT_B = (DensityMatrix(_bloch(0.0, 0.0, 0.31)),
           DensityMatrix(_bloch(0.35, 0.0, -0.41)))

QUTRIT = (DensityMatrix(np.array([[0.40, 0.08 + 0.02j, 0.00],
                                  [0.08 - 0.02j, 0.34, 0.06j],
                                  [0.00, -0.06j, 0.26]])),
          DensityMatrix(np.array([[0.22, -0.05j, 0.04],
                                  [0.05j, 0.45, 0.10],
                                  [0.04, 0.10, 0.33]])))

# Diagonal pair for classical cross-checks: spectra (0.7, 0.3) vs (0.35, 0.65).
COMMUTING = (DensityMatrix(np.diag([0.7, 0.3]).astype(complex)),
             DensityMatrix(np.diag([0.35, 0.65]).astype(complex)))

# Classical binary source pair for the conversion studies; its relative
# entropy is roughly 2.2x the fixture divergences.
CONVERSION_SOURCE = (DensityMatrix(np.diag([0.719, 0.281]).astype(complex)),
                     DensityMatrix(np.diag([0.105, 0.895]).astype(complex)))

PAIRS = {
    "qubit_a": QUBIT_A,
    "qubit_b": QUBIT_B,
    "qutrit": QUTRIT,
    "commuting": COMMUTING,
}

# 20-digit reference values (nats), independent oracle, committed.
VALUES = {
    "qubit_a": {
        "umegaki": 0.48037122375982757413,
        "rld": 0.4984543685030579161,
        "dmax": 0.91849431324887273179,
        "fidelity": -0.1290382984529403437,
    },
    "qubit_b": {
        "umegaki": 0.36265523708691999394,
        "rld": 0.36727787659000148062,
        "dmax": 0.99580452546875890148,
        "fidelity": -0.089065286973681842567,
    },
    "qutrit": {
        "umegaki": 0.1630160234327831433,
        "rld": 0.16611353255958356726,
        "dmax": 0.78306762794290866891,
        "fidelity": -0.039469385141769958667,
    },
    "commuting": {
        "umegaki": 0.25324605992191715247,
        "rld": 0.25324605992191715247,
        "dmax": 0.69314718055994530942,
        "fidelity": -0.06553871167129550299,
    },
}
