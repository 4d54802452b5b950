"""Projection of the lattice model onto its lowest d eigenstates.

The truncated Hamiltonian is diagonal in the eigenbasis (gauge E0 = 0)
and the drive couples through the projected phase operator, a real
symmetric matrix of elements lambda_ij = <psi_i|phi|psi_j>.  Pseudo-Pauli
y and z operators follow from the ladder decomposition of that matrix.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .lattice import TWO_PI, EigenSystem


@dataclass(frozen=True)
class TruncatedModel:
    """d-level model: diagonal energies (rad/ns, E0 = 0) and coupling matrix."""

    h0: np.ndarray
    sigma_x: np.ndarray

    def __post_init__(self):
        if self.h0.ndim != 1 or self.sigma_x.shape != (self.dim, self.dim):
            raise ValidationError("inconsistent truncated-model shapes")

    @property
    def dim(self):
        return self.h0.size

    @property
    def omega01(self):
        """Qubit transition frequency in rad/ns."""
        return float(self.h0[1])

    @property
    def delta2(self):
        """Anharmonicity omega01 - omega12 in rad/ns (0.0 for dim == 2)."""
        if self.dim < 3:
            return 0.0
        return float(2.0 * self.h0[1] - self.h0[2])

    @property
    def lambda01(self):
        return float(self.sigma_x[0, 1])

    def lambda_ratio(self, i, j):
        """|lambda_ij / lambda_01|."""
        return abs(float(self.sigma_x[i, j]) / self.lambda01)

    def omega01_ghz(self):
        return self.omega01 / TWO_PI

    def delta2_ghz(self):
        return self.delta2 / TWO_PI

    def energy_bound(self):
        """Largest level energy in rad/ns (E0 gauge), for step-size choice."""
        return float(self.h0[-1])

    def zero_coupling(self, i, j):
        """Copy of the model with lambda_ij forced to zero (i != j)."""
        if i == j:
            raise ValidationError("cannot zero a diagonal element")
        sx = self.sigma_x.copy()
        sx[i, j] = 0.0
        sx[j, i] = 0.0
        return TruncatedModel(h0=self.h0.copy(), sigma_x=sx)

    def to_json(self):
        """Serialize to a JSON string (energies in GHz)."""
        payload = {
            "dim": self.dim,
            "energies_ghz": (self.h0 / TWO_PI).tolist(),
            "lambda_matrix": self.sigma_x.tolist(),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        h0 = TWO_PI * np.asarray(payload["energies_ghz"], dtype=float)
        sx = np.asarray(payload["lambda_matrix"], dtype=float)
        if h0.size != payload["dim"]:
            raise ValidationError("dim does not match stored energies")
        return cls(h0=h0, sigma_x=sx)


@dataclass(frozen=True)
class PseudoPauliSet:
    """sigma_y = -i(S+ - S-) and sigma_z = [sigma_x, sigma_y]/2i."""

    sigma_y: np.ndarray
    sigma_z: np.ndarray


def truncate(eigs: EigenSystem, phase_op: np.ndarray, dim: int,
             zero_couplings=()) -> TruncatedModel:
    """Project the solved lattice onto its lowest ``dim`` eigenstates.

    Parameters
    ----------
    eigs : EigenSystem
        Solved lattice eigensystem with at least ``dim`` levels.
    phase_op : (n,) ndarray
        Diagonal of the full-lattice coupling operator.
    dim : int
        Number of retained levels (>= 2).
    zero_couplings : iterable of (i, j), optional
        Sub-dominant lambda elements to force to zero, e.g. ((0, 3),)
        for the four-level comparison without the weak 0-3 coupling.
    """
    if dim < 2:
        raise ValidationError("truncated model needs dim >= 2")
    if dim > eigs.n_levels:
        raise ValidationError(f"dim={dim} exceeds the {eigs.n_levels} solved levels")
    h0 = eigs.energies[:dim] - eigs.energies[0]
    psi = eigs.states[:, :dim]
    sx = psi.T @ (phase_op[:, None] * psi)
    sx = 0.5 * (sx + sx.T)  # enforce symmetry against roundoff
    model = TruncatedModel(h0=h0, sigma_x=sx)
    for (i, j) in zero_couplings:
        model = model.zero_coupling(i, j)
    return model


def pseudo_pauli(model: TruncatedModel) -> PseudoPauliSet:
    """Pseudo-Pauli y and z matrices of the truncated coupling operator.

    S+ is the strictly upper-triangular part of sigma_x; then
    sigma_y = -i(S+ - S-) and sigma_z = [sigma_x, sigma_y]/2i.  For
    dim = 2 with unit lambda01 these are exactly the Pauli matrices.
    """
    sx = model.sigma_x
    upper = np.triu(sx, k=1)
    sy = -1j * (upper - upper.T)
    sz = (sx @ sy - sy @ sx) / 2j
    return PseudoPauliSet(sigma_y=sy, sigma_z=sz)
