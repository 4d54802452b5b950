"""Finite-difference ladder-qubit model on a superconducting phase grid.

The junction Hamiltonian H = E_C p^2 - E_J cos(phi) is discretized with
central differences on a uniform phi grid with hard-wall (Dirichlet)
boundaries, giving a real symmetric tridiagonal matrix with hopping
tau = E_C / a^2 and on-site terms 2*tau - E_J cos(phi_k).

Here E_C is the (2e)^2/2C charging energy; the dimensionless ratio the
constructor takes (``ej_over_ec``) uses the e^2/2C convention common in
device specs, hence the factor 4 between them.  With E_J = 22.05 GHz and
ej_over_ec = 100 this puts the qubit transition at 6 GHz with a 4%
relative anharmonicity.

Unit convention: constructor inputs are ordinary frequencies in GHz;
everything stored on the model is angular (rad/ns) so that time
evolution reads exp(-i E t) with t in ns.  GHz accessors divide by 2*pi.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .tridiag import eigh_tridiagonal

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TransmonParams:
    """Junction constants and phase-grid geometry.

    Attributes
    ----------
    e_j : float
        Josephson energy, ordinary frequency in GHz.
    ej_over_ec : float
        Dimensionless E_J/E_C ratio (E_C in the e^2/2C convention).
    grid_sites : int
        Number of phase grid points (>= 3).
    phase_min, phase_max : float
        Grid endpoints in radians; hard walls sit just outside.
    """

    e_j: float = 22.05
    ej_over_ec: float = 100.0
    grid_sites: int = 100
    phase_min: float = -math.pi
    phase_max: float = math.pi

    def __post_init__(self):
        vals = (self.e_j, self.ej_over_ec, self.phase_min, self.phase_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("non-finite junction parameter")
        if self.e_j <= 0:
            raise ValidationError("e_j must be positive")
        if self.ej_over_ec <= 0:
            raise ValidationError("ej_over_ec must be positive")
        if self.grid_sites < 3:
            raise ValidationError("grid_sites must be at least 3")
        if not self.phase_min < self.phase_max:
            raise ValidationError("phase_min must be below phase_max")

    @property
    def e_c(self):
        """Charging energy e^2/2C in GHz (enters analytic estimates)."""
        return self.e_j / self.ej_over_ec


@dataclass(frozen=True)
class LatticeHamiltonian:
    """Tridiagonal phase-grid Hamiltonian, all energies in rad/ns.

    The implied matrix is tridiag(-hopping, onsite, -hopping); ``onsite``
    holds 2*tau - u_k with u_k = E_J cos(phi_k) and hopping tau = E_C/a^2
    in the (2e)^2/2C convention.
    """

    onsite: np.ndarray
    hopping: float
    phase_coords: np.ndarray

    @property
    def grid_sites(self):
        return self.onsite.size

    @property
    def grid_spacing(self):
        return float(self.phase_coords[1] - self.phase_coords[0])

    def dense(self):
        """Dense matrix form (used by test oracles; rad/ns)."""
        n = self.grid_sites
        h = np.diag(self.onsite)
        idx = np.arange(n - 1)
        h[idx, idx + 1] = -self.hopping
        h[idx + 1, idx] = -self.hopping
        return h

    def energy_bound(self):
        """Gershgorin upper bound on |eigenvalue| in rad/ns."""
        return float(np.max(np.abs(self.onsite)) + 2.0 * abs(self.hopping))


@dataclass(frozen=True)
class EigenSystem:
    """Lowest eigenpairs of the lattice, ascending, orthonormal.

    ``energies`` are in rad/ns; ``states`` holds eigenvectors as columns
    over the phase grid with the sign fixed so each vector's largest
    magnitude component is positive.
    """

    energies: np.ndarray
    states: np.ndarray
    phase_coords: np.ndarray

    @property
    def n_levels(self):
        return self.energies.size

    def energies_ghz(self):
        return self.energies / TWO_PI


@dataclass(frozen=True)
class TransitionFrequencies:
    """omega01, omega12 and the anharmonicity delta2, in rad/ns."""

    omega01: float
    omega12: float
    delta2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "delta2", self.omega01 - self.omega12)

    def omega01_ghz(self):
        return self.omega01 / TWO_PI

    def omega12_ghz(self):
        return self.omega12 / TWO_PI

    def delta2_ghz(self):
        return self.delta2 / TWO_PI


def build_lattice(params: TransmonParams) -> LatticeHamiltonian:
    """Discretize the junction Hamiltonian on the phase grid.

    Returns the tridiagonal data in rad/ns.  E_C is derived from
    params.e_j / params.ej_over_ec and converted to the (2e)^2/2C
    convention (factor 4) that the kinetic term carries.
    """
    phi = np.linspace(params.phase_min, params.phase_max, params.grid_sites)
    a = (params.phase_max - params.phase_min) / (params.grid_sites - 1)
    e_c_big = 4.0 * params.e_c  # (2e)^2/2C convention
    tau = TWO_PI * e_c_big / a**2
    onsite = 2.0 * tau - TWO_PI * params.e_j * np.cos(phi)
    return LatticeHamiltonian(onsite=onsite, hopping=tau, phase_coords=phi)


def solve_eigensystem(h: LatticeHamiltonian, n_levels: int) -> EigenSystem:
    """Lowest ``n_levels`` eigenpairs of the lattice Hamiltonian.

    Implicit-shift QL on the tridiagonal form; eigenvalues ascending,
    eigenvectors orthonormal with a deterministic sign convention.
    """
    n = h.grid_sites
    if not 1 <= n_levels <= n:
        raise ValidationError(f"n_levels must be in [1, {n}]")
    offdiag = np.full(n - 1, -h.hopping)
    w, v = eigh_tridiagonal(h.onsite, offdiag)
    w = w[:n_levels]
    v = v[:, :n_levels].copy()
    # fix the global sign of each state: largest-|.| component positive
    for k in range(n_levels):
        j = int(np.argmax(np.abs(v[:, k])))
        if v[j, k] < 0:
            v[:, k] = -v[:, k]
    if np.any(np.diff(w) <= 0):
        raise ValidationError("requested levels are not strictly increasing")
    return EigenSystem(energies=w, states=v, phase_coords=h.phase_coords.copy())


def phase_operator(h: LatticeHamiltonian) -> np.ndarray:
    """Diagonal of the full-lattice coupling operator (the phi_k values)."""
    return h.phase_coords.copy()


def transition_frequencies(eigs: EigenSystem) -> TransitionFrequencies:
    """omega01 = E1-E0, omega12 = E2-E1 and delta2 = omega01-omega12."""
    if eigs.n_levels < 3:
        raise ValidationError("need at least 3 levels for transition frequencies")
    e = eigs.energies
    return TransitionFrequencies(omega01=float(e[1] - e[0]), omega12=float(e[2] - e[1]))


def analytic_transmon_estimate(params: TransmonParams) -> float:
    """sqrt(8 E_J E_C) - E_C in GHz, the standard large-ratio estimate."""
    return math.sqrt(8.0 * params.e_j * params.e_c) - params.e_c


def wavefunction_rows(eigs: EigenSystem, n_states: int = 4):
    """Rows (index, phi_k, psi_0..psi_{n-1}) for CSV export."""
    n_states = min(n_states, eigs.n_levels)
    rows = []
    for k in range(eigs.phase_coords.size):
        rows.append(
            [k, eigs.phase_coords[k]] + [eigs.states[k, j] for j in range(n_states)]
        )
    header = ["index", "phi_rad"] + [f"psi{j}" for j in range(n_states)]
    return header, rows
