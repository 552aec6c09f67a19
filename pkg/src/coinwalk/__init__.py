"""coinwalk: coined discrete-time quantum walk simulation.

Split-step walks and their automaton limit, three-flavor oscillation on a
six-dimensional coin, and curved-background Dirac dynamics from modified
inhomogeneous walks, with momentum-space spectral tools, entanglement
observables, and a deterministic scenario CLI.
"""

__version__ = "0.1.0"

from .backend import BACKEND
from .coins import CoinAngles, CoinSchedule, block_direct_sum, u2_from_angles
from .engines import (DCA, DQW, SSDQW, ModifiedSSDQW, NeutrinoU6, crw_distribution,
                      evolve, step_dca, step_dqw, step_modified, step_neutrino,
                      step_ssdqw)
from .observables import (entanglement_entropy, negativity, position_probability,
                          reduced_coin_state)
from .spectral import (hamiltonian_from_unitary, hk_closed_form, momentum_grid,
                       quasienergy, zbw_frequency)
from .state import Lattice, TwoParticleState, WalkState, make_basis_state, norm, superpose

__all__ = [
    "BACKEND",
    "CoinAngles",
    "CoinSchedule",
    "DCA",
    "DQW",
    "Lattice",
    "ModifiedSSDQW",
    "NeutrinoU6",
    "SSDQW",
    "TwoParticleState",
    "WalkState",
    "__version__",
    "block_direct_sum",
    "crw_distribution",
    "entanglement_entropy",
    "evolve",
    "hamiltonian_from_unitary",
    "hk_closed_form",
    "make_basis_state",
    "momentum_grid",
    "negativity",
    "norm",
    "position_probability",
    "quasienergy",
    "reduced_coin_state",
    "step_dca",
    "step_dqw",
    "step_modified",
    "step_neutrino",
    "step_ssdqw",
    "superpose",
    "u2_from_angles",
    "zbw_frequency",
]
