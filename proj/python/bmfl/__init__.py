"""Finite-lattice many-boson laboratory: exact ground states, reduced
density matrices, geometric localization, de Finetti measures, Hartree
minimization and Gibbs free energies, all at desk scale."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401
