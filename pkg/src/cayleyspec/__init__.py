"""Automata groups of Cayley machines of finite groups: spectra, spectral measures,
fixed points, Ihara zeta series and lamplighter walk moments."""

from __future__ import annotations

from .errors import CayleySpecError
from .groups import FiniteGroup, Permutation, builtin_group, load_group, make_cyclic, make_from_table, regular_perm
from .machines import MealyMachine, MachineState, act, cayley_machine, invert, product, reset_inverse_machine
from .measures import DiscreteMeasure, kns_measure, level_measure
from .spectra import closed_form_spectrum, numeric_spectrum
from .tree import AutomatonGroup, TreeElement, depth, fix_count, level_permutation

__version__ = "0.1.0"
