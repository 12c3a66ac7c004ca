"""Hill operators, developing maps and coadjoint Virasoro orbits."""
from .circle import MonotoneGridFunction, SampledDensity
from .devmap import (DevelopingMap, GroupPathSpec, act_diff, act_psl2, exponential_path,
                     from_group_path, from_potential, hill_of, orbit_invariants, q_of,
                     stabilizer_generator)
from .errors import VirorbitError
from .hill import HillPotential, coadjoint_action, solve_hill
from .sl2 import (ConjClass, Sl2TildeElement, classify, hyperbolic, in_positive_subset,
                  parabolic, rotation, translation_number)

__version__ = "0.1.0"

__all__ = [
    "MonotoneGridFunction", "SampledDensity",
    "DevelopingMap", "GroupPathSpec", "act_diff", "act_psl2", "exponential_path",
    "from_group_path", "from_potential", "hill_of", "orbit_invariants", "q_of",
    "stabilizer_generator",
    "VirorbitError",
    "HillPotential", "coadjoint_action", "solve_hill",
    "ConjClass", "Sl2TildeElement", "classify", "hyperbolic", "in_positive_subset",
    "parabolic", "rotation", "translation_number",
]
