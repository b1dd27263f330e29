"""GGS-groups on p^n-adic trees: classification of defining vectors and
finite-depth verification of their branch structures."""
from .tree import (DEFAULT_DEPTH_CAP, Element, GGSGroup, Portrait, TreeShape, apply, commutator,
                   compose, conjugate, equal_at_depth, invert, level_permutation, portrait, section)
from .vectors import (ClassificationReport, DefiningVector, NotApplicable, ReductionData, Route,
                      classify, reduce_vector)
from .quotient import LevelQuotient, SubgroupHandle, build_quotient, fractal_check, level_transitive
from .battery import identity_battery, verify_branch_over
from .intmat import IntegerMatrix

__version__ = '0.1.0'

__all__ = [
    'DEFAULT_DEPTH_CAP', 'Element', 'GGSGroup', 'Portrait', 'TreeShape', 'apply', 'commutator',
    'compose', 'conjugate', 'equal_at_depth', 'invert', 'level_permutation', 'portrait', 'section',
    'ClassificationReport', 'DefiningVector', 'NotApplicable', 'ReductionData', 'Route', 'classify',
    'reduce_vector', 'LevelQuotient', 'SubgroupHandle', 'build_quotient', 'fractal_check',
    'level_transitive', 'identity_battery', 'verify_branch_over', 'IntegerMatrix',
]
