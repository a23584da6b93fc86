"""
Services package for the LQ Stackelberg Solver.

This package contains the numerical services: the game model, the follower's
recursion, both leader solvers and the verification oracles.
"""

from .game_model import GameModelService, StackedDynamics
from .follower import FollowerService
from .precommit import PrecommitService
from .equilibrium import EquilibriumService
from .verify import VerificationService

__all__ = [
    'GameModelService',
    'StackedDynamics',
    'FollowerService',
    'PrecommitService',
    'EquilibriumService',
    'VerificationService'
]
