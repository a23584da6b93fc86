"""Shared fixtures: the two worked examples and a seeded random-instance factory."""

from typing import Callable, Optional

import numpy as np
import pytest

import config
from models.game import GameSpec
from repositories.spec_repository import GameSpecRepository
from services.equilibrium import EquilibriumService
from services.follower import FollowerService
from services.game_model import GameModelService
from services.precommit import PrecommitService
from services.verify import VerificationService


def _gram(rng: np.random.Generator, d: int, shift: float = 0.0) -> np.ndarray:
    L = rng.standard_normal((d, d))
    return L @ L.T / d + shift * np.eye(d)


def random_spec(
    seed: int,
    n: Optional[int] = None,
    m1: Optional[int] = None,
    m2: Optional[int] = None,
    N: Optional[int] = None,
    zero_r2: bool = False
) -> GameSpec:
    """Random game with PSD Gram weights, R1 and W2 shifted to be positive definite."""
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 4))
    m1 = m1 or int(rng.integers(1, 4))
    m2 = m2 or int(rng.integers(1, 4))
    N = N or int(rng.integers(3, 7))
    return GameSpec.build(
        N=N,
        t=0,
        x=rng.standard_normal(n),
        A=0.8 * rng.standard_normal((n, n)) / np.sqrt(n),
        B1=rng.standard_normal((n, m1)) / np.sqrt(n),
        B2=rng.standard_normal((n, m2)) / np.sqrt(n),
        Q1=_gram(rng, n),
        Q2=_gram(rng, n),
        R1=_gram(rng, m1, 0.5),
        R2=np.zeros((m1, m1)) if zero_r2 else _gram(rng, m1),
        W1=_gram(rng, m2),
        W2=_gram(rng, m2, 0.5),
        G1=_gram(rng, n),
        G2=_gram(rng, n)
    )


@pytest.fixture
def make_instance() -> Callable[..., GameSpec]:
    return random_spec


@pytest.fixture(scope="session")
def spec_repository() -> GameSpecRepository:
    return GameSpecRepository()


@pytest.fixture(scope="session")
def example1_path():
    return config.FIXTURES_DIR / "example1.json"


@pytest.fixture(scope="session")
def example2_path():
    return config.FIXTURES_DIR / "example2.json"


@pytest.fixture(scope="session")
def example1(spec_repository, example1_path) -> GameSpec:
    spec, _ = spec_repository.load(example1_path)
    return spec


@pytest.fixture(scope="session")
def example2(spec_repository, example2_path) -> GameSpec:
    spec, _ = spec_repository.load(example2_path)
    return spec


@pytest.fixture
def game_model() -> GameModelService:
    return GameModelService()


@pytest.fixture
def follower_service(game_model) -> FollowerService:
    return FollowerService(game_model)


@pytest.fixture
def precommit_service(follower_service, game_model) -> PrecommitService:
    return PrecommitService(follower_service, game_model)


@pytest.fixture
def equilibrium_service(follower_service) -> EquilibriumService:
    return EquilibriumService(follower_service)


@pytest.fixture
def verification_service(equilibrium_service, game_model) -> VerificationService:
    return VerificationService(equilibrium_service, game_model)
