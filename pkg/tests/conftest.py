import hypothesis
import numpy as np
import pytest

from cloudband_game import CloudBandSpec, GameSpec, PayoffTable, validate_spec

hypothesis.settings.register_profile(
    "suite", max_examples=60, derandomize=True, deadline=None
)
hypothesis.settings.load_profile("suite")

# Values frozen from the arbitrary-precision oracle in tests/oracles.py.
CDF_30_5_P01 = 0.9268098916001202
CDF_30_11_P025 = 0.9493417199484484
CDF_50_11_P02 = 0.710667604988171
CDF_50_11_P025 = 0.38161856466153055
DEFENDER_UTILITY_A30_D30_P025 = 3.9868343989689676  # 20 * CDF_30_11_P025 - 0.5 * 30
ATTACKER_UTILITY_A30_D30_P025 = -11.240125799226726  # 15 * (1 - CDF) - 0.4 * 30


def single_band_spec(
    p: float = 0.25,
    min_functional: int = 20,
    capacity: int = 100,
    defender_grid=(20, 42),
    attacker_grid=(10, 50),
    **econ,
) -> GameSpec:
    band = CloudBandSpec(
        band_id=1,
        capacity=capacity,
        min_functional=min_functional,
        attack_success_prob=p,
        **econ,
    )
    return validate_spec(GameSpec(
        bands=(band,),
        propagation_probs=(),
        defender_grid=({"start": defender_grid[0], "stop": defender_grid[1], "step": 1},),
        attacker_grid=({"start": attacker_grid[0], "stop": attacker_grid[1], "step": 1},),
    ))


def three_band_spec(propagation=(0.5, 0.25)) -> GameSpec:
    return validate_spec(GameSpec(
        bands=(
            CloudBandSpec(1, 100, 20, 0.1),
            CloudBandSpec(2, 80, 15, 0.25, defender_loss=30.0, attacker_gain=10.0,
                          defense_unit_cost=0.7, attack_unit_cost=0.3),
            CloudBandSpec(3, 60, 10, 0.4, defender_loss=40.0, attacker_gain=25.0),
        ),
        propagation_probs=propagation,
        defender_grid=({"start": 15, "stop": 35, "step": 5},
                       {"start": 10, "stop": 30, "step": 10}, [5, 10, 20]),
        attacker_grid=({"start": 0, "stop": 40, "step": 20}, [0, 10, 20], [0, 30]),
    ))


@pytest.fixture
def matching_pennies() -> PayoffTable:
    defender = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return PayoffTable.from_matrices(defender, -defender)


def random_bimatrix(rng: np.random.Generator, max_dim: int = 30):
    n_rows = int(rng.integers(1, max_dim + 1))
    n_cols = int(rng.integers(1, max_dim + 1))
    d = rng.uniform(-10, 10, size=(n_rows, n_cols))
    a = rng.uniform(-10, 10, size=(n_rows, n_cols))
    return d, a
