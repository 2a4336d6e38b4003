import numpy as np

from src.exception import ParameterError

SEED_MASK = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by a 64-bit seed."""
    if seed < 0:
        raise ParameterError(f"seed must be non-negative (specified: {seed})")
    return np.random.Generator(np.random.Philox(seed & SEED_MASK))


def trial_seed(seed: int, trial: int) -> int:
    return (seed + trial) & SEED_MASK


def trial_seeds(seed: int, num_trials: int) -> list[int]:
    return [trial_seed(seed, t) for t in range(num_trials)]


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal(dim)
    return g / np.linalg.norm(g)
