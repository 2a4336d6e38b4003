from pathlib import Path

import numpy as np
import pytest
from hydra import compose, initialize_config_dir
from hydra.core.global_hydra import GlobalHydra

from src.random_util import make_rng
from src.tensor import SpikedModel, Tensor3, gen_spiked

CONF_DIR = Path(__file__).resolve().parents[1] / "run" / "conf"


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(1234)


@pytest.fixture
def small_tensor(rng) -> Tensor3:
    return Tensor3(rng.standard_normal((4, 4, 4)))


@pytest.fixture(scope="module")
def spiked_orthogonal():
    return gen_spiked(SpikedModel(p=30, beta1=12.0, beta2=8.0, alpha=0.0, seed=7))


@pytest.fixture(scope="module")
def spiked_correlated():
    return gen_spiked(SpikedModel(p=30, beta1=12.0, beta2=8.0, alpha=0.5, seed=11))


@pytest.fixture
def compose_config():
    """Compose a config from run/conf the way the entry points do."""

    def _compose(config_name: str, overrides: list[str] | None = None):
        if GlobalHydra.instance().is_initialized():
            GlobalHydra.instance().clear()
        with initialize_config_dir(config_dir=str(CONF_DIR), version_base="1.2"):
            return compose(config_name=config_name, overrides=overrides or [])

    return _compose
