from src.tensor.io import dump_tensor, load_tensor
from src.tensor.spiked import GroundTruth, SpikedModel, correlated_pair, gen_spiked
from src.tensor.tensor3 import (
    Tensor3,
    as_vector,
    contract1,
    contract2,
    contract3,
    frobenius_inner,
    frobenius_norm,
    mode1_matmul,
    mode_matmul,
    outer3,
    projector,
    unfold,
)

__all__ = [
    "Tensor3",
    "SpikedModel",
    "GroundTruth",
    "as_vector",
    "contract1",
    "contract2",
    "contract3",
    "correlated_pair",
    "dump_tensor",
    "frobenius_inner",
    "frobenius_norm",
    "gen_spiked",
    "load_tensor",
    "mode1_matmul",
    "mode_matmul",
    "outer3",
    "projector",
    "unfold",
]
