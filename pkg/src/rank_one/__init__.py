from src.rank_one.power_iteration import (
    PowerIterConfig,
    RankOneFactor,
    power_iteration,
    rank_one_tensor,
    residuals,
    svd_init,
)

__all__ = [
    "PowerIterConfig",
    "RankOneFactor",
    "power_iteration",
    "rank_one_tensor",
    "residuals",
    "svd_init",
]
