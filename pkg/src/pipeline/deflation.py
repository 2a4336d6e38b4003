from dataclasses import dataclass

from src.exception import ParameterError
from src.pipeline.alignment import EmpiricalAlignments, assign_components, factor_alignments
from src.rank_one import PowerIterConfig, RankOneFactor, power_iteration
from src.tensor import GroundTruth, Tensor3, mode1_matmul, projector


@dataclass(frozen=True, eq=False)
class DeflationRun:
    gamma: float
    factor1: RankOneFactor
    factor2: RankOneFactor
    alignments: EmpiricalAlignments

    @property
    def factors(self) -> tuple[RankOneFactor, RankOneFactor]:
        return self.factor1, self.factor2

    def assigned(self, betas: tuple[float, float]) -> tuple[int, int]:
        return assign_components(self.alignments, betas)

    def component_alignments(self, betas: tuple[float, float]) -> tuple[float, float]:
        """(first-factor alignment with its component, second-factor rho2 with its component)."""
        c1, c2 = self.assigned(betas)
        return float(self.alignments.rho1()[c1]), float(self.alignments.rho2()[c2])

    def to_record(self) -> dict:
        record = dict(
            gamma=self.gamma,
            lambda1_hat=self.factor1.lam,
            lambda2_hat=self.factor2.lam,
            n_iter1=self.factor1.n_iter,
            n_iter2=self.factor2.n_iter,
        )
        record.update(self.alignments.to_record())
        return record


def deflate(
    T: Tensor3,
    gamma: float,
    truth: GroundTruth | None = None,
    cfg: PowerIterConfig | None = None,
) -> DeflationRun:
    """Two-step orthogonalized deflation: the second step sees T x_1 (I - gamma u1 u1^T)."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must be in [0, 1] (specified: {gamma})")
    factor1 = power_iteration(T, cfg)
    T2 = mode1_matmul(T, projector(factor1.u, gamma))
    factor2 = power_iteration(T2, cfg)
    return DeflationRun(
        gamma=gamma,
        factor1=factor1,
        factor2=factor2,
        alignments=factor_alignments((factor1, factor2), truth),
    )
