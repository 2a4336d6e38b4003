from dataclasses import asdict, dataclass

import numpy as np

from src.rank_one import RankOneFactor
from src.tensor import GroundTruth

NAN = float("nan")


@dataclass(frozen=True)
class EmpiricalAlignments:
    """Absolute inner products of the two deflation factors with the planted components."""

    rho11_hat: float = NAN
    rho12_hat: float = NAN
    theta21_hat: float = NAN
    theta22_hat: float = NAN
    rho21_hat: float = NAN
    rho22_hat: float = NAN
    kappa_hat: float = NAN
    eta_hat: float = NAN
    # agreement across the modes that should match asymptotically
    spread_rho1: float = NAN
    spread_rho2: float = NAN
    spread_eta: float = NAN

    @property
    def mode_spread(self) -> float:
        return float(np.nanmax([self.spread_rho1, self.spread_rho2, self.spread_eta]))

    def rho1(self) -> np.ndarray:
        return np.array([self.rho11_hat, self.rho12_hat])

    def rho2(self) -> np.ndarray:
        return np.array([self.rho21_hat, self.rho22_hat])

    def theta2(self) -> np.ndarray:
        return np.array([self.theta21_hat, self.theta22_hat])

    def to_record(self) -> dict:
        record = asdict(self)
        record["mode_spread"] = self.mode_spread
        return record


def _abs_inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(a @ b))


def factor_alignments(
    factors: tuple[RankOneFactor, RankOneFactor], truth: GroundTruth | None = None
) -> EmpiricalAlignments:
    f1, f2 = factors
    kappa = _abs_inner(f1.u, f2.u)
    eta_v = _abs_inner(f1.v, f2.v)
    eta_w = _abs_inner(f1.w, f2.w)
    if truth is None:
        return EmpiricalAlignments(kappa_hat=kappa, eta_hat=eta_v, spread_eta=abs(eta_v - eta_w))

    first = np.array(
        [[_abs_inner(vec, comp) for comp in truth.components(mode)] for mode, vec in zip((1, 2, 3), f1.vectors())]
    )
    second = np.array(
        [[_abs_inner(vec, comp) for comp in truth.components(mode)] for mode, vec in zip((1, 2, 3), f2.vectors())]
    )
    return EmpiricalAlignments(
        rho11_hat=first[0, 0],
        rho12_hat=first[0, 1],
        theta21_hat=second[0, 0],
        theta22_hat=second[0, 1],
        rho21_hat=second[1, 0],
        rho22_hat=second[1, 1],
        kappa_hat=kappa,
        eta_hat=eta_v,
        spread_rho1=float(np.max(first.max(axis=0) - first.min(axis=0))),
        spread_rho2=float(np.max(np.abs(second[1] - second[2]))),
        spread_eta=abs(eta_v - eta_w),
    )


def measure_alignments(
    factors: tuple[RankOneFactor, RankOneFactor], truth: GroundTruth
) -> EmpiricalAlignments:
    return factor_alignments(factors, truth)


def assign_components(
    alignments: EmpiricalAlignments, betas: tuple[float, float]
) -> tuple[int, int]:
    """Planted component (0 or 1) matched to each factor.

    The first factor takes the component it aligns with most; ties go to the
    larger SNR. The second factor takes the remaining component.
    """
    rho1 = alignments.rho1()
    if rho1[0] == rho1[1]:
        first = 0 if betas[0] >= betas[1] else 1
    else:
        first = int(np.argmax(rho1))
    return first, 1 - first
