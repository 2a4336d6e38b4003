from src.asymptotics import FirstStepSolution, SecondStepSolution
from src.pipeline.deflation import DeflationRun, deflate
from src.rank_one import PowerIterConfig
from src.tensor import SpikedModel, gen_spiked

SIMULATION_DIM = 100


def solutions_from_run(run: DeflationRun) -> tuple[FirstStepSolution, SecondStepSolution]:
    """Empirical singular values and alignments of a deflation read as solver unknowns."""
    al = run.alignments
    first = FirstStepSolution(run.factor1.lam, al.rho11_hat, al.rho12_hat)
    second = SecondStepSolution(
        lambda2=run.factor2.lam,
        theta21=al.theta21_hat,
        theta22=al.theta22_hat,
        rho21=al.rho21_hat,
        rho22=al.rho22_hat,
        kappa=0.0 if run.gamma == 1.0 else al.kappa_hat,
        eta=al.eta_hat,
        gamma=run.gamma,
    )
    return first, second


def simulated_initializer(
    beta1: float,
    beta2: float,
    alpha: float,
    gamma: float = 1.0,
    p: int = SIMULATION_DIM,
    seed: int = 0,
    cfg: PowerIterConfig | None = None,
) -> tuple[FirstStepSolution, SecondStepSolution]:
    """Seed the asymptotic solvers with one simulated deflation at the same parameters."""
    T, truth = gen_spiked(SpikedModel(p=p, beta1=beta1, beta2=beta2, alpha=alpha, seed=seed))
    return solutions_from_run(deflate(T, gamma, truth, cfg))
