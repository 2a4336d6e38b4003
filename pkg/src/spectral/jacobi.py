import numpy as np

from src.exception import ConvergenceError, DimensionError, ParameterError

OFF_TOL = 1e-12
MAX_SWEEPS = 60
SYMMETRY_TOL = 1e-12


def round_robin_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint (p, q) index pairs covering every pair once per sweep.

    Odd sizes get a dummy index whose pairs are dropped.
    """
    m = n + (n % 2)
    players = np.arange(m)
    rounds = []
    for _ in range(m - 1):
        left = players[: m // 2]
        right = players[::-1][: m // 2]
        keep = (left < n) & (right < n)
        P = np.minimum(left, right)[keep]
        Q = np.maximum(left, right)[keep]
        rounds.append((P, Q))
        # circle method: player 0 stays, the others rotate by one
        players = np.concatenate([players[:1], players[-1:], players[1:-1]])
    return rounds


def off_diagonal_norm(A: np.ndarray) -> float:
    """Frobenius norm of the strictly off-diagonal part of a symmetric matrix."""
    upper = np.triu(A, k=1)
    return float(np.sqrt(2.0) * np.linalg.norm(upper))


def _rotations(
    A: np.ndarray, P: np.ndarray, Q: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    app = A[P, P]
    aqq = A[Q, Q]
    apq = A[P, Q]
    active = apq != 0.0
    safe_apq = np.where(active, apq, 1.0)
    theta = (aqq - app) / (2.0 * safe_apq)
    t = np.sign(theta) / (np.abs(theta) + np.hypot(1.0, theta))
    t = np.where(theta == 0.0, 1.0, t)
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    c = np.where(active, c, 1.0)
    s = np.where(active, s, 0.0)
    return c, s, active


def sym_eigh(
    S: np.ndarray, tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    S : (n, n) symmetric matrix
    tol : stop when the off-diagonal Frobenius norm is below tol * ||S||_F

    Returns
    -------
    eigenvalues in ascending order and the matching eigenvectors as columns.
    """
    A = np.array(S, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    scale = float(np.linalg.norm(A))
    if not np.allclose(A, A.T, rtol=0.0, atol=SYMMETRY_TOL * max(scale, 1.0)):
        raise ParameterError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(n)

    if n > 1 and scale > 0.0:
        rounds = round_robin_pairs(n)
        for sweep in range(max_sweeps):
            if off_diagonal_norm(A) <= tol * scale:
                break
            for P, Q in rounds:
                c, s, active = _rotations(A, P, Q)
                Ap, Aq = A[P, :].copy(), A[Q, :].copy()
                A[P, :] = c[:, None] * Ap - s[:, None] * Aq
                A[Q, :] = s[:, None] * Ap + c[:, None] * Aq
                Ap, Aq = A[:, P].copy(), A[:, Q].copy()
                A[:, P] = c * Ap - s * Aq
                A[:, Q] = s * Ap + c * Aq
                # annihilated pairs
                A[P[active], Q[active]] = 0.0
                A[Q[active], P[active]] = 0.0
                Vp, Vq = V[:, P].copy(), V[:, Q].copy()
                V[:, P] = c * Vp - s * Vq
                V[:, Q] = s * Vp + c * Vq
        else:
            off = off_diagonal_norm(A)
            if off > tol * scale:
                raise ConvergenceError(
                    f"Jacobi did not converge in {max_sweeps} sweeps", residuals=off
                )

    eigenvalues = np.diag(A).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], V[:, order]


def sym_eigvals(S: np.ndarray, tol: float = OFF_TOL) -> np.ndarray:
    return sym_eigh(S, tol=tol)[0]


def leading_eigenvector(S: np.ndarray) -> np.ndarray:
    _, vectors = sym_eigh(S)
    return vectors[:, -1]
