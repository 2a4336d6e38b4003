import math

# semicircle law of the first-step contraction matrix N
VARIANCE = 2.0 / 3.0
EDGE = 2.0 * math.sqrt(VARIANCE)  # 2 * sqrt(2/3)
EDGE_SQ = 8.0 / 3.0

MODES = (1, 2, 3)

FIRST_STEP_FIELDS = ["lambda1", "rho11", "rho12"]
SECOND_STEP_FIELDS = [
    "lambda2",
    "theta21",
    "theta22",
    "rho21",
    "rho22",
    "kappa",
    "eta",
]
GAMMA1_FIELDS = ["lambda2", "theta21", "theta22", "rho21", "rho22", "eta"]
ALIGNMENT_FIELDS = ["rho11", "rho12", "theta21", "theta22", "rho21", "rho22"]
PARAMETER_FIELDS = ["beta1", "beta2", "alpha"]
OBSERVABLE_FIELDS = ["lambda1_hat", "lambda2_hat", "eta_hat"]
EMPIRICAL_FIELDS = [
    "rho11_hat",
    "rho12_hat",
    "theta21_hat",
    "theta22_hat",
    "rho21_hat",
    "rho22_hat",
    "kappa_hat",
    "eta_hat",
]

SPECTRUM_COLUMNS = ["index", "eigenvalue"]
HISTOGRAM_COLUMNS = ["bin_center", "density"]
DENSITY_COLUMNS = ["x", "density"]
