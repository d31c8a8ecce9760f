"""Frozen audit constants for the implied constants in the asymptotic bounds.

Each value is an observed maximum over a calibration grid (tools/calibrate.py,
seed 20261016) times a safety factor of 2, or 10 for E1_C, rounded up to two
significant figures. The acceptance grids use other seeds and sizes.
"""

# |sum_{n<=H} e(2 pi P(n)/q)| / (sqrt(q) log q); observed 0.412
INCOMPLETE_SUM_RATIO = 0.83

# full-period decomposition with a rational top coefficient; observed 0.309
TOP_SUM_C = 0.62

# ||S| - floor(N/q)^(n-1) prod|T|| against (c5 + Q^(-Delta0/2)) (R/(L sqrt Q))^(n-1); observed 0.179
E2_C = 0.36

# per-coordinate error of the full-period decomposition of S(u; x_j, t); observed 0.245
SJ_C = 0.49

# ||T_t f| - prod(weights) |S|| against (c1 + c2 delta0) (R/(L sqrt Q))^(n-1); observed 6.5e-5
E1_C = 0.00066

# baseline: measure of {x in the sampled half ball : |T_t f(x)| >= 1/2}; observed minimum 1.571, halved
BASELINE_MASS_MIN = 0.7856
