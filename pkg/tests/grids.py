"""Parameter grids shared by the unit and acceptance tests."""
import itertools

# (mu, sigma, xi, sign) for entropy ordering; xi < 0 keeps the entropy finite
ORDERS_GRID = [
    (mu, sigma, xi, sign)
    for mu, sigma, xi, sign in itertools.product(
        (-1.0, 0.0, 1.0, 4.36), (0.3, 1.0, 2.0), (-0.25, -0.5, -1.0, -1.5), (1, -1))
]

# delta-method gradient check: 3 x 3 x 3 parameters x 5 probabilities
GRADIENT_MU = (-0.5, 0.4, 4.36)
GRADIENT_SIGMA = (0.25, 0.8, 1.5)
GRADIENT_XI = (-0.4, 0.15, 0.6)
GRADIENT_P = (0.05, 0.25, 0.5, 0.9, 0.99)

MGF_ALPHA = (1 / 3, 1 / 2, 2 / 3, 1, 3 / 2, 2, 3)
MGF_T = (0.1, 0.5, 1, 2, 5)

MOMENT_CASES = [(-0.25, 1), (-0.5, 1), (-1.5, 1), (0.5, -1), (1, -1)]

RAINFALL_PGEV_FIT = (4.3614, 0.2853, -0.2386)
