"""Interior point samplers shared by the tests."""
import numpy as np

# (low, high) box inside the interior of each function's domain
BOXES = {
    "energy": (-3.0, 3.0),
    "negative_entropy": (0.05, 5.0),
    "fermi_dirac": (0.02, 0.98),
    "burg_entropy": (0.05, 5.0),
    "neg_sqrt": (0.05, 5.0),
    "exp_sum": (-2.0, 2.0),
    "softplus_sum": (-3.0, 3.0),
    "burg_conjugate": (-5.0, -0.05),
    "neg_sqrt_conjugate": (-5.0, -0.05),
}
CATALOG = ("energy", "negative_entropy", "fermi_dirac", "burg_entropy", "neg_sqrt")
ALL = tuple(BOXES)


def interior(name, rng, size):
    lo, hi = BOXES[name]
    return rng.uniform(lo, hi, size)


def random_independent_set(rng, name, n, m, margin=0.1, max_tries=200):
    """m+1 points in the sampling box whose differences have smallest
    singular value above ``margin``."""
    for _ in range(max_tries):
        pts = interior(name, rng, (m + 1, n))
        if m == 0:
            return pts
        s = np.linalg.svd(pts[1:] - pts[0], compute_uv=False)
        if s[-1] > margin:
            return pts
    raise RuntimeError("could not draw a well-conditioned point set")
