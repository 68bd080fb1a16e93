import numpy as np

from anisosc.phase_space import FrequencySpec
from anisosc.sampling import MIN_RADIUS, branch_safe_points, uniform_points
from anisosc.transforms import complexify_components, principal_consistent


def test_uniform_points_seeded_and_bounded():
    a = uniform_points(300, seed=1)
    b = uniform_points(300, seed=1)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    q, p = a
    assert q.shape == (2, 300)
    assert np.all(np.abs(q) <= 2) and np.all(np.abs(p) <= 2)
    assert np.all(np.hypot(q, p) >= MIN_RADIUS)
    assert not np.array_equal(uniform_points(300, seed=2)[0], q)


def test_branch_safe_points_stay_on_principal_sheet():
    freq = FrequencySpec((0.5, 0.7))
    q, p = branch_safe_points(400, freq, seed=3, margin=0.05)
    assert q.shape == (2, 400)
    assert np.all(q > 0)
    assert np.all(np.abs(np.arctan2(-p, q)) < np.pi / 2 - 0.05)
    X, P = complexify_components(q, p)
    assert principal_consistent(X, P, freq.omegas, margin=0.05).all()
