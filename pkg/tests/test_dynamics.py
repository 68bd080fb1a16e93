import numpy as np
import pytest
from hypothesis import given, strategies as st

from anisosc.dynamics import (
    drift_report,
    evolve_trajectory,
    exact_flow,
    leapfrog_flow,
    rotate,
)
from anisosc.errors import InvalidStep, OriginSingularity, SamplingTooCoarse
from anisosc.phase_space import FrequencySpec, RealPhasePoint, hamiltonian_real
from anisosc.poisson import verify_canonical
from anisosc.sampling import uniform_points

W23 = FrequencySpec((2.0, 3.0))
START = RealPhasePoint([1.0, 0.3], [0.2, 1.0])


def test_zero_time_is_identity():
    assert exact_flow(START, W23, 0.0) == START


def test_quarter_turn():
    out = exact_flow(RealPhasePoint([1.0], [0.0]), FrequencySpec([1.0]), np.pi / 2)
    assert np.allclose(out.as_flat(), [0.0, -1.0], atol=1e-15)


@given(st.floats(-20, 20), st.floats(-20, 20))
def test_group_property(t1, t2):
    a = exact_flow(exact_flow(START, W23, t2), W23, t1)
    b = exact_flow(START, W23, t1 + t2)
    assert np.max(np.abs(a.as_flat() - b.as_flat())) < 1e-12


@given(st.floats(-100, 100))
def test_energy_conserved(t):
    h0 = hamiltonian_real(START, W23)
    assert hamiltonian_real(exact_flow(START, W23, t), W23) == pytest.approx(h0, rel=1e-13)


def test_phase_advances_forward():
    # X = (q - i p)/sqrt2 picks up e^{+i w t}: theta grows
    t = 0.1
    out = exact_flow(START, W23, t)
    dtheta = np.arctan2(-out.p, out.q) - np.arctan2(-START.p, START.q)
    assert np.allclose(dtheta, W23.array * t, atol=1e-14)


def test_flow_is_symplectic():
    q, p = uniform_points(200, seed=1)
    t = 1.7

    def flow(a, b):
        out = [rotate(a[j], b[j], [w], t) for j, w in enumerate(W23.omegas)]
        return [o[0] for o in out], [o[1] for o in out]

    rep = verify_canonical(flow, (q, p))
    assert rep.max_residual < 1e-12


def test_leapfrog_accuracy():
    err = np.max(np.abs(leapfrog_flow(START, W23, 10.0, 1e-4).as_flat() - exact_flow(START, W23, 10.0).as_flat()))
    assert err < 1e-6


def test_leapfrog_second_order():
    t = 2.0
    exact = exact_flow(START, W23, t).as_flat()
    e1 = np.max(np.abs(leapfrog_flow(START, W23, t, 1e-2).as_flat() - exact))
    e2 = np.max(np.abs(leapfrog_flow(START, W23, t, 5e-3).as_flat() - exact))
    assert e1 / e2 == pytest.approx(4.0, abs=0.3)


def test_leapfrog_energy_bounded():
    dt = 0.01
    h0 = hamiltonian_real(START, W23)
    devs = []
    x = START
    for _ in range(100):
        x = leapfrog_flow(x, W23, 1.0, dt)
        devs.append(abs(hamiltonian_real(x, W23) - h0))
    devs = np.array(devs)
    assert devs.max() < 10 * dt**2 * h0
    # no secular growth: late deviations are no larger than early ones
    assert devs[-20:].max() < 1.5 * devs[:20].max() + 1e-15


def test_leapfrog_step_checks():
    with pytest.raises(InvalidStep):
        leapfrog_flow(START, W23, 1.0, 0.0)
    with pytest.raises(InvalidStep):
        leapfrog_flow(START, W23, 1.0, 0.3)


def test_unwrapped_angle_law():
    traj = evolve_trajectory(START, W23, 100.0, 4096)
    law = traj.theta - traj.theta[0] - np.outer(traj.times, W23.array)
    assert np.max(np.abs(law)) < 1e-9
    assert np.all(np.abs(np.diff(traj.theta, axis=0)) < np.pi)
    assert len(traj.points) == len(traj) == 4096


def test_two_sample_trajectory():
    traj = evolve_trajectory(START, W23, 1e-6, 2)
    assert len(traj) == 2
    assert np.all(np.abs(np.diff(traj.theta, axis=0)) < 1e-5)


def test_coarse_sampling_rejected():
    with pytest.raises(SamplingTooCoarse):
        evolve_trajectory(START, W23, 100.0, 50)


def test_origin_start_rejected():
    with pytest.raises(OriginSingularity):
        evolve_trajectory(RealPhasePoint([0.0, 1.0], [0.0, 1.0]), W23, 1.0, 10)


def test_drift_unwrapped():
    rep = drift_report(evolve_trajectory(START, W23, 100.0, 4096), use_unwrapped=True)
    assert rep.drift["I0"] < 1e-12 and rep.drift["I3"] < 1e-12
    assert rep.drift["I1"] < 1e-9 and rep.drift["I2"] < 1e-9
    assert all(v >= 0 for v in rep.drift.values())


def test_drift_principal_branch_is_piecewise():
    rep = drift_report(evolve_trajectory(START, W23, 100.0, 4096), use_unwrapped=False)
    assert rep.branch_crossings > 0
    assert rep.drift["I1"] > 0.1
    assert max(rep.segment_drift.values()) < 1e-9


def test_crossing_count_matches_windings():
    traj = evolve_trajectory(START, W23, 100.0, 4096)
    counts = traj.branch_crossing_counts()
    assert counts[-1] == np.sum(np.abs(traj.winding[-1]))
    assert np.all(np.diff(counts) >= 0)
