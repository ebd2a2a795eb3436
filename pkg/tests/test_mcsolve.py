import io

import numpy as np
import pytest

from oqsim import (_kernels, SolverOptions, TimeDependentOperator, TrajectoryConfig, basis, destroy,
                   mcsolve, num, odesolve, qeye, sigmam, sigmax, sigmaz, tensor)
from oqsim.errors import ArgumentError, DimensionError, QTypeError, TrajectoryError
from oqsim.mcsolve import (apply_collapse, build_effective_hamiltonian, jump_probabilities,
                           select_collapse, splitmix64, trajectory_seed)

from conftest import BACKENDS


def test_splitmix64_reference_values():
    # first outputs of the reference generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4
    seeds = {trajectory_seed(7, i) for i in range(1000)}
    assert len(seeds) == 1000


@pytest.mark.parametrize("weights,r,expected", [
    ([0.25, 0.75], 0.1, 0),
    ([0.25, 0.75], 0.25, 0),
    ([0.25, 0.75], 0.2500001, 1),
    ([0.25, 0.75], 1.0, 1),
    ([0.0, 1.0], 1e-9, 1),
    ([0.5, 0.0, 0.5], 0.7, 2),
])
def test_select_collapse(weights, r, expected):
    assert select_collapse(weights, r) == expected


def test_apply_collapse_and_probabilities():
    N = 4
    psi = (basis(N, 1) + basis(N, 3)).unit()
    a = destroy(N)
    out = apply_collapse(psi, a)
    want = (basis(N, 0) + np.sqrt(3) * basis(N, 2)).unit()
    assert (out - want).norm() < 1e-12
    total, w = jump_probabilities(psi, [a, 2 * a])
    # <n> = (1 + 3) / 2
    assert total == pytest.approx(2.0 * 5)
    assert w == pytest.approx([0.2, 0.8])


def test_effective_hamiltonian():
    c = np.sqrt(0.3) * sigmam()
    heff = build_effective_hamiltonian(sigmaz(), [c])
    want = sigmaz() - 0.5j * c.dag() * c
    assert heff.operator() == want


def test_no_collapse_equals_schrodinger():
    H = 0.7 * sigmax() + 0.2 * sigmaz()
    t = np.linspace(0, 5, 26)
    mc = mcsolve(H, basis(2, 0), t, 3, [], [sigmaz()], seed=1, workers=1)
    me = odesolve(H, basis(2, 0), t, [], [sigmaz()])
    assert np.max(np.abs(mc.expect[0] - me.expect[0])) < 1e-6
    assert all(js == [] for js in mc.jumps)


@pytest.mark.parametrize("seed", [11, 12, 13])
def test_jump_fraction_binomial(seed):
    kappa, T, n = 1.3, 1.0, 400
    t = np.linspace(0, T, 5)
    res = mcsolve(0 * num(2), basis(2, 1), t, n, [np.sqrt(kappa) * destroy(2)], [num(2)],
                  seed=seed, workers=1)
    jumped = sum(1 for js in res.jumps if js)
    p = 1 - np.exp(-kappa * T)
    sigma = np.sqrt(n * p * (1 - p))
    assert abs(jumped - n * p) < 4 * sigma
    # a trajectory that jumped reads <n>=0 afterwards, otherwise 1
    final = res.runs_expect[:, 0, -1]
    assert np.array_equal(final == 0, np.array([bool(js) for js in res.jumps]))


def test_channel_split_binomial():
    g1, g2, n = 0.4, 1.2, 600
    c_ops = [np.sqrt(g1) * sigmam(), np.sqrt(g2) * sigmam()]
    res = mcsolve(0 * sigmaz(), basis(2, 0), [0, 20], n, c_ops, [sigmaz()], seed=5, workers=1)
    channels = [js[0][1] for js in res.jumps if js]
    assert len(channels) > 590
    p = g1 / (g1 + g2)
    k = channels.count(0)
    assert abs(k - len(channels) * p) < 4 * np.sqrt(len(channels) * p * (1 - p))


def test_determinism_and_seed_sensitivity():
    a = destroy(5)
    t = np.linspace(0, 2, 11)
    args = (a.dag() * a, basis(5, 3), t, 20, [a], [num(5)])
    r1 = mcsolve(*args, seed=42, workers=1)
    r2 = mcsolve(*args, seed=42, workers=1)
    r3 = mcsolve(*args, seed=43, workers=1)
    assert np.array_equal(r1.runs_expect, r2.runs_expect)
    assert r1.jumps == r2.jumps
    assert not np.array_equal(r1.runs_expect, r3.runs_expect)


def test_worker_count_does_not_change_output():
    a = destroy(4)
    t = np.linspace(0, 1, 6)
    args = (a.dag() * a, basis(4, 2), t, 12, [a], [num(4)])
    outs = []
    for w in (1, 2, 3):
        buf = io.StringIO()
        mcsolve(*args, seed=9, workers=w).to_csv(buf)
        outs.append(buf.getvalue())
    assert outs[0] == outs[1] == outs[2]


def test_backends_give_same_trajectories(monkeypatch):
    a = destroy(4)
    t = np.linspace(0, 1, 6)
    runs = {}
    for name in BACKENDS:
        be = getattr(_kernels, f"{name}_backend")
        for fn in ("spmv", "dp5_linear_step"):
            monkeypatch.setattr(_kernels, fn, getattr(be, fn))
        runs[name] = mcsolve(a.dag() * a, basis(4, 2), t, 6, [a], [num(4)], seed=3, workers=1)
    ref = runs["numpy"]
    assert sum(len(js) for js in ref.jumps) > 0
    for res in runs.values():
        assert [[c for _, c in js] for js in res.jumps] == [[c for _, c in js] for js in ref.jumps]
        for js, jr in zip(res.jumps, ref.jumps):
            assert np.allclose([x for x, _ in js], [x for x, _ in jr], atol=1e-9)
        assert np.allclose(res.runs_expect, ref.runs_expect, atol=1e-9)


def test_time_dependent_hamiltonian_tracks_me():
    H = TimeDependentOperator(0.5 * sigmaz(), [(lambda t, p: np.cos(p["w"] * t), sigmax())],
                              params={"w": 1.0})
    c = [np.sqrt(0.3) * sigmam()]
    t = np.linspace(0, 4, 21)
    me = odesolve(H, basis(2, 0), t, c, [sigmaz()])
    mc = mcsolve(H, basis(2, 0), t, 300, c, [sigmaz()], seed=8, workers=1)
    assert np.mean(np.abs(mc.expect[0] - me.expect[0])) < 0.08


def test_states_stored_without_observables():
    t = np.linspace(0, 1, 3)
    res = mcsolve(num(3), basis(3, 2), t, 2, [destroy(3)], seed=0, workers=1)
    assert len(res.states) == 2 and len(res.states[0]) == 3
    assert all(abs(s.norm() - 1) < 1e-12 for s in res.states[0])


def test_jump_records_serialize():
    res = mcsolve(num(2), basis(2, 1), [0, 5], 3, [destroy(2)], [num(2)], seed=0, workers=1)
    d = res.jumps_dict()
    assert d["ntraj"] == 3 and d["master_seed"] == 0
    assert [t["seed"] for t in d["trajectories"]] == [trajectory_seed(0, i) for i in range(3)]


def test_failure_reports_trajectory():
    opts = SolverOptions(max_internal_steps=1)
    with pytest.raises(TrajectoryError) as info:
        mcsolve(num(3), basis(3, 2), [0, 10], 2, [destroy(3)], [num(3)], seed=4,
                workers=1, options=opts)
    assert info.value.index == 0
    assert info.value.seed == trajectory_seed(4, 0)


def test_argument_errors():
    with pytest.raises(ArgumentError):
        TrajectoryConfig(ntraj=0)
    with pytest.raises(QTypeError):
        mcsolve(num(2), basis(2, 0) * basis(2, 0).dag(), [0, 1], 2)
    with pytest.raises(ArgumentError):
        mcsolve(num(2), 2 * basis(2, 0), [0, 1], 2)
    with pytest.raises(DimensionError):
        mcsolve(tensor(num(2), qeye(2)), basis(2, 0), [0, 1], 2)
