import csv
import json
from pathlib import Path

import numpy as np
import pytest

from oqsim.demos import DEMOS, run_demo
from oqsim.errors import ArgumentError

GOLDEN = Path(__file__).parent / "golden"


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_registry_is_complete():
    assert set(DEMOS) == {"nonrwa-sweep", "photon-decay", "mc-convergence", "iswap",
                          "jaynes-cummings", "trilinear", "landau-zener", "spin-chain",
                          "coupled-oscillators"}


def test_unknown_demo_lists_choices():
    with pytest.raises(ArgumentError) as info:
        run_demo("nope")
    assert "landau-zener" in str(info.value)


def test_unknown_override_rejected():
    with pytest.raises(ArgumentError):
        run_demo("iswap", overrides={"zeta": 1})


def test_nonrwa_sweep_matches_golden(tmp_path):
    res = run_demo("nonrwa-sweep")
    res.write(tmp_path)
    header, got = read_csv(tmp_path / "nonrwa-sweep.csv")
    gold_header, gold = read_csv(GOLDEN / "nonrwa-sweep.csv")
    assert header == gold_header == ["g", "n_cavity", "n_atom"]
    assert np.allclose(got, gold, rtol=1e-7, atol=1e-9)
    assert np.all(np.diff(gold[:, 1]) > 0)
    whdr, wig = read_csv(tmp_path / "nonrwa-sweep.wigner.csv")
    assert whdr == ["x", "y", "W"] and wig.shape == (200 * 200, 3)
    assert res.meta["wigner_min"] < 0
    assert res.meta["wigner_integral"] == pytest.approx(1.0, abs=1e-3)


def test_landau_zener_outputs(tmp_path):
    res = run_demo("landau-zener")
    paths = {p.name for p in res.write(tmp_path)}
    assert {"landau-zener.csv", "landau-zener.bloch.csv", "landau-zener.meta.json"} <= paths
    header, bloch = read_csv(tmp_path / "landau-zener.bloch.csv")
    assert header == ["t", "x", "y", "z"]
    # a pure state stays on the sphere
    assert np.allclose(np.sum(bloch[:, 1:] ** 2, axis=1), 1.0, atol=1e-5)
    assert res.meta["abs_error"] <= 0.02


def test_jaynes_cummings_damped_rabi():
    res = run_demo("jaynes-cummings")
    na = res.data["na"]
    nc = res.data["nc"]
    assert na[0] == pytest.approx(1.0)
    # excitation swaps into the cavity and back, with decaying contrast
    assert nc.max() > 0.5
    assert na[-1] < 0.9
    meta = json.loads(json.dumps(res.meta, default=float))
    assert meta["gamma"] == 0.05 and meta["kappa"] == 0.005 and meta["nth"] == 0.75


def test_coupled_oscillators_exchange():
    res = run_demo("coupled-oscillators", overrides={"N": 6})
    na, nb = res.data["na"], res.data["nb"]
    assert na[0] == pytest.approx(5) and nb[0] == pytest.approx(4)
    assert np.all(np.diff(na + nb) <= 1e-6)  # only mode a is damped


def test_spin_chain_small_agrees():
    res = run_demo("spin-chain", overrides={"M": 2, "ntraj": 200})
    assert res.meta["relative_deviation"] < 0.05


def test_trilinear_closed_symmetry():
    res = run_demo("trilinear", overrides={"N": 4, "alpha2": 1.0, "ntraj": 20, "nt": 41})
    assert res.meta["closed_signal_idler_max_diff"] < 1e-9
    assert not res.meta["truncation_warning"] or res.meta["N"] == 4
