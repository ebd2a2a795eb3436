import copy
import json
from pathlib import Path

import numpy as np
import pytest

from oqsim import destroy, sigmaz
from oqsim.errors import DimensionError, ScenarioError
from oqsim.scenario import build_model, load_scenario, parse_scenario, run_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

DECAY = {
    "name": "decay",
    "dims": ["N"],
    "params": {"N": 4, "kappa": 0.5},
    "operators": {"a": "destroy(N)"},
    "hamiltonian": [{"coeff": 1, "op": "a.dag()*a"}],
    "collapse": [{"rate": "kappa", "op": "a"}],
    "initial": "basis(N, 2)",
    "observables": {"n": "a.dag()*a"},
    "tlist": [0, 2, 11],
    "solver": "mc",
    "mc": {"ntraj": 16, "seed": 3},
}


def spec_of(**changes):
    d = copy.deepcopy(DECAY)
    d.update(changes)
    return parse_scenario(json.dumps(d))


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_round_trip_shipped_files(path):
    spec = load_scenario(path)
    again = parse_scenario(spec.to_json())
    assert again == spec
    assert parse_scenario(again.to_json()).to_dict() == spec.to_dict()


def test_round_trip_keeps_numbers_plain():
    d = spec_of().to_dict()
    assert d["params"]["N"] == 4 and d["tlist"] == [0, 2, 11]


def test_me_run_matches_analytic(tmp_path):
    res = run_scenario(spec_of(), out=tmp_path / "o.csv", solver="me")
    t = res.table.tlist
    assert np.allclose(res.table.expect[0], 2 * np.exp(-0.5 * t), atol=1e-6)
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert lines[0] == "t,n" and len(lines) == 12
    assert all(len(row.split(",")) == 2 for row in lines)
    meta = json.loads((tmp_path / "o.csv.meta.json").read_text())
    assert meta["name"] == "decay" and meta["solver"] == "me"
    assert meta["params"] == {"N": 4, "kappa": 0.5}
    assert meta["wall_time_s"] >= 0


def test_mc_csv_byte_identical(tmp_path):
    run_scenario(spec_of(), out=tmp_path / "a.csv", workers=1, jumps=tmp_path / "j.json")
    run_scenario(spec_of(), out=tmp_path / "b.csv", workers=2)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    jumps = json.loads((tmp_path / "j.json").read_text())
    assert jumps["ntraj"] == 16 and jumps["master_seed"] == 3
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["seed"] == 3 and meta["ntraj"] == 16


def test_zero_hamiltonian_columns_constant():
    spec = spec_of(hamiltonian=[{"coeff": 0, "op": "a"}], collapse=[],
                   initial="unit(basis(N, 0) + basis(N, 1))", observables={"n": "a.dag()*a", "x": "a+a.dag()"})
    for solver in ("me", "es", "mc"):
        res = run_scenario(spec, solver=solver, ntraj=2)
        for col in res.table.expect:
            assert np.allclose(col, col[0], atol=1e-12)


def test_states_dump_without_observables(tmp_path):
    run_scenario(spec_of(observables={}), out=tmp_path / "s.csv", solver="me")
    body = json.loads((tmp_path / "s.csv.states.json").read_text())
    assert len(body["tlist"]) == 11 and len(body["states"]) == 11
    assert body["states"][0]["dims"] == [[4], [4]]
    assert (tmp_path / "s.csv").read_text().strip() == "\n".join(
        ["t"] + [f"{t:.17g}" for t in np.linspace(0, 2, 11)])


def test_time_dependent_coefficient_detected():
    model = build_model(load_scenario(SCENARIOS / "landau_zener.json"))
    assert len(model.H.terms) == 1 and model.H.constant is not None
    # v/2 * t with v = 4 pi
    assert model.H(2.0) == model.H(0.0) + 4 * np.pi * sigmaz()


def test_parameter_override():
    model = build_model(spec_of(), {"kappa": 2.0})
    assert model.params["kappa"] == 2.0
    assert model.c_ops[0] == np.sqrt(2.0) * destroy(4)


@pytest.mark.parametrize("changes,error", [
    ({"bogus": 1}, ScenarioError),
    ({"tlist": [0, 1, 1]}, ScenarioError),
    ({"tlist": [0, 1]}, ScenarioError),
    ({"solver": "rk4"}, ScenarioError),
    ({"initial": "basis(N,"}, ScenarioError),
])
def test_invalid_files(changes, error):
    with pytest.raises(error):
        spec_of(**changes)


@pytest.mark.parametrize("changes,error,where", [
    ({"collapse": [{"rate": -1, "op": "a"}]}, ScenarioError, "collapse[0].rate"),
    ({"collapse": [{"rate": 1, "op": "destroy(3)"}]}, DimensionError, "collapse[0]"),
    ({"observables": {"n": "nope"}}, ScenarioError, "observables.n"),
    ({"observables": {"n": "basis(N, 0)"}}, ScenarioError, "observables.n"),
    ({"dims": [0]}, ScenarioError, "dims[0]"),
    ({"tlist": [1, 0, 5]}, ScenarioError, "tlist"),
])
def test_model_errors_name_location(changes, error, where):
    with pytest.raises(error) as info:
        build_model(spec_of(**changes))
    assert where in str(info.value)


def test_mc_needs_ket():
    with pytest.raises(ScenarioError):
        run_scenario(spec_of(initial="fock_dm(N, 1)"), solver="mc")


def test_iswap_file_reports_fidelity():
    res = run_scenario(load_scenario(SCENARIOS / "iswap.json"))
    assert 0 < res.meta["fidelity"] < 1
