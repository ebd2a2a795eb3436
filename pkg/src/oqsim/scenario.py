"""Declarative JSON scenarios: parse, serialize, run.

A scenario file looks like::

    {
      "name": "decay",
      "dims": [10],
      "params": {"kappa": "1/0.129", "nth": 0.063, "N": 10},
      "operators": {"a": "destroy(N)"},
      "hamiltonian": [{"coeff": "1", "op": "0*a.dag()*a"}],
      "collapse": [{"rate": "kappa*(1+nth)", "op": "a"},
                   {"rate": "kappa*nth", "op": "a.dag()"}],
      "initial": "basis(N, 1)",
      "observables": {"n": "a.dag()*a"},
      "tlist": [0, 0.6, 61],
      "solver": "me",
      "mc": {"ntraj": 500, "seed": 1}
    }

Every string field is an expression (see ``oqsim.expr``). Parameters and
named operators are evaluated in file order and may refer to earlier ones.
Collapse operators are sqrt(rate) * op. The optional ``fidelity_target``
state is compared with the final state and reported in the metadata.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ArgumentError, DimensionError, QuantumError, ScenarioError
from .expr import Coefficient, Num, evaluate, evaluate_operator, parse, unparse
from .integrate import SolverOptions
from .mcsolve import mcsolve
from .mesolve import ExpectationTable, essolve, odesolve
from .metrics import fidelity
from .qobj import Qobj
from .timedep import TimeDependentOperator

__all__ = ["ScenarioSpec", "ScenarioRun", "load_scenario", "parse_scenario",
           "run_scenario", "build_model", "SOLVERS"]

SOLVERS = ("me", "mc", "es")
_KNOWN = {"name", "dims", "params", "operators", "hamiltonian", "collapse", "initial",
          "observables", "tlist", "solver", "mc", "options", "fidelity_target"}


def _expr(value, where):
    if isinstance(value, bool):
        raise ScenarioError(f"{where}: expected a number or expression")
    if isinstance(value, (int, float)):
        return Num(float(value))
    if isinstance(value, str):
        try:
            return parse(value)
        except QuantumError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
    raise ScenarioError(f"{where}: expected a number or expression, got {value!r}")


@dataclass
class ScenarioSpec:
    name: str
    dims: list
    params: dict
    operators: dict
    hamiltonian: list  # [(coeff_ast, op_ast)]
    collapse: list     # [(rate_ast, op_ast)]
    initial: object
    observables: dict
    tlist: tuple       # (start_ast, stop_ast, count)
    solver: str = "me"
    ntraj: int = 500
    seed: int = 0
    options: dict = field(default_factory=dict)
    fidelity_target: object = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ScenarioError("scenario must be a JSON object")
        unknown = set(d) - _KNOWN
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        for key in ("name", "dims", "hamiltonian", "initial", "tlist"):
            if key not in d:
                raise ScenarioError(f"missing field {key!r}")
        dims = d["dims"]
        if not isinstance(dims, list) or not dims:
            raise ScenarioError("dims must be a non-empty list")
        dims = [_expr(x, f"dims[{i}]") for i, x in enumerate(dims)]
        params = {k: _expr(v, f"params.{k}") for k, v in d.get("params", {}).items()}
        operators = {k: _expr(v, f"operators.{k}") for k, v in d.get("operators", {}).items()}
        ham = []
        for i, term in enumerate(d["hamiltonian"]):
            if not isinstance(term, dict) or "op" not in term:
                raise ScenarioError(f"hamiltonian[{i}] needs an 'op' field")
            ham.append((_expr(term.get("coeff", 1), f"hamiltonian[{i}].coeff"),
                        _expr(term["op"], f"hamiltonian[{i}].op")))
        col = []
        for i, term in enumerate(d.get("collapse", [])):
            if not isinstance(term, dict) or "op" not in term:
                raise ScenarioError(f"collapse[{i}] needs an 'op' field")
            col.append((_expr(term.get("rate", 1), f"collapse[{i}].rate"),
                        _expr(term["op"], f"collapse[{i}].op")))
        obs = {k: _expr(v, f"observables.{k}") for k, v in d.get("observables", {}).items()}
        tl = d["tlist"]
        if not isinstance(tl, list) or len(tl) != 3:
            raise ScenarioError("tlist must be [start, stop, count]")
        count = tl[2]
        if isinstance(count, bool) or not isinstance(count, int) or count < 2:
            raise ScenarioError(f"tlist count must be an integer >= 2, got {count!r}")
        solver = d.get("solver", "me")
        if solver not in SOLVERS:
            raise ScenarioError(f"solver must be one of {SOLVERS}, got {solver!r}")
        mc = d.get("mc", {})
        target = d.get("fidelity_target")
        return cls(
            name=str(d["name"]), dims=dims, params=params, operators=operators,
            hamiltonian=ham, collapse=col, initial=_expr(d["initial"], "initial"),
            observables=obs,
            tlist=(_expr(tl[0], "tlist[0]"), _expr(tl[1], "tlist[1]"), count),
            solver=solver, ntraj=int(mc.get("ntraj", 500)), seed=int(mc.get("seed", 0)),
            options=dict(d.get("options", {})),
            fidelity_target=None if target is None else _expr(target, "fidelity_target"),
        )

    def to_dict(self):
        d = {
            "name": self.name,
            "dims": [_out(x) for x in self.dims],
            "params": {k: _out(v) for k, v in self.params.items()},
            "operators": {k: _out(v) for k, v in self.operators.items()},
            "hamiltonian": [{"coeff": _out(c), "op": _out(o)} for c, o in self.hamiltonian],
            "collapse": [{"rate": _out(r), "op": _out(o)} for r, o in self.collapse],
            "initial": _out(self.initial),
            "observables": {k: _out(v) for k, v in self.observables.items()},
            "tlist": [_out(self.tlist[0]), _out(self.tlist[1]), self.tlist[2]],
            "solver": self.solver,
            "mc": {"ntraj": self.ntraj, "seed": self.seed},
        }
        if self.options:
            d["options"] = dict(self.options)
        if self.fidelity_target is not None:
            d["fidelity_target"] = _out(self.fidelity_target)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _out(node):
    if isinstance(node, Num) and isinstance(node.value, float):
        v = node.value
        return int(v) if v.is_integer() and abs(v) < 2 ** 53 else v
    return unparse(node)


def parse_scenario(text):
    try:
        return ScenarioSpec.from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc


def load_scenario(path):
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


@dataclass
class Model:
    H: object
    psi0: Qobj
    c_ops: list
    e_ops: list
    names: list
    tlist: np.ndarray
    params: dict
    target: Qobj | None = None


def _real(v, where):
    if isinstance(v, Qobj):
        raise ScenarioError(f"{where}: expected a number, got a quantum object")
    v = complex(v)
    if abs(v.imag) > 1e-12:
        raise ScenarioError(f"{where}: expected a real number, got {v}")
    return v.real


def _checked(q, dims, where, kinds=("oper",)):
    if not isinstance(q, Qobj):
        raise ScenarioError(f"{where}: expected a quantum object, got {q!r}")
    if q.type not in kinds:
        raise ScenarioError(f"{where}: expected {' or '.join(kinds)}, got {q.type}")
    if q.dims[0] != dims or (q.type == "oper" and q.dims[1] != dims):
        raise DimensionError(f"{where}: dims {q.dims} do not match subsystems {dims}")
    return q


def _wrap(where, fn, *args):
    try:
        return fn(*args)
    except (ScenarioError, DimensionError):
        raise
    except QuantumError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def build_model(spec, param_overrides=None):
    """Evaluate every expression of a spec into solver inputs."""
    params = {}
    for k, node in spec.params.items():
        params[k] = _wrap(f"params.{k}", evaluate_operator, node, params)
    for k, v in (param_overrides or {}).items():
        params[k] = v
    dims = []
    for i, node in enumerate(spec.dims):
        d = _real(_wrap(f"dims[{i}]", evaluate_operator, node, params), f"dims[{i}]")
        if d != int(d) or d < 1:
            raise ScenarioError(f"dims[{i}] must be a positive integer, got {d}")
        dims.append(int(d))
    names = dict(params)
    for k, node in spec.operators.items():
        names[k] = _wrap(f"operators.{k}", evaluate_operator, node, names)

    const = None
    terms = []
    for i, (cnode, onode) in enumerate(spec.hamiltonian):
        where = f"hamiltonian[{i}]"
        op = _checked(_wrap(where, evaluate_operator, onode, names), dims, where)
        coeff = Coefficient(unparse(cnode))
        if coeff.depends_on_t():
            terms.append((coeff, op))
        else:
            c = _wrap(f"{where}.coeff", evaluate_operator, cnode, params)
            const = c * op if const is None else const + c * op
    if terms:
        H = TimeDependentOperator(const, terms, params=params)
    else:
        H = const

    c_ops = []
    for i, (rnode, onode) in enumerate(spec.collapse):
        where = f"collapse[{i}]"
        rate = _real(_wrap(f"{where}.rate", evaluate_operator, rnode, params), f"{where}.rate")
        if rate < 0:
            raise ScenarioError(f"{where}.rate must be non-negative, got {rate}")
        op = _checked(_wrap(where, evaluate_operator, onode, names), dims, where)
        c_ops.append(np.sqrt(rate) * op)

    psi0 = _checked(_wrap("initial", evaluate_operator, spec.initial, names), dims,
                    "initial", ("ket", "oper"))
    e_ops, labels = [], []
    for k, node in spec.observables.items():
        e_ops.append(_checked(_wrap(f"observables.{k}", evaluate_operator, node, names),
                              dims, f"observables.{k}"))
        labels.append(k)
    t0 = _real(_wrap("tlist[0]", evaluate_operator, spec.tlist[0], params), "tlist[0]")
    t1 = _real(_wrap("tlist[1]", evaluate_operator, spec.tlist[1], params), "tlist[1]")
    if not t1 > t0:
        raise ScenarioError(f"tlist stop {t1} must exceed start {t0}")
    target = None
    if spec.fidelity_target is not None:
        target = _checked(_wrap("fidelity_target", evaluate_operator, spec.fidelity_target,
                                names), dims, "fidelity_target", ("ket", "oper"))
    return Model(H, psi0, c_ops, e_ops, labels, np.linspace(t0, t1, spec.tlist[2]),
                 params, target)


@dataclass
class ScenarioRun:
    table: ExpectationTable
    meta: dict
    result: object  # ExpectationTable or EnsembleResult


def _final_state(res):
    if hasattr(res, "final_state"):
        return res.final_state
    return None


def run_scenario(spec, out=None, solver=None, ntraj=None, seed=None, workers=None,
                 jumps=None, param_overrides=None):
    """Solve a scenario; optionally write ``out`` CSV plus ``out.meta.json``.

    Without observables the states go to ``out.states.json`` instead.
    ``jumps`` names a JSON file for Monte-Carlo jump records.
    """
    model = build_model(spec, param_overrides)
    solver = solver or spec.solver
    if solver not in SOLVERS:
        raise ArgumentError(f"solver must be one of {SOLVERS}")
    opts = SolverOptions(**spec.options) if spec.options else SolverOptions()
    ntraj = spec.ntraj if ntraj is None else ntraj
    seed = spec.seed if seed is None else seed
    start = time.perf_counter()
    if solver == "me":
        res = odesolve(model.H, model.psi0, model.tlist, model.c_ops, model.e_ops,
                       options=opts, names=model.names)
        table = res
    elif solver == "es":
        res = essolve(model.H, model.psi0, model.tlist, model.c_ops, model.e_ops,
                      options=opts, names=model.names)
        table = res
    else:
        psi0 = model.psi0
        if not psi0.isket:
            raise ScenarioError("the Monte-Carlo solver needs a ket initial state")
        res = mcsolve(model.H, psi0, model.tlist, ntraj, model.c_ops, model.e_ops,
                      seed=seed, workers=workers, options=opts, names=model.names)
        table = res.table
    wall = time.perf_counter() - start

    meta = {
        "name": spec.name,
        "solver": solver,
        "params": {k: _jsonable(v) for k, v in model.params.items()},
        "seed": seed if solver == "mc" else None,
        "ntraj": ntraj if solver == "mc" else None,
        "wall_time_s": wall,
        "backend": _kernels.BACKEND_NAME,
    }
    final = _final_state(table)
    if model.target is not None and final is not None:
        meta["fidelity"] = fidelity(model.target, final)
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            table.to_csv(fh)
        if not model.e_ops:
            _write_states(out.with_name(out.name + ".states.json"), table, res, solver)
        if solver == "mc" and jumps is not None:
            with open(jumps, "w", encoding="utf-8") as fh:
                res.write_jumps(fh)
        with open(out.with_name(out.name + ".meta.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
    return ScenarioRun(table, meta, res)


def _jsonable(v):
    if isinstance(v, complex):
        return v.real if v.imag == 0 else [v.real, v.imag]
    if isinstance(v, (int, float)):
        return v
    return str(v)


def _write_states(path, table, res, solver):
    if solver == "mc":
        body = {"tlist": list(map(float, table.tlist)),
                "trajectories": [[s.to_dict() for s in run] for run in res.states]}
    else:
        body = {"tlist": list(map(float, table.tlist)),
                "states": [s.to_dict() for s in table.states]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh)
        fh.write("\n")
