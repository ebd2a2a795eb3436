"""Built-in example calculations.

Each demo returns a DemoResult holding named output tables, a metadata
dict and the raw arrays (``data``) for programmatic checks. ``write``
stores ``<name>.csv`` (plus any extra tables) and ``<name>.meta.json``.
Parameters can be overridden by name; ``full_scale`` switches the few
demos that are trimmed for quick runs to their full sizes.
"""
from __future__ import annotations

import csv
import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ArgumentError
from .integrate import SolverOptions
from .mcsolve import mcsolve, trajectory_seed
from .mesolve import density_diagnostics, odesolve
from .metrics import expect, fidelity, ket2dm
from .operators import destroy, num, qeye, sigmam, sigmax, sigmay, sigmaz
from .qobj import tensor
from .states import TruncationWarning, basis, coherent, fock
from .timedep import TimeDependentOperator
from .wigner import PhaseSpaceGrid, wigner_map

__all__ = ["DEMOS", "DemoResult", "run_demo", "Table"]


@dataclass
class Table:
    columns: dict  # name -> 1-d array, all the same length

    def to_csv(self, fh):
        names = list(self.columns)
        cols = [np.asarray(self.columns[n]) for n in names]
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for k in range(len(cols[0])):
            w.writerow([f"{float(c[k]):.17g}" for c in cols])


@dataclass
class DemoResult:
    name: str
    tables: dict  # file suffix ("" for the main table) -> object with to_csv
    meta: dict
    data: dict = field(default_factory=dict)

    def write(self, out_dir):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for suffix, table in self.tables.items():
            path = out_dir / f"{self.name}{suffix}.csv"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                table.to_csv(fh)
            paths.append(path)
        meta_path = out_dir / f"{self.name}.meta.json"
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(self.meta, fh, indent=2, default=float)
            fh.write("\n")
        paths.append(meta_path)
        return paths


def _me_states(H, psi0, tlist, c_ops, e_ops, **kw):
    """ME run that keeps the states so conservation can be audited."""
    res = odesolve(H, psi0, tlist, c_ops, [], **kw)
    values = [expect(op, res.states) for op in e_ops]
    return values, res.states, density_diagnostics(res.states)


def _params(defaults, overrides):
    p = dict(defaults)
    for k, v in (overrides or {}).items():
        if k not in p:
            raise ArgumentError(f"unknown parameter {k!r}; known: {sorted(p)}")
        p[k] = type(p[k])(v) if isinstance(p[k], (int, float)) else v
    return p


# demos ------------------------------------------------------------------

def nonrwa_sweep(p, **_):
    N, wc, wa = p["N"], p["wc"], p["wa"]
    gs = np.linspace(0, p["g_max"], p["ng"]) * 2 * np.pi
    a = tensor(destroy(N), qeye(2))
    sm = tensor(qeye(N), destroy(2))
    nc, na = a.dag() * a, sm.dag() * sm
    nc_expt, na_expt = np.zeros(gs.size), np.zeros(gs.size)
    psi = None
    for k, g in enumerate(gs):
        H = wc * nc + wa * na + g * (a.dag() + a) * (sm + sm.dag())
        _, kets = H.eigenstates()
        psi = kets[0]
        nc_expt[k] = expect(nc, psi)
        na_expt[k] = expect(na, psi)
    rho_cavity = psi.ptrace(0)
    xvec = np.linspace(-p["xmax"], p["xmax"], p["nx"])
    wmap = wigner_map(rho_cavity, PhaseSpaceGrid(xvec, xvec))
    meta = {"wigner_min": float(wmap.values.min()), "wigner_integral": wmap.integral(),
            "g_over_2pi_last": float(gs[-1] / (2 * np.pi))}
    main = Table({"g": gs / (2 * np.pi), "n_cavity": nc_expt, "n_atom": na_expt})
    return {"": main, ".wigner": wmap}, meta, {"g": gs, "nc": nc_expt, "na": na_expt,
                                               "wigner": wmap, "ground_state": psi}


def _decay_model(p):
    N = p["N"]
    a = destroy(N)
    kappa, nth = 1.0 / p["Tc"], p["nth"]
    c_ops = [np.sqrt(kappa * (1 + nth)) * a, np.sqrt(kappa * nth) * a.dag()]
    return a.dag() * a, basis(N, 1), c_ops, num(N), kappa, nth


def photon_decay(p, workers=None, seed=None, **_):
    H, psi0, c_ops, n_op, kappa, nth = _decay_model(p)
    tlist = np.linspace(0, p["tmax"], p["nt"])
    (me,), states, cons = _me_states(H, psi0, tlist, c_ops, [n_op])
    seed = p["seed"] if seed is None else seed
    mc = mcsolve(H, psi0, tlist, p["ntraj"], c_ops, [n_op], seed=seed, workers=workers)
    runs = mc.runs_expect[:, 0, :]
    cols = {"t": tlist, "me": me, "analytic": nth + (1 - nth) * np.exp(-kappa * tlist)}
    for m in (1, 5, 15, p["ntraj"]):
        if m <= runs.shape[0]:
            cols[f"mc_{m}"] = runs[:m].mean(axis=0)
    dev = float(np.mean(np.abs(mc.expect[0] - me)))
    meta = {"mc_mean_abs_deviation": dev, "mc_relative_deviation": dev / float(me.max()),
            "me_max_abs_error_vs_analytic": float(np.max(np.abs(me - cols["analytic"]))),
            "seed": seed, "ntraj": p["ntraj"], "conservation": cons}
    return {"": Table(cols)}, meta, {"tlist": tlist, "me": me, "mc": mc, "states": states}


def deviation_measure(mc_curve, me_curve):
    """Absolute MC-ME deviation summed over time steps, per time step."""
    return float(np.sum(np.abs(mc_curve - me_curve)) / len(me_curve))


def mc_convergence(p, workers=None, seed=None, **_):
    H, psi0, c_ops, n_op, _, _ = _decay_model(p)
    tlist = np.linspace(0, p["tmax"], p["nt"])
    (me,), _, cons = _me_states(H, psi0, tlist, c_ops, [n_op])
    ms = [int(x) for x in str(p["ms"]).split(",")]
    base = p["seed"] if seed is None else seed
    devs = np.zeros(len(ms))
    for j, m in enumerate(ms):
        for rep in range(p["reps"]):
            s = trajectory_seed(base, j * p["reps"] + rep)
            r = mcsolve(H, psi0, tlist, m, c_ops, [n_op], seed=s, workers=workers)
            devs[j] += deviation_measure(r.expect[0], me)
        devs[j] /= p["reps"]
    slope, intercept = np.polyfit(np.log(ms), np.log(devs), 1)
    meta = {"ms": ms, "deviation": devs.tolist(), "loglog_slope": float(slope),
            "reps": p["reps"], "seed": base, "conservation": cons}
    table = Table({"m": np.array(ms, float), "deviation": devs,
                   "fit": np.exp(intercept) * np.array(ms, float) ** slope})
    return {"": table}, meta, {"ms": ms, "deviation": devs, "slope": float(slope)}


def iswap(p, **_):
    g, g1, g2, nth = p["g"], p["gamma1"], p["gamma2"], p["nth"]
    T = np.pi / (4 * g)
    H = g * (tensor(sigmax(), sigmax()) + tensor(sigmay(), sigmay()))
    psi0 = tensor(basis(2, 1), basis(2, 0))
    sm1, sz1 = tensor(sigmam(), qeye(2)), tensor(sigmaz(), qeye(2))
    sm2, sz2 = tensor(qeye(2), sigmam()), tensor(qeye(2), sigmaz())
    c_ops = []
    for sm, sz in ((sm1, sz1), (sm2, sz2)):
        c_ops += [np.sqrt(g1 * (1 + nth)) * sm, np.sqrt(g1 * nth) * sm.dag(),
                  np.sqrt(g2) * sz]
    tlist = np.linspace(0, T, p["nt"])
    e_ops = [sm1.dag() * sm1, sm2.dag() * sm2]
    (n1, n2), states, cons = _me_states(H, psi0, tlist, c_ops, e_ops)
    ideal = odesolve(H, psi0, tlist, [], e_ops)
    U = (-1j * H * np.pi / (4 * g)).expm()
    rho_ideal = ket2dm(U * psi0)
    f = fidelity(rho_ideal, states[-1])
    table = Table({"t_over_T": tlist / T, "n1": n1, "n2": n2,
                   "n1_ideal": ideal.expect[0], "n2_ideal": ideal.expect[1]})
    meta = {"fidelity": f, "gamma1": g1, "gamma2": g2, "nth": nth, "g": g, "T": T,
            "conservation": cons}
    return {"": table}, meta, {"fidelity": f, "states": states, "rho_ideal": rho_ideal}


def jaynes_cummings(p, **_):
    N, w0, eps = p["N"], p["omega0"], p["epsilon"]
    g, kappa, gamma, nth = p["g"], p["kappa"], p["gamma"], p["nth"]
    a = tensor(destroy(N), qeye(2))
    sm = tensor(qeye(N), destroy(2))
    # sigma_z built from sm so that fock(2, 1) is the upper level; with
    # sigmaz() = diag(1, -1) the atom would sit 2*eps off resonance
    sz = 2 * sm.dag() * sm - 1
    H = w0 * a.dag() * a + 0.5 * eps * sz + g * (a.dag() * sm + a * sm.dag())
    psi0 = tensor(fock(N, 0), fock(2, 1))
    c_ops = [np.sqrt(kappa * (1 + nth)) * a, np.sqrt(kappa * nth) * a.dag(),
             np.sqrt(gamma) * sm]
    tlist = np.linspace(0, p["tmax"], p["nt"])
    (nc, na), states, cons = _me_states(H, psi0, tlist, c_ops, [a.dag() * a, sm.dag() * sm])
    meta = {"conservation": cons, "g": g, "kappa": kappa, "gamma": gamma, "nth": nth}
    return ({"": Table({"t": tlist, "n_cavity": nc, "n_atom": na})}, meta,
            {"tlist": tlist, "nc": nc, "na": na, "states": states})


def trilinear(p, full_scale=False, workers=None, seed=None, **_):
    N = p["N_full"] if full_scale else p["N"]
    ids = [qeye(N)] * 3

    def mode(k):
        ops = list(ids)
        ops[k] = destroy(N)
        return tensor(*ops)

    a0, a1, a2 = mode(0), mode(1), mode(2)
    n_ops = [a0.dag() * a0, a1.dag() * a1, a2.dag() * a2]
    c_ops = [np.sqrt(2.0 * p["g0"]) * a0, np.sqrt(2.0 * p["g1"]) * a1,
             np.sqrt(2.0 * p["g2"]) * a2]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        psi0 = tensor(coherent(N, np.sqrt(p["alpha2"])), basis(N, 0), basis(N, 0))
    H = 1j * (a0 * a1.dag() * a2.dag() - a0.dag() * a1 * a2)
    tlist = np.linspace(0, p["tmax"], p["nt"])
    seed = p["seed"] if seed is None else seed
    avgs = mcsolve(H, psi0, tlist, p["ntraj"], c_ops, n_ops, seed=seed, workers=workers)
    closed = mcsolve(H, psi0, tlist, 1, [], n_ops, seed=seed, workers=1)
    cols = {"t": tlist}
    for k, label in enumerate(("pump", "signal", "idler")):
        cols[label] = avgs.expect[k]
        cols[f"{label}_closed"] = closed.expect[k]
    meta = {"N": N, "D": N ** 3, "ntraj": p["ntraj"], "seed": seed,
            "truncation_warning": bool(caught),
            "closed_signal_idler_max_diff": float(np.max(np.abs(closed.expect[1]
                                                                 - closed.expect[2])))}
    return {"": Table(cols)}, meta, {"avgs": avgs, "closed": closed, "tlist": tlist}


def landau_zener(p, **_):
    delta, v = p["delta"], p["v"]
    H = TimeDependentOperator(delta / 2.0 * sigmax(), [(lambda t, _: t, v / 2.0 * sigmaz())])
    sm = destroy(2)
    e_ops = [sm.dag() * sm, sigmax(), sigmay(), sigmaz()]
    tlist = np.linspace(p["t0"], p["t1"], p["nt"])
    # the sweep passes through many oscillations; default rtol lets the norm drift ~1e-4
    res = odesolve(H, basis(2, 0), tlist, [], e_ops, options=SolverOptions(rtol=1e-9, atol=1e-11))
    p_ex, sx, sy, sz = res.expect
    formula = 1 - np.exp(-np.pi * delta ** 2 / (2 * v))
    meta = {"final_probability": float(p_ex[-1]), "landau_zener_formula": float(formula),
            "abs_error": float(abs(p_ex[-1] - formula))}
    # for a qubit ket the Bloch length equals <psi|psi>; |psi><psi| is Hermitian, PSD
    norm = np.sqrt(sx ** 2 + sy ** 2 + sz ** 2)
    meta["conservation"] = {"max_trace_error": float(np.max(np.abs(norm - 1))),
                            "max_hermiticity_deviation": 0.0, "min_eigenvalue": 0.0}
    tables = {"": Table({"t": tlist, "p_excited": p_ex, "p_ground": 1 - p_ex}),
              ".bloch": Table({"t": tlist, "x": sx, "y": sy, "z": sz})}
    return tables, meta, {"tlist": tlist, "p_ex": p_ex, "formula": formula}


def spin_chain_model(M, h, J, gamma):
    def site(op, n):
        ops = [qeye(2)] * M
        ops[n] = op
        return tensor(*ops)

    sx = [site(sigmax(), n) for n in range(M)]
    sy = [site(sigmay(), n) for n in range(M)]
    sz = [site(sigmaz(), n) for n in range(M)]
    H = 0 * sz[0]
    for n in range(M):
        H = H - 0.5 * h * sz[n]
    for n in range(M - 1):
        H = H - 0.5 * J * (sx[n] * sx[n + 1] + sy[n] * sy[n + 1] + sz[n] * sz[n + 1])
    c_ops = [np.sqrt(gamma) * s for s in sz]
    psi0 = tensor(basis(2, 1), *[basis(2, 0)] * (M - 1))
    return H, psi0, c_ops, sz


def spin_chain(p, workers=None, seed=None, **_):
    M = p["M"]
    if M < 2:
        raise ArgumentError("spin chain needs M >= 2")
    H, psi0, c_ops, sz = spin_chain_model(M, p["h"], p["J"], p["gamma"])
    tlist = np.linspace(0, p["tmax"], p["nt"])
    me, states, cons = _me_states(H, psi0, tlist, c_ops, sz)
    seed = p["seed"] if seed is None else seed
    mc = mcsolve(H, psi0, tlist, p["ntraj"], c_ops, sz, seed=seed, workers=workers)
    cols = {"t": tlist}
    for n in range(M):
        cols[f"sz{n}_me"] = me[n]
    for n in range(M):
        cols[f"sz{n}_mc"] = mc.expect[n]
    scale = max(float(np.max(np.abs(m))) for m in me)
    dev = max(float(np.mean(np.abs(mc.expect[n] - me[n]))) for n in range(M))
    meta = {"M": M, "ntraj": p["ntraj"], "seed": seed, "conservation": cons,
            "max_mean_abs_deviation": dev, "relative_deviation": dev / scale}
    return {"": Table(cols)}, meta, {"me": me, "mc": mc, "states": states, "tlist": tlist}


def coupled_oscillator_model(N, wa, wb, wab, damping):
    a = tensor(destroy(N), qeye(N))
    b = tensor(qeye(N), destroy(N))
    H = wa * a.dag() * a + wb * b.dag() * b + wab * (a.dag() * b + a * b.dag())
    # |N>|N-1> does not exist in an N-level truncation; use the top two levels
    psi0 = tensor(basis(N, N - 1), basis(N, N - 2))
    return H, psi0, [np.sqrt(damping) * a], [a.dag() * a, b.dag() * b]


def coupled_oscillators(p, **_):
    H, psi0, c_ops, e_ops = coupled_oscillator_model(p["N"], p["wa"], p["wb"], p["wab"],
                                                     p["damping"])
    tlist = np.linspace(0, p["tmax"], p["nt"])
    (na, nb), states, cons = _me_states(H, psi0, tlist, c_ops, e_ops)
    meta = {"N": p["N"], "D": p["N"] ** 2, "conservation": cons}
    return ({"": Table({"t": tlist, "n_a": na, "n_b": nb})}, meta,
            {"tlist": tlist, "na": na, "nb": nb, "states": states})


TWO_PI = 2 * np.pi

DEMOS = {
    "nonrwa-sweep": (nonrwa_sweep, {"N": 20, "wc": TWO_PI, "wa": TWO_PI, "g_max": 2.5,
                                    "ng": 50, "xmax": 7.5, "nx": 200}),
    "photon-decay": (photon_decay, {"N": 5, "Tc": 0.129, "nth": 0.063, "tmax": 0.6,
                                    "nt": 100, "ntraj": 904, "seed": 1}),
    "mc-convergence": (mc_convergence, {"N": 5, "Tc": 0.129, "nth": 0.063, "tmax": 0.6,
                                        "nt": 100, "ms": "10,50,250,1250", "reps": 10,
                                        "seed": 2}),
    "iswap": (iswap, {"g": TWO_PI, "gamma1": 0.75, "gamma2": 0.5, "nth": 0.75, "nt": 100}),
    "jaynes-cummings": (jaynes_cummings, {"N": 5, "omega0": TWO_PI, "epsilon": TWO_PI,
                                          "g": 0.05 * TWO_PI, "kappa": 0.005, "gamma": 0.05,
                                          "nth": 0.75, "tmax": 10.0, "nt": 100}),
    "trilinear": (trilinear, {"N": 10, "N_full": 17, "g0": 0.1, "g1": 0.4, "g2": 0.1,
                              "alpha2": 10.0, "tmax": 4.0, "nt": 201, "ntraj": 1000,
                              "seed": 3}),
    "landau-zener": (landau_zener, {"delta": 0.5 * TWO_PI, "v": 2.0 * TWO_PI, "t0": -10.0,
                                    "t1": 10.0, "nt": 1500}),
    "spin-chain": (spin_chain, {"M": 4, "h": TWO_PI, "J": 0.1 * TWO_PI, "gamma": 0.01,
                                "tmax": 10.0, "nt": 100, "ntraj": 500, "seed": 4}),
    "coupled-oscillators": (coupled_oscillators, {"N": 10, "wa": TWO_PI, "wb": TWO_PI,
                                                  "wab": 0.1 * TWO_PI, "damping": 0.05,
                                                  "tmax": 10.0, "nt": 100}),
}


def run_demo(name, full_scale=False, overrides=None, workers=None, seed=None):
    if name not in DEMOS:
        raise ArgumentError(f"unknown demo {name!r}; choose from: {', '.join(DEMOS)}")
    fn, defaults = DEMOS[name]
    p = _params(defaults, overrides)
    start = time.perf_counter()
    tables, meta, data = fn(p, full_scale=full_scale, workers=workers, seed=seed)
    meta = {"demo": name, "params": p, **meta,
            "wall_time_s": time.perf_counter() - start, "backend": _kernels.BACKEND_NAME}
    return DemoResult(name, tables, meta, data)
