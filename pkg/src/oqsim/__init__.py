"""Open quantum system dynamics: quantum objects, master equation and
Monte-Carlo trajectory solvers, scenario files and a CLI."""
from .errors import *  # noqa: F401,F403
from .qobj import Qobj, QuantumObject, tensor, ptrace, tidyup
from .operators import (qeye, destroy, create, num, displace, squeeze, squeez,
                        sigmax, sigmay, sigmaz, sigmap, sigmam, jmat)
from .states import (basis, fock, fock_dm, coherent, coherent_dm, thermal_dm,
                     TruncationWarning)
from .metrics import expect, fidelity, tracedist, entropy_vn, ket2dm
from .wigner import wigner, wigner_map
from .integrate import SolverOptions
from .timedep import TimeDependentOperator
from .mesolve import liouvillian, build_liouvillian, odesolve, essolve, ExpectationTable
from .mcsolve import mcsolve, TrajectoryConfig, EnsembleResult
from .expr import parse_coefficient, parse_operator_expr
from .scenario import ScenarioSpec, load_scenario, parse_scenario, run_scenario

__version__ = "0.1.0"
