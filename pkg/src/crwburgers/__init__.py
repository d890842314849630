"""Correlated-random-walk diffusion/Burgers chain and its traffic cellular automaton."""

from .errors import (
    ConfigError, CrwError, IndeterminateForm, InsufficientData, InvariantViolation,
    LengthMismatch, NonBinary, NonPositiveValue, OutOfRange, OverflowGuard, RNotFinite,
)
from .maxplus import BOTTOM, TOP, PeriodicField, field_map2, mp_max, mp_min, mp_sub, mp_add
from .discrete import (
    BurgersState, CrwPairState, ScalarHistory, cole_hopf, step_burgers,
    step_crw_pair, step_crw_scalar, step_diffusion, total_mass,
)
from .ultradiscrete import (
    UdBurgersFull, UdHistory, inflow_X, reduce_R, solve_p_burgers, solve_p_diffusion,
    step_ud_burgers_full, step_ud_burgers_reduced, step_ud_diffusion, ud_cole_hopf,
    unreduce_R,
)
from .limit import LimitReport, verify_ud_limit
from .automata import (
    CaseLabel, Trajectory, UdBurgersState, check_real_valued_bounds, classify_case,
    make_state, rule184_step, run, table1_row,
)
from .traffic import (
    DiagramConfig, DiagramPoint, TransitionEstimate, check_conservation, density,
    estimate_transitions, flow, fundamental_diagram,
)

__version__ = "0.1.0"
