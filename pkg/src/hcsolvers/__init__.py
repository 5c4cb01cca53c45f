"""First-order solvers for functionally constrained hidden-convex problems."""

from .core import (ConstrainedProblem, HiddenConvexMeta, HiddenMap, Oracle,
                   OracleCounter, SolveReport, TraceRecord, exact_penalty,
                   value_function_v)
from .geometry import (BoxSet, Halfspace, project_box, project_box_halfspaces,
                       solve_acgd_qp)
from .subgrad import InnerResult, projected_subgradient, swsg, swsg_stepsize
from .acgd import AcgdSchedule, acgd, choose_shift
from .ippm import (IppmConfig, ProxSubproblem, build_prox_subproblem,
                   init_feasible, ippm_run, schedule_hsc, schedule_nonsmooth,
                   schedule_smooth, schedule_smooth_slater)
from .bundle import (EtaState, ada_ls, init_lower_bound, linear_minorant,
                     s_bl, s_star_bl, sbl_step, star_bl_unshifted_demo)
from .problems import (SplitMix64, equality_to_inequality, grid_oracle,
                       make_cgp2d, make_cnls, make_cos1d, make_problem,
                       make_random_cgp)

__version__ = "0.1.0"
