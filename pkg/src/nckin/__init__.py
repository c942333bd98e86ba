"""Jerk-limited kinematics simulator for 3-axis NC toolpaths."""

from .axis_sync import SyncedLinearPlan, effective_caps, limiting_axis, plan_linear_block
from .circular import (ArcGeometry, ArcPlan, arc_frames, curvilinear_acceleration,
                       curvilinear_jerk, evaluate_arc, plan_arc_block)
from .machine import (ConfigError, MachineLimits, dump_machine_config, load_machine_config,
                      table1_limits, validate_limits)
from .planner import (JunctionReport, PathPlan, PlanningError, backward_feasibility_pass,
                      forward_feasibility_pass, plan_path)
from .roots import ConvergenceError, NewtonResult, newton_raphson, solve_cubic_real
from .scurve import (DEGENERATE, PhaseSchedule, ProfileRequest, classify_case, evaluate,
                     solve_schedule)
from .toolpath_io import Block, ProgramError, load_point_table, parse_gcode, serialize_gcode
from .trace import Trace, export_trace, load_trace_csv, sample_path, total_time
from .transitions import (CornerGeometry, TransitionPlan, circular_corner_feed,
                          clamp_transition_length, corner_geometry,
                          curvature_discontinuity_feed, entry_feed_limit, evaluate_transition,
                          polynomial_transition)

__version__ = "0.1.0"
