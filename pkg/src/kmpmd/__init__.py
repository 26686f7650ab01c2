"""Online min-cost perfect k-way matching with delays.

GD-k simulated exactly over rationals, with an exhaustive offline optimum,
an exact simplex for the pair relaxation, and audits tying them together.
"""

from .gdk import RunConfig, RunResult, run
from .instances import Instance, Request, gen_adversarial_line, gen_random, load_instance, save_instance
from .lp import build_p_prime, simplex_solve
from .metrics import MetricSpace, explicit_space, k_distance, line_space
from .offline import brute_force_opt

__all__ = [
    "Instance", "MetricSpace", "Request", "RunConfig", "RunResult", "brute_force_opt",
    "build_p_prime", "explicit_space", "gen_adversarial_line", "gen_random", "k_distance",
    "line_space", "load_instance", "run", "save_instance", "simplex_solve",
]
