"""Joint beamforming and active-surface design for SWIPT downlinks.

Modules: ``scene`` (scenario and channels), ``eh`` (nonlinear harvester),
``metrics`` (SINR / EH / power audit), ``conic`` (SDP layer), ``bf_stage``
and ``ris_stage`` (the two alternating subproblems), ``bcd`` (driver,
benchmark schemes, sweeps) and ``cli``.
"""

from .bcd import bcd_solve, run_scheme, sweep
from .metrics import BfSolution, RisVector, audit
from .scene import Scenario, gen_channels, load_config

__version__ = "0.1.0"

__all__ = ["Scenario", "gen_channels", "load_config", "RisVector", "BfSolution", "audit",
           "bcd_solve", "run_scheme", "sweep"]
