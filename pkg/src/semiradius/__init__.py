__version__ = "0.1.0"

from .semihilbert import (
    UNBOUNDED, ExtendedRadius, Metric, SemiOperator, a_inner, a_norm_vec, a_numerical_radius,
    a_seminorm_op, bind, new_metric, sharp,
)
from .blockspace import BlockOperator, double_metric, lemma21_residuals, make_block
from .checks import buzano_check, run_check
from .certifier import run_suite, tightness_probe
from .instances import gen_instance
