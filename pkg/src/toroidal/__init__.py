"""Second moments of L-functions over toroidal families of Dirichlet characters.

Submodules: ``field`` (prime-field tables), ``chars`` (characters), ``torus``
(subgroups H_A), ``expsum`` (Gauss and torus sums), ``toric`` (box counts),
``lfun`` (central values and the AFE), ``moment`` (moments and sweeps) and
``cli`` (command line).
"""

from .errors import ToroidalError
from .field import FieldCtx, build_ctx
from .moment import MomentReport, afe_moment, moment_exact, predict_main

__all__ = ["FieldCtx", "MomentReport", "ToroidalError", "afe_moment", "build_ctx", "moment_exact",
           "predict_main"]
__version__ = "0.1.0"
