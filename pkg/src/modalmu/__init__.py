"""Three-valued mu-calculus model checking over Kripke structures, KMTSs and GTSs."""
from .errors import (
    AbstractionError, FormulaSyntaxError, ModalMuError, ModelError, UnboundVariableError,
    UnknownStateError,
)
from .formula import Formula, Literal, VarName, analyze, parse_formula, print_formula, unfold
from .models import Gts, Ks, ModelKind, embed_ks, model_size, parse_model, serialize_model, validate
from .mucheck import ThreeValued, eval_ks, eval_sis, verdict
from .refinement import (
    SimRelation, is_mixed_simulation, leq_mix_model, leq_mix_state, maximal_mixed_simulation,
)

__version__ = "0.1.0"
