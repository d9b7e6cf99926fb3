from .context import reset, set, get, params
from .dunwoody import DunwoodyTuple, compute_s_bar, is_admissible, psl_set
from .invariants import h1_from_diagram, takahashi_surgery_h1
from .takahashi import TakahashiParams, tak_psl_set
from .words import BraidWord, MoveSpec, apply_move, parse_word


__all__ = [
    "get",
    "params",
    "reset",
    "set",
    "BraidWord",
    "DunwoodyTuple",
    "MoveSpec",
    "TakahashiParams",
    "apply_move",
    "compute_s_bar",
    "h1_from_diagram",
    "is_admissible",
    "parse_word",
    "psl_set",
    "tak_psl_set",
    "takahashi_surgery_h1",
]
