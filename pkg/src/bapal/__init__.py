"""Boolean arbitrary public announcement logic: syntax, models, bisimulation, normal forms and decision."""
from .kripke import Model, check, extension, make_model
from .normalform import normalize, to_aanf
from .syntax import Formula, parse, to_text

__version__ = "0.1.0"
__all__ = ["Formula", "Model", "check", "extension", "make_model", "normalize", "parse", "to_aanf",
           "to_text"]
