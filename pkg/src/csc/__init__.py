"""Central submonad calculus: syntax, typechecking, equational reasoning,
finite-set semantics and centres of strong monads on finite sets."""

from pathlib import Path

__version__ = "0.1.0"

DATA = Path(__file__).parent / "data"
