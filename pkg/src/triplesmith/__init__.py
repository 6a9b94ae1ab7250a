"""triplesmith: exact Pythagorean-triple data factory, adversarial negative
suite, and float-wall analyzer."""

from .triples import GenParams, Label, Triple, classify, euclid, fibonacci_triple, plato, stifel, verify_equation

__all__ = [
    "GenParams",
    "Label",
    "Triple",
    "classify",
    "euclid",
    "fibonacci_triple",
    "plato",
    "stifel",
    "verify_equation",
]

__version__ = "0.1.0"
