"""Strong call-by-value λ-calculus workbench: explicit substitutions, multi types, derivation transformers."""

__version__ = "0.1.0"
