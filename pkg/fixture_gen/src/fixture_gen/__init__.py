"""Fixture generation for the linv engine: exact unit/S-unit generators,
Galois actions, and p-adic embeddings for small Galois fields, emitted in
the engine's JSON wire format."""

from .generate import CASError, RecipeError, generate

__version__ = "0.1.0"
