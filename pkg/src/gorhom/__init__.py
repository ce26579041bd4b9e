"""gorhom: exact homological invariants of finite-dimensional algebras."""

__version__ = "0.1.0"
