"""Length functionals of finite metric samples: Steiner trees, Menger-Choquet length, covers."""

__version__ = "0.1.0"
