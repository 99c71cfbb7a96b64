from ._ageflow import Problem, characteristic_root, __version__

__all__ = ["Problem", "characteristic_root", "__version__"]
