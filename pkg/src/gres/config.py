"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    symmetry: float = 1e-12
    psd: float = 1e-10
    symplectic: float = 1e-9
    nu_floor: float = 1e-8
    equality: float = 1e-10
    optimizer_xtol: float = 1e-9
    optimizer_max_eval: int = 20000
    bound_order: float = 1e-6


TOL = Tolerances()
