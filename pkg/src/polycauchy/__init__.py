"""Higher-order Lipschitz data, Cauchy transforms and singular integral
operators for polymonogenic functions in Clifford analysis."""

__version__ = "0.1.0"
