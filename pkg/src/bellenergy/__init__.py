"""Classical bounds and ground-state quantum values of finite-range Bell inequalities on spin chains."""

__version__ = "0.1.0"
