"""Decision procedures and VC-density experiments for divisible oriented
abelian groups and their dense pairs."""

__version__ = "0.1.0"
