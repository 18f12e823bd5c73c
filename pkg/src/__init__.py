"""slopeforge - exact slope filtrations, isoduality and tensor experiments for rational lattices."""
__version__ = "0.1.0"
