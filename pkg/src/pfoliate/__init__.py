"""Derivations and 1-foliations over F_p."""
