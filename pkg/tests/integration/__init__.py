"""
Integration tests for sfvem.

Refinement studies and solver cross-checks across mesh, assembly and
eigensolver modules.
"""
