"""
Test suite for sfvem.

Unit tests per library module, slow convergence studies under integration/,
and gateway tests in test_main.py.
"""
