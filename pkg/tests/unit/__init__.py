"""
Unit tests for sfvem.

Each module tests one library module on small meshes.
"""
