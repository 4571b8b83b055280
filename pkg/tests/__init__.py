"""
Tests for partreg-core.
"""
