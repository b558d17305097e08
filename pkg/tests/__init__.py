"""
Test suite for atomcraft
"""
