"""Extraction tests."""
