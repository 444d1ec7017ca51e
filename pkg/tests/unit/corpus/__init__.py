"""Corpus tests."""
