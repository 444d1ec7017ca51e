"""Common tests."""
