"""Privacy tests."""
