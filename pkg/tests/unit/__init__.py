"""Unit tests for dpne."""
