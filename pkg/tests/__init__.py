"""Tests for dpne."""
