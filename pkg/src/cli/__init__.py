"""Command-line module for dpne.

The click command group lives in ``src.cli.commands``.
"""
