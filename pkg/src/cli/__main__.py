"""CLI entry point: ``python -m src.cli``."""

from .commands import cli


def main():
    """Main entry point for the dpne CLI."""
    cli(prog_name="dpne")


if __name__ == "__main__":
    main()
