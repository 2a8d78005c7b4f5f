"""Subcommand registry."""

from overlapix.cli.commands import estimate, norms, sweep, witness

COMMANDS = (norms, estimate, sweep, witness)

__all__ = ["COMMANDS"]
