"""Run the command line interface with `python -m adjustable_auction`."""

from .cli import run

run()
