"""Allow `python -m ternarybbp`."""

from .cli import app

app()
