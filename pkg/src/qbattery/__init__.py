"""Charging of open quantum batteries through a shared environment."""

__version__ = "0.1.0"
