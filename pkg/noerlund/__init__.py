"""Nörlund means of operator powers and the sequence machinery behind them."""

__version__ = "1.0.0"
