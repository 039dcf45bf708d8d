"""Offline companion to cs-probe: extract LM candidates into fixtures,
or serve the fill-mask wire protocol around a real masked LM."""

__version__ = "0.1.0"
