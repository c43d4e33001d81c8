"""Deterministic small-satellite flight-software simulator.

Builds a minimal flight stack (software bus, scheduler, star tracker,
radio/downlink, ground station) together with a rogue vendor component
that spoofs star-tracker telemetry, and a set of bus-level
countermeasures (authenticated publish, runtime IDS, model-based
consistency checking, cyber-safe mode).
"""

__version__ = "0.1.0"
