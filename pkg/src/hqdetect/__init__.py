"""Hierarchical quantum-augmented threat detection for O-RAN telemetry."""

__version__ = "0.1.0"
