"""Metric-operator uncertainty relations for PT-invariant non-Hermitian Hamiltonians."""

from __future__ import annotations

__version__ = "0.1.0"
