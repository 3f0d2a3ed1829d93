"""Utilities for the tsblind package."""
