"""Shared helpers and report writers for mpspec."""
