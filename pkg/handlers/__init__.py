"""Command handlers for mpspec: verify, rates, tightness, tensor, poincare."""
