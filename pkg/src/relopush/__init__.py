"""Pushing-based rearrangement planning for a car-like robot."""
