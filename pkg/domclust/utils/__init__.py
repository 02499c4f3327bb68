"""Contains utility functions."""
