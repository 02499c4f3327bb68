"""Test functionality of `domclust.core` module."""
