"""Tests for `domclust.utils`."""
