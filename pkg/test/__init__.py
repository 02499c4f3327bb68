"""Tests for domclust."""
