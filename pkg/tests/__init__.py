"""Tests for Joint Uncertainty."""
