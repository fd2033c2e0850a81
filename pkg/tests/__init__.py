"""Tests for symform."""
