"""Probe target tests."""
