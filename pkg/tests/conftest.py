"""Shared test configuration; keeps tests/ importable for oracles.py."""
