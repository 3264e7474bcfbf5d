"""Shared test fixtures and dense reference matrices."""
