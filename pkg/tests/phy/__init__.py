"""Tests of the physical-layer library."""
