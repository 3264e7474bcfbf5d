"""Tests of the configuration, result and runner layer."""
