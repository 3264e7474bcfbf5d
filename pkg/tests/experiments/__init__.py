"""Tests of the experiment drivers."""
