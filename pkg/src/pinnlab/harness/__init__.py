"""Experiment harness: configuration, CLI, CSV reporting, and SVG plots."""
