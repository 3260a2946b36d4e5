"""Scenario files, closed-loop runs and the Proposed vs Baseline benchmark suite."""
