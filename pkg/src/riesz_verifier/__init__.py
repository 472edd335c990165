"""Scenario-driven verification suite and the riesz-verify command line."""
