"""Scenario files shipped with the verifier (``*.scenario``, JSON)."""
