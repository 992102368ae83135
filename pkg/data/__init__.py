"""Run configuration loading, validation and artifact export."""
