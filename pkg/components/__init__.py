"""Plotly chart components for run artifacts."""
