"""Configuration module for the thermistor control solver."""
