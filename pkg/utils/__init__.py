"""Error metrics, closed-form oracles and the verification suite."""
