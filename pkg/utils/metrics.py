"""Error metrics and convergence-rate utilities."""
from typing import List, Sequence

import numpy as np
import pandas as pd


class ErrorMetrics:
    """Error norms and observed convergence orders."""

    @staticmethod
    def sup_norm(values) -> float:
        return float(np.max(np.abs(np.asarray(values, dtype=float))))

    @staticmethod
    def sup_error(computed, exact) -> float:
        """Largest absolute difference."""
        return ErrorMetrics.sup_norm(np.asarray(computed, dtype=float) - np.asarray(exact, dtype=float))

    @staticmethod
    def relative_error(computed, exact, floor: float = 1e-300) -> float:
        """Sup-norm of the pointwise relative error, denominators floored."""
        computed = np.asarray(computed, dtype=float)
        exact = np.asarray(exact, dtype=float)
        return float(np.max(np.abs(computed - exact) / np.maximum(np.abs(exact), floor)))

    @staticmethod
    def observed_orders(errors: Sequence[float], steps: Sequence[float]) -> List[float]:
        """rate_k = log(e_{k-1}/e_k) / log(h_{k-1}/h_k).

        Args:
            errors: Errors at successive resolutions
            steps: Step sizes at the same resolutions

        Returns:
            One rate per refinement (len(errors) - 1 entries)
        """
        if len(errors) != len(steps):
            raise ValueError("errors and steps must have the same length")
        rates = []
        for k in range(1, len(errors)):
            if errors[k] <= 0 or errors[k - 1] <= 0:
                rates.append(float("inf"))
                continue
            rates.append(float(np.log(errors[k - 1] / errors[k]) / np.log(steps[k - 1] / steps[k])))
        return rates

    @staticmethod
    def convergence_table(resolutions: Sequence[int], steps: Sequence[float],
                          errors: Sequence[float]) -> pd.DataFrame:
        """Resolution, step, error and observed order (NaN on the first row)."""
        rates = [float("nan")] + ErrorMetrics.observed_orders(errors, steps)
        return pd.DataFrame({
            'resolution': list(resolutions),
            'step': [float(h) for h in steps],
            'error': [float(e) for e in errors],
            'order': rates,
        })
