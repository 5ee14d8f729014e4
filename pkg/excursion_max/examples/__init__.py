from excursion_max.examples.walk_examples import (
    analytic_control,
    quick_walk_config,
    reference_walk_config,
    sampling_control,
    traced_sequences,
)

__all__ = ["analytic_control", "sampling_control", "reference_walk_config", "quick_walk_config", "traced_sequences"]
