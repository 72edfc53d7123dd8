"""Exception types shared across the engines and the batch front end."""


class ConfigError(ValueError):
    """A run configuration violates a constraint; the message names it."""


class StepSizeError(RuntimeError):
    """A step probability reached an invalid value; shrink the step."""


class CountContradictionError(RuntimeError):
    """A photocount was applied to a state that cannot scatter photons."""
