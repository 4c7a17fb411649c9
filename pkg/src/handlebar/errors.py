"""Exception types raised by the runtime."""


class HandlebarError(Exception):
    """Base class for all runtime errors."""


class InvalidParams(HandlebarError, ValueError):
    pass


class DomainError(HandlebarError, ValueError):
    pass


class OutOfSupport(HandlebarError, ValueError):
    pass


class Unsupported(HandlebarError):
    pass


class DuplicateName(HandlebarError):
    def __init__(self, name):
        super().__init__(f"site {name!r} was performed twice in one execution")
        self.name = name


class MultiShot(HandlebarError):
    """A handler tried to resume the same operation more than once."""


class NonFiniteValue(HandlebarError):
    pass


class UnusedCondition(HandlebarError):
    def __init__(self, names):
        self.names = frozenset(names)
        super().__init__(f"conditioned names never sampled: {sorted(self.names)}")


class UnusedSubstitution(HandlebarError):
    def __init__(self, names):
        self.names = frozenset(names)
        super().__init__(f"substituted names never sampled: {sorted(self.names)}")


class MissingValue(HandlebarError):
    def __init__(self, name):
        super().__init__(f"site {name!r} has no pinned value; its density would need marginalization")
        self.name = name


class Disjointness(HandlebarError, ValueError):
    def __init__(self, names):
        self.names = frozenset(names)
        super().__init__(f"names given as both latent and observed: {sorted(self.names)}")


class ConstrainedLatent(HandlebarError):
    def __init__(self, name, support):
        super().__init__(
            f"latent site {name!r} has support {support}; run the guide inside unconstrain"
        )
        self.name = name


class NonFinite(HandlebarError, FloatingPointError):
    def __init__(self, step, history):
        super().__init__(f"ELBO or its gradient became non-finite at step {step}")
        self.step = step
        self.history = history


class NotFound(HandlebarError, KeyError):
    def __init__(self, name, available):
        self.name = name
        self.available = sorted(available)
        super().__init__(f"no model named {name!r}; available: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]


class AllRejectedWarning(UserWarning):
    pass
