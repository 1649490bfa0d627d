"""Exception hierarchy shared by every layer."""


class DomainError(ValueError):
    """Invalid argument for an algebraic or sharing operation."""


class ProtocolError(RuntimeError):
    """A protocol could not run as specified (missing player, bad wiring)."""


class ProtocolBug(ProtocolError):
    """Engine contract violated: double submission, empty round, shared-state write."""


class PreprocessingExhausted(ProtocolError):
    def __init__(self, kind):
        self.kind = kind
        super().__init__(f"preprocessing exhausted: no {kind!r} triples left")


class LeakSignal(ProtocolError):
    """A masked reveal exposed a structural property of the secret.

    These are inherent to the masked protocols: the only thing disclosed is
    the fact named by the subclass (zero, non-unit, singular, eigenvalue hit).
    """

    reason = "leak"

    def __init__(self, message: str | None = None, indices=None):
        self.indices = list(indices) if indices is not None else []
        super().__init__(message or self.reason)


class ZeroSecret(LeakSignal):
    reason = "secret is zero"


class NonUnit(LeakSignal):
    reason = "non-unit operand"


class SingularLeak(LeakSignal):
    reason = "singular leaked"


class EigenvalueAbort(LeakSignal):
    reason = "evaluation point kept hitting an eigenvalue"
