"""Exception hierarchy shared by the library and the CLI."""


class FuzzyFixpointError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FuzzyFixpointError, ValueError):
    """An argument lies outside the domain of an operation.

    ``argument`` names the offending parameter so callers can report it.
    """

    def __init__(self, argument: str, message: str):
        super().__init__(f"{argument}: {message}")
        self.argument = argument


class CertificationRefused(FuzzyFixpointError):
    """The map does not preserve the kernel of the seminorm."""


class NotAContraction(FuzzyFixpointError):
    def __init__(self, lipschitz: float):
        super().__init__(f"not a contraction: Lipschitz constant {lipschitz:.17g} >= 1")
        self.lipschitz = lipschitz


class SingularSystemError(FuzzyFixpointError):
    """I - A is singular, so the affine map has no unique fixed point."""


class UnknownMapError(FuzzyFixpointError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown registered map {self.name!r}"
