"""Exception types shared across the package."""


class ContractError(ValueError):
    """An input violated a documented precondition."""


class SymmetryError(ContractError):
    """A symmetry operator or ensemble spec failed validation."""


class NumericalFailure(RuntimeError):
    """An iterative numerical routine did not converge."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index
