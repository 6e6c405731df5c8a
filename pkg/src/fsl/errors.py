"""Exception types shared by the library and mapped to CLI exit codes."""


class InvariantViolation(ValueError):
    """Input data breaks a standing assumption (g < 2, composite p, bad parts)."""

    exit_code = 2


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured work budget."""

    exit_code = 3

    def __init__(self, needed, budget):
        super().__init__(f"enumeration needs ~{needed} form evaluations, budget is {budget}")
        self.needed = needed
        self.budget = budget


class NoAdmissiblePair(RuntimeError):
    """The pair search failed; carries the incidence diagnostics."""

    exit_code = 4

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
