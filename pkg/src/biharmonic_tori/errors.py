class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""
