"""Exception hierarchy shared by all modules."""


class CurvedToriError(Exception):
    pass


class DimensionError(CurvedToriError, ValueError):
    pass


class ContractError(CurvedToriError, ValueError):
    """A precondition on an argument (hermiticity, commutation, band limit) failed."""


class ParameterError(CurvedToriError, ValueError):
    pass


class NonInvertibleError(CurvedToriError):
    def __init__(self, min_sv: float, threshold: float):
        self.min_sv = float(min_sv)
        self.threshold = float(threshold)
        super().__init__(
            f"operator is not invertible: smallest singular value {self.min_sv:.3e} "
            f"<= threshold {self.threshold:.1e}"
        )


class DegenerateSeminormError(CurvedToriError):
    pass


class BandLimitError(ContractError):
    pass
