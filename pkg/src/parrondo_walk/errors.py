class LatticeTooSmallError(RuntimeError):
    """Raised when probability reaches the edge of the momentum lattice."""

    def __init__(self, message, leaked=None, step=None):
        super().__init__(message)
        self.leaked = leaked
        self.step = step
