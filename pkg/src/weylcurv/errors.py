"""Exception hierarchy shared by the library and the command line."""


class WeylcurvError(Exception):
    pass


class DimensionError(WeylcurvError):
    """Dimensions of the operands disagree, or n is out of range."""


class ShapeError(WeylcurvError):
    """An array has the wrong shape or lacks a required (anti)symmetry."""


class DegeneracyError(WeylcurvError):
    """The inner product matrix is singular."""


class ClassError(WeylcurvError):
    """A tensor is not in the symmetry class an operation requires.

    ``equation`` carries the label of the first violated identity
    (``"1.b"``, ``"1.c"``, ``"1.d"`` or ``"1.e"``).
    """

    def __init__(self, message, equation=None):
        super().__init__(message)
        self.equation = equation
