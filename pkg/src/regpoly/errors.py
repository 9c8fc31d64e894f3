"""Exception types raised across the package."""


class RegPolyError(Exception):
    pass


class DuplicatePoints(RegPolyError, ValueError):
    """Two input points lie closer than the coincidence tolerance allows."""

    def __init__(self, id_a, id_b, lines=None):
        self.id_a = id_a
        self.id_b = id_b
        self.lines = lines
        msg = "points %d and %d coincide within tolerance" % (id_a, id_b)
        if lines is not None:
            msg += " (lines %d and %d)" % lines
        super().__init__(msg)


class Collinear(RegPolyError, ValueError):
    pass


class BadK(RegPolyError, ValueError):
    pass


class BadSkip(RegPolyError, ValueError):
    pass


class NoIsosceles(RegPolyError):
    pass


class ParseError(RegPolyError, ValueError):
    def __init__(self, line, text=""):
        self.line = line
        super().__init__("line %d: cannot parse %r" % (line, text))


class InfeasibleSpec(RegPolyError, ValueError):
    pass
