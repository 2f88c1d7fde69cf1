class OrbitileError(Exception):
    def __init__(self, message='orbitile operation failed'):
        super().__init__(message)


class SystemParseError(OrbitileError):
    def __init__(self, line_no=None, reason=None):
        if line_no is not None and reason is not None:
            message = f'Substitution file line {line_no}: {reason}'
        elif reason is not None:
            message = f'Substitution file: {reason}'
        else:
            message = 'Malformed substitution file'
        super().__init__(message)


class UnknownLetter(OrbitileError):
    def __init__(self, letter=None):
        if letter is not None:
            message = f"Letter '{letter}' is not in the alphabet"
        else:
            message = 'Letter is not in the alphabet'
        super().__init__(message)


class NotPrimitive(OrbitileError):
    def __init__(self, name=None):
        if name is not None:
            message = f"Substitution system '{name}' is not primitive"
        else:
            message = 'Substitution system is not primitive'
        super().__init__(message)


class NotExpansive(OrbitileError):
    def __init__(self, name=None):
        if name is not None:
            message = f"Substitution system '{name}' is not expansive"
        else:
            message = 'Substitution system is not expansive'
        super().__init__(message)


class IndeterminateComparison(OrbitileError):
    def __init__(self, bits=None, what=None):
        if bits is not None and what is not None:
            message = f'Could not decide {what} within {bits} bits'
        elif bits is not None:
            message = f'Comparison undecided at the {bits}-bit budget'
        else:
            message = 'Comparison undecided at the bit budget'
        super().__init__(message)


class DegenerateOffset(OrbitileError):
    def __init__(self, where=None):
        if where is not None:
            message = f'Offsets produce an exact tie at {where}'
        else:
            message = 'Offsets produce an exact tie'
        super().__init__(message)


class WindowTooNarrow(OrbitileError):
    def __init__(self, what=None):
        if what is not None:
            message = f'Orbit window too narrow: {what}'
        else:
            message = 'Orbit window too narrow'
        super().__init__(message)


class BoundaryVertex(OrbitileError):
    def __init__(self, vertex=None):
        if vertex is not None:
            message = f'Vertex {vertex} is too close to the patch boundary'
        else:
            message = 'Vertex is too close to the patch boundary'
        super().__init__(message)


class BoundaryEdge(OrbitileError):
    def __init__(self, edge=None):
        if edge is not None:
            message = f'Edge {edge} does not have both faces inside the patch'
        else:
            message = 'Edge does not have both faces inside the patch'
        super().__init__(message)


class InconsistentCycle(OrbitileError):
    def __init__(self, cycle=None, reason=None):
        if cycle is not None and reason is not None:
            message = f'Inconsistent cycle {cycle}: {reason}'
        elif cycle is not None:
            message = f'Inconsistent cycle {cycle}'
        else:
            message = 'Inconsistent cycle'
        super().__init__(message)


class BadParameters(OrbitileError):
    def __init__(self, p=None, q=None, reason=None):
        if p is not None and q is not None and reason is not None:
            message = f'{{p,q}} = {{{p},{q}}}: {reason}'
        elif p is not None and q is not None:
            message = f'{{p,q}} = {{{p},{q}}} requires p >= 5 and q >= 5'
        else:
            message = '{p,q} requires p >= 5 and q >= 5'
        super().__init__(message)


class WindowValidationError(OrbitileError):
    def __init__(self, report=None):
        if report is not None:
            message = f'Orbit window failed validation: {report}'
        else:
            message = 'Orbit window failed validation'
        super().__init__(message)
