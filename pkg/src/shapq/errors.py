"""Exception hierarchy shared by every module of the package."""


class ShapqError(Exception):
    """Base class for all errors raised by shapq."""


class FactNotEndogenous(ShapqError):
    pass


class FactAbsent(ShapqError):
    pass


class UnknownRelation(ShapqError):
    pass


class SchemaMismatch(ShapqError):
    pass


class DuplicateFact(ShapqError):
    pass


class QuerySyntaxError(ShapqError, SyntaxError):
    """Malformed query or selector text; `position` is a 0-based offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class UnsafeHead(ShapqError):
    pass


class UnknownVariable(ShapqError):
    pass


class NonNumericConstant(ShapqError):
    pass


class OutOfRange(ShapqError, ValueError):
    pass


class LengthMismatch(ShapqError):
    pass


class InstanceTooLarge(ShapqError):
    pass


class SelfJoin(ShapqError):
    pass


class IntractableClass(ShapqError):
    """The query falls outside the class for which a polynomial engine exists."""


class NotAllHierarchical(IntractableClass):
    pass


class NotExistsHierarchical(IntractableClass):
    pass


class NotQHierarchical(IntractableClass):
    pass


class NotSQHierarchical(IntractableClass):
    pass


class NotConnectedSQ(NotSQHierarchical):
    pass


class VariantMismatch(ShapqError):
    pass


class PreconditionViolated(ShapqError):
    pass


class NonInjectiveOnDomain(ShapqError):
    pass


class SingularMatrix(ShapqError):
    pass


class DimensionMismatch(ShapqError):
    pass
