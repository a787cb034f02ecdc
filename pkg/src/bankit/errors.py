"""Exception types shared across the package."""


class BankitError(Exception):
    pass


class ExprSyntaxError(BankitError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariable(BankitError):
    def __init__(self, index, n):
        super().__init__(f"variable x{index} out of range 1..{n}")
        self.index = index
        self.n = n


class DuplicateAutomaton(BankitError):
    pass


class MissingAutomaton(BankitError):
    pass


class LengthMismatch(BankitError):
    pass


class BadCharacter(BankitError):
    pass


class NonMonotoneArc(BankitError):
    pass


class NonMonotoneGraph(BankitError):
    pass


class NotNice(BankitError):
    pass


class NotStronglyConnected(BankitError):
    pass


class CyclicBeyondLoops(BankitError):
    pass


class ConstantFunctionPresent(BankitError):
    pass


class TooLarge(BankitError):
    pass


class Unreachable(BankitError):
    pass


class NotRecurrentDestination(BankitError):
    pass


class HypothesisViolated(BankitError):
    pass


class ShapeNotRecognized(BankitError):
    pass
