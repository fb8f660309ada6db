class KBetaError(Exception):
    pass


class ParseError(KBetaError):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class CapExceeded(KBetaError):
    pass


class UndefinedAction(KBetaError):
    def __init__(self, op, generator):
        self.op = op
        self.generator = generator
        super().__init__(f"{op} is not defined on generator {generator!r}")


class UnsupportedKey(KBetaError):
    pass


class TableValueDead(KBetaError):
    pass


class NotACycle(KBetaError):
    pass


class IllDefinedDifferential(KBetaError):
    pass


class CapTooSmall(KBetaError):
    pass


class SearchBudgetExceeded(KBetaError):
    pass


class GroupBoundExceeded(KBetaError):
    pass
