class TowerkitError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(TowerkitError, ValueError):
    pass


class MintError(TowerkitError):
    pass


class SearchCapError(TowerkitError):
    """A bounded search ran past its cap.  ``diagnostic`` says what was scanned."""

    def __init__(self, message: str, diagnostic: str = ""):
        super().__init__(message if not diagnostic else f"{message}: {diagnostic}")
        self.diagnostic = diagnostic


class ScenarioError(TowerkitError, ValueError):
    pass
