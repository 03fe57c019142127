class ModalMuError(Exception):
    """Base class for all errors raised by this package."""


class FormulaSyntaxError(ModalMuError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class ModelError(ModalMuError):
    """Malformed or inconsistent model (syntax or structural violation)."""


class UnboundVariableError(ModalMuError):
    pass


class UnknownStateError(ModalMuError):
    pass


class AbstractionError(ModalMuError):
    """Invalid abstraction setting or violated transformation precondition."""
