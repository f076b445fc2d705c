from typing import Any, Dict

import numpy as np
from pydantic import BaseModel


def _encode_array(array: np.ndarray):
    return array.tolist()


class FrozenModel(BaseModel):
    """
    Base class of every trig_wind value type. Instances are immutable once
    validated and may hold numpy arrays, which serialise to JSON lists.
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True
        json_encoders = {
            np.ndarray: _encode_array,
            np.floating: float,
            np.integer: int,
        }


class TrigWindError(Exception):
    """
    Base error of the package. `exit_code` is the process exit status the
    command line uses when the error reaches it.
    """

    def __init__(self, exit_code: int, error_type: str, message: str = None):
        super().__init__(message or error_type)
        self.exit_code = exit_code
        self.type = error_type
        self.message = message

    def json(self) -> Dict[str, Any]:
        return {
            "type": self.type,
            "message": self.message,
        }


class ConfigError(TrigWindError):
    def __init__(self, *, error_type: str, message: str = None):
        super().__init__(1, error_type, message)


class DataError(TrigWindError):
    def __init__(self, *, error_type: str, message: str = None):
        super().__init__(2, error_type, message)


class ConvergenceError(TrigWindError):
    def __init__(self, *, error_type: str, message: str = None):
        super().__init__(3, error_type, message)


class InternalError(TrigWindError):
    def __init__(self, *, error_type: str, message: str = None):
        super().__init__(4, error_type, message)


def as_float_array(value, name: str = "values") -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    array.setflags(write=False)
    return array
