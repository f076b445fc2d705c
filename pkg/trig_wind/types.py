import functools
from enum import EnumMeta
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Tuple,
    Union,
)

OptionalType = Optional[type]
AllPrimitives = (int, float, str, bool)


class Matrix01:
    """Annotation marker for a 0/1 matrix written as comma-separated rows."""


class ValidationError(Exception):
    def __init__(self, error_type, value):
        super().__init__(f"{error_type}: {value!r}")
        self.type = error_type
        self.value = value


def is_optional(parameter_type) -> bool:
    if isinstance(parameter_type, type):
        return False
    if getattr(parameter_type, "__origin__", None) is Union:
        return type(None) in parameter_type.__args__
    return False


def is_generic(parameter_type, types) -> bool:
    if parameter_type in types:
        return True
    return getattr(parameter_type, "__origin__", None) in types


is_list = functools.partial(is_generic, types=(list, List))
is_tuple = functools.partial(is_generic, types=(tuple, Tuple))
is_dict = functools.partial(is_generic, types=(dict, Dict))


def is_ellipses_tuple(parameter_type) -> bool:
    args = getattr(parameter_type, "__args__", None)
    return bool(args) and args[-1] is Ellipsis


def is_primitive(parameter_type) -> bool:
    return parameter_type in AllPrimitives


def retrieve_type(parameter_type):
    if is_optional(parameter_type):
        parameter_type = next(
            arg for arg in parameter_type.__args__ if arg is not type(None)
        )
    return parameter_type


def cast(parameter_type, val: Any):
    """
    Cast a raw option value to `parameter_type`. Values that are already of a
    non-string type are passed through for pydantic to validate.
    """
    if val is None:
        return None
    parameter_type = retrieve_type(parameter_type)
    if not isinstance(val, str):
        if isinstance(parameter_type, EnumMeta) and not isinstance(
            val, parameter_type
        ):
            return cast_enum(parameter_type, str(val))
        return val

    val = val.strip()
    if parameter_type is Matrix01:
        return cast_matrix(val)

    if is_dict(parameter_type):
        return cast_dict(parameter_type, val)

    if is_list(parameter_type):
        return cast_list(parameter_type, val)

    if is_tuple(parameter_type):
        return cast_tuple(parameter_type, val)

    if isinstance(parameter_type, EnumMeta):
        return cast_enum(parameter_type, val)

    if is_primitive(parameter_type):
        return cast_primitive(parameter_type, val)
    return val


def cast_primitive(parameter_type, val: str):
    if parameter_type is bool:
        return cast_bool(val)

    try:
        return parameter_type(val)
    except ValueError as e:
        raise ValidationError("invalid_value", val) from e


def cast_bool(val: str) -> bool:
    lowered = val.lower()
    if lowered in ("1", "true", "on", "yes"):
        return True
    if lowered in ("0", "false", "off", "no"):
        return False
    raise ValidationError("invalid_bool", val)


def _split(val: str) -> List[str]:
    if not val:
        return []
    return [item.strip() for item in val.split(",")]


def cast_list(parameter_type, val: str) -> list:
    args = getattr(parameter_type, "__args__", None)
    inner_type = args[0] if args else str
    return [cast(inner_type, item) for item in _split(val)]


def cast_tuple(parameter_type, val: str) -> tuple:
    values = _split(val)
    inner_types = getattr(parameter_type, "__args__", None)
    if not inner_types:
        return tuple(values)
    if is_ellipses_tuple(parameter_type):
        return tuple(cast(inner_types[0], value) for value in values)
    if len(values) != len(inner_types):
        raise ValidationError("invalid_tuple_length", val)
    return tuple(
        cast(inner_type, value) for inner_type, value in zip(inner_types, values)
    )


def cast_dict(parameter_type, val: str) -> dict:
    """`key=value` pairs separated by commas, e.g. `p12=1.5,p31=4`."""
    args = getattr(parameter_type, "__args__", None)
    value_type = args[1] if args else str
    mapping = {}
    for item in _split(val):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValidationError("invalid_mapping", val)
        mapping[key.strip()] = cast(value_type, value)
    return mapping


def cast_enum(enum: EnumMeta, val: str):
    try:
        return enum[val]
    except KeyError:
        pass
    for member in enum:
        if member.value == val:
            return member
    raise ValidationError("invalid_enum", val)


def cast_matrix(val: str) -> List[List[int]]:
    rows = _split(val)
    if not rows:
        raise ValidationError("invalid_matrix", val)
    matrix = []
    for row in rows:
        if set(row) - {"0", "1"}:
            raise ValidationError("invalid_matrix", val)
        matrix.append([int(cell) for cell in row])
    if len({len(row) for row in matrix}) != 1:
        raise ValidationError("invalid_matrix", val)
    return matrix


def format_matrix(matrix) -> str:
    return ",".join("".join(str(int(cell)) for cell in row) for row in matrix)
