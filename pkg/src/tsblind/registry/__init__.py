"""Registry and lookup functionality."""

from tsblind.registry._lookup import all_objects
from tsblind.registry._tags import (
    OBJECT_TAG_LIST,
    OBJECT_TAG_REGISTER,
)

__all__ = [
    "OBJECT_TAG_LIST",
    "OBJECT_TAG_REGISTER",
    "all_objects",
]
