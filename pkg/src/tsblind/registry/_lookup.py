"""Registry lookup.

all_objects(object_types, filter_tags)
    lookup and filtering of tsblind objects
"""

from pathlib import Path

from skbase.base import BaseObject
from skbase.lookup import all_objects as _all_objects

from tsblind.registry._tags import OBJECT_TAG_REGISTER

VALID_OBJECT_TYPE_STRINGS = {x[1] for x in OBJECT_TAG_REGISTER}

MODULES_TO_IGNORE = ("tests", "setup", "utils", "registry", "cli")


def all_objects(
    object_types=None,
    filter_tags=None,
    exclude_objects=None,
    return_names=True,
    as_dataframe=False,
    return_tags=None,
    suppress_import_stdout=True,
):
    """Get all BaseObject descendants defined in tsblind.

    Base classes and classes in test modules are not included.

    Parameters
    ----------
    object_types : str or list of str, optional
        Values of the "object_type" tag to keep, e.g. "spectral_model".
        None returns every object.
    filter_tags : dict of (str or list of str), optional
        Conjunction of conditions "tag value equals value, or is in value".
    exclude_objects : str or list of str, optional
        Class names to exclude.
    return_names : bool, default=True
        Whether to return class names alongside the classes.
    as_dataframe : bool, default=False
        Return a pandas.DataFrame instead of a list.
    return_tags : str or list of str, optional
        Tags whose values are returned with each object.
    suppress_import_stdout : bool, default=True
        Whether to suppress stdout on import.

    Returns
    -------
    list or pd.DataFrame
        In alphabetical order of class name; see ``skbase.lookup.all_objects``.

    Examples
    --------
    >>> from tsblind.registry import all_objects
    >>> names = [name for name, _ in all_objects("spectral_model")]
    >>> "SpectralDensity" in names
    True
    """
    root = str(Path(__file__).parent.parent)

    if isinstance(filter_tags, str):
        filter_tags = {filter_tags: True}
    filter_tags = dict(filter_tags) if filter_tags else {}

    if object_types:
        if isinstance(object_types, str):
            object_types = [object_types]
        requested = filter_tags.get("object_type")
        if requested is not None:
            if isinstance(requested, str):
                requested = [requested]
            object_types = [t for t in object_types if t in requested]
        filter_tags["object_type"] = object_types

    return _all_objects(
        object_types=[BaseObject],
        filter_tags=filter_tags or None,
        exclude_objects=exclude_objects,
        return_names=return_names,
        as_dataframe=as_dataframe,
        return_tags=return_tags,
        suppress_import_stdout=suppress_import_stdout,
        package_name="tsblind",
        path=root,
        modules_to_ignore=MODULES_TO_IGNORE,
    )
