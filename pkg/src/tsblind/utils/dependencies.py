"""Python version and soft dependency checks driven by object tags."""

from skbase.utils.dependencies import (
    _check_python_version,
    _check_soft_dependencies,
)


def _check_object_deps(obj, severity="error"):
    """
    Check whether the environment satisfies the tags of a tsblind object.

    Reads the ``"python_version"`` and ``"python_dependencies"`` tags.

    Parameters
    ----------
    obj : BaseObject class or instance, or list/tuple thereof
    severity : {"error", "warning", "none"}, default="error"
        "error" raises, "warning" warns, "none" only returns the result.

    Returns
    -------
    bool
        True if every object is compatible.
    """
    if isinstance(obj, (list, tuple)):
        return all(_check_object_deps(x, severity=severity) for x in obj)

    compatible = _check_python_version(obj, severity=severity)

    dependencies = obj.get_class_tag("python_dependencies", None)
    if dependencies is None:
        return compatible
    if not isinstance(dependencies, list):
        dependencies = [dependencies]
    alias = obj.get_class_tag("python_dependencies_alias", None)
    return compatible and _check_soft_dependencies(
        *dependencies, severity=severity, obj=obj, package_import_alias=alias
    )
