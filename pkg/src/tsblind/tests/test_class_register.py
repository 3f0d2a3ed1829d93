"""Registry and dispatcher for test classes.

Module does not contain tests, only test utilities.
"""

from inspect import isclass


def get_test_class_registry():
    """Return the test class registry.

    Wrapped in a function to avoid circular imports.

    Returns
    -------
    dict
        Keys are object types, values are the TestAll[Type] classes.
    """
    from tsblind.tests.test_all_estimators import TestAllObjects
    from tsblind.tests.test_all_predictors import TestAllPredictors
    from tsblind.tests.test_all_spectral_models import TestAllSpectralModels

    return {
        "object": TestAllObjects,
        "spectral_model": TestAllSpectralModels,
        "predictor": TestAllPredictors,
    }


def get_test_classes_for_obj(obj):
    """Get all test classes relevant for an object.

    Parameters
    ----------
    obj : BaseObject class or instance

    Returns
    -------
    list of test classes
        Empty if obj is not a BaseObject.
    """
    from skbase.base import BaseObject

    if isclass(obj):
        is_object = issubclass(obj, BaseObject)
    else:
        is_object = isinstance(obj, BaseObject)
    if not is_object:
        return []

    registry = get_test_class_registry()
    test_classes = [registry["object"]]

    try:
        object_types = obj.get_class_tag("object_type")
        if not isinstance(object_types, list):
            object_types = [object_types]
    except Exception:
        object_types = []

    test_classes += [registry[t] for t in object_types if t in registry]
    return test_classes


def check_object(obj, raise_exceptions=False, tests_to_run=None, tests_to_exclude=None):
    """Run every registered test class on one object.

    Parameters
    ----------
    obj : BaseObject class or instance
    raise_exceptions : bool, default=False
        Raise the first failure instead of collecting it.
    tests_to_run : str or list of str, optional
        Restrict to these test names.
    tests_to_exclude : str or list of str, optional
        Skip these test names.

    Returns
    -------
    dict
        Test/fixture keys mapped to "PASSED" or the raised exception.
    """
    results = {}
    for test_cls in get_test_classes_for_obj(obj):
        results.update(
            test_cls().run_tests(
                obj=obj,
                raise_exceptions=raise_exceptions,
                tests_to_run=tests_to_run,
                tests_to_exclude=tests_to_exclude,
            )
        )
    return results
