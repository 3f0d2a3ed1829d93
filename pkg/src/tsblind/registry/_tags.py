"""Register of object tags.

New tags are entered in OBJECT_TAG_REGISTER; no other place needs changing.

OBJECT_TAG_REGISTER - list of tuples, one per tag:
    0 : string - name of the tag as used in the _tags dictionary
    1 : string - object type the tag applies to ("object" for all)
    2 : string or tuple - expected type of the tag value:
            "bool", "int", "str", "list", "dict",
            ("str", list_of_string) - any string in list_of_string,
            ("list", "str") - a string or a list of strings
    3 : string - plain English description of the tag

OBJECT_TAG_LIST - list of string
    Tag names, in the order of OBJECT_TAG_REGISTER.

OBJECT_TYPES - list of string
    Values of the "object_type" tag used in tsblind.
"""

OBJECT_TYPES = ["spectral_model", "predictor", "simulator", "config"]

OBJECT_TAG_REGISTER = [
    # -----------
    # all objects
    # -----------
    (
        "object_type",
        "object",
        ("str", OBJECT_TYPES),
        "type of object: 'spectral_model', 'predictor', 'simulator' or 'config'",
    ),
    (
        "python_version",
        "object",
        "str",
        "python version specifier (PEP 440) for the object, or None = all versions ok",
    ),
    (
        "python_dependencies",
        "object",
        ("list", "str"),
        "python dependencies of the object as str or list of str",
    ),
    (
        "python_dependencies_alias",
        "object",
        "dict",
        "import names keyed by package name, where they differ",
    ),
]

OBJECT_TAG_LIST = [x[0] for x in OBJECT_TAG_REGISTER]
