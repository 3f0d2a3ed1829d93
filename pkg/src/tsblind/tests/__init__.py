"""Package-level conformance tests for tsblind objects."""
