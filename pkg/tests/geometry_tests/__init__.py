"""geometry tests."""
