# This file makes the tests/arithmetic directory a proper Python package
