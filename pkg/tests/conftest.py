"""Shared fixtures for orbitile tests."""

import os
import tempfile
from unittest.mock import patch

import pytest

from orbitile.substitution.system import make_system
from orbitile.surface.pq import pq_substitution


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield tmp_dir


@pytest.fixture
def mock_logger():
    """Mock logger to suppress logging during tests."""
    with patch('orbitile.util.logger.orbitile_logger') as mock_log:
        yield mock_log


@pytest.fixture
def clean_env(monkeypatch):
    """Clean environment variables for testing."""
    for var in ['ORBITILE_BITS', 'LOG_LEVEL', 'DEBUG', 'LOG_TO_FILE', 'DISABLE_COLOR_PRINTING']:
        monkeypatch.delenv(var, raising=False)
    yield monkeypatch


# canonical systems


@pytest.fixture
def binary():
    return make_system('binary', {'0': '00'})


@pytest.fixture
def ternary():
    return make_system('ternary', {'0': '000'})


@pytest.fixture
def quaternary():
    return make_system('quaternary', {'0': '0000'})


@pytest.fixture
def fibonacci():
    return make_system('fib', {'a': 'ab', 'b': 'a'})


@pytest.fixture
def silver():
    return make_system('silver', {'A': 'AB', 'B': 'AAB'})


@pytest.fixture
def pq55():
    return pq_substitution(5, 5)


SYSTEM_FILES = {
    'bin.sys': '# growth rate 2\nsystem binary\nletter 0 -> 0 0\n',
    'tri.sys': 'system ternary\nletter 0 -> 0 0 0\n',
    'quad.sys': 'system quaternary\nletter 0 -> 0 0 0 0\n',
    'fib.sys': 'system fib\n\nletter a -> a b\nletter b -> a\n',
    'silver.sys': 'system silver\nletter A -> A B\nletter B -> A A B\n',
    'pq55.sys': 'system pq55\nletter Y -> Y W W Y W\nletter W -> Y W W Y W W Y W\n',
    'swap.sys': 'system swap\nletter a -> b\nletter b -> a\n',
}


@pytest.fixture
def system_files(temp_dir):
    """Write the sample .sys files and return their paths by name."""
    paths = {}
    for name, text in SYSTEM_FILES.items():
        path = os.path.join(temp_dir, name)
        with open(path, 'w') as f:
            f.write(text)
        paths[name] = path
    yield paths
