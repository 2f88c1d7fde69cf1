# Tests for orbitile
