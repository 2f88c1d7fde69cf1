# Unit tests for orbitile
