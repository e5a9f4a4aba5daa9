"""Property-based tests for the PSTAE workspace."""
