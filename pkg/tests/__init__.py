"""Tests for the PSTAE workspace."""
