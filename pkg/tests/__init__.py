"""Test suite for overlapix."""
