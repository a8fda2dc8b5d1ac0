"""Unit tests for homclosure components."""
