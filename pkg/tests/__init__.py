"""Test suite for Separability."""
