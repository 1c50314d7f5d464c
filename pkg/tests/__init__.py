"""Tests-Modul für Unit-Tests."""
