"""Sahlqvist correspondence engine for sabotage modal logic."""
