"""Scattering lengths, box localization and Bogoliubov integrals for dilute Bose gas energy bounds."""

__version__ = "0.1.0"
