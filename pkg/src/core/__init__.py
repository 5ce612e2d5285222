"""Core algebra, transforms and exceptions."""
