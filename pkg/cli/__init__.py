"""
Command-line package for veilvote.
"""
__version__ = "0.1.0"
