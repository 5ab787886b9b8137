"""
Application layer for veilvote.
"""
