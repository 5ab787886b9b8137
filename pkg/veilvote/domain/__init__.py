"""
Domain layer for veilvote.
"""
