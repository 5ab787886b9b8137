"""
Infrastructure layer for veilvote.
"""
