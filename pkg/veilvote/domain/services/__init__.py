"""
Domain services for veilvote.
"""
