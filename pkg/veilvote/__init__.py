"""
veilvote: differentially private federated learning by label voting.
"""
__version__ = "0.1.0"
