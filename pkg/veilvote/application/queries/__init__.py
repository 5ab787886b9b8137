"""
Queries for veilvote.
"""
from veilvote.application.queries.accounting_queries import AccountPrivacyQuery, CalibrateSigmaQuery

__all__ = ['AccountPrivacyQuery', 'CalibrateSigmaQuery']
