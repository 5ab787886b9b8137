"""
Simulated secure-computation boundary.

Noiseless votes, noisy scores and margins exist only inside this package.
The harness sees released labels; the accountant sees margins through
AccountantHook.
"""
from veilvote.infrastructure.trust_boundary.secure_aggregator import (
    AccountantHook,
    MarginLedger,
    SecureAggregator,
    mpc_argmax,
)

__all__ = ['AccountantHook', 'MarginLedger', 'SecureAggregator', 'mpc_argmax']
