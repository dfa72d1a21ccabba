"""Validation-driven development toolkit: problem frames, refinement plans,
finite-state machine specs, validation obligations, and a revalidation ledger.
"""

__version__ = "0.1.0"
