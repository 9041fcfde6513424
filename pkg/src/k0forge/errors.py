class VerificationError(Exception):
    """A certificate failed to verify."""
