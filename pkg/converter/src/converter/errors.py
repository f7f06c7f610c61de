class ConvertError(Exception):
    """Missing, malformed, or inconsistent raw input files."""
