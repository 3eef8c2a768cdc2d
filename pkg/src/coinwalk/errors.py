"""Error type shared across the package.

Every failure mode that callers may want to branch on carries a stable
string code (e.g. ``"dense-limit-exceeded"``) in addition to a human
readable message.
"""

from __future__ import annotations

__all__ = ["ToolkitError"]


class ToolkitError(Exception):
    """Exception with a machine-readable ``code`` attribute."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
