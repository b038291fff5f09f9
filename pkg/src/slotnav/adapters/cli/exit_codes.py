"""Exit codes of the ``slotnav`` commands.

Library failures map onto these at the command boundary: a violated
precondition is ``INVALID_ARGUMENT``, a missing input ``FILE_NOT_FOUND``, an
unusable configuration ``CONFIG_ERROR`` and everything else, including
malformed data files, a failed gradient check or an overfit run that did
not converge, ``GENERAL_ERROR``. Usage errors keep click's own code 2.
"""

from __future__ import annotations

from enum import IntEnum


class ExitCode(IntEnum):
    """sysexits.h / errno flavoured exit codes.

    Example:
        >>> ExitCode.INVALID_ARGUMENT
        <ExitCode.INVALID_ARGUMENT: 22>
        >>> int(ExitCode.CONFIG_ERROR)
        78
    """

    SUCCESS = 0
    GENERAL_ERROR = 1
    FILE_NOT_FOUND = 2
    PERMISSION_DENIED = 13
    INVALID_ARGUMENT = 22
    CONFIG_ERROR = 78
    SIGNAL_INT = 130
    SIGNAL_TERM = 143


__all__ = ["ExitCode"]
