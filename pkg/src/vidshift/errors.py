"""Exception hierarchy shared by every vidshift module."""


class VidshiftError(Exception):
    """Base class for all errors raised by vidshift."""


class UnsupportedSpec(VidshiftError, ValueError):
    pass


class FrameTooSmall(VidshiftError, ValueError):
    pass


class IndexOutOfRange(VidshiftError, IndexError):
    pass


class CodecFailure(VidshiftError):
    pass


class EncoderNotFound(CodecFailure):
    pass


class EncoderFailure(CodecFailure):
    def __init__(self, message, stderr=""):
        super().__init__(message)
        self.stderr = stderr


class FrameCountMismatch(CodecFailure):
    pass


class DecodeFailure(VidshiftError):
    pass


class InconsistentLabels(VidshiftError, ValueError):
    pass


class EmptyGroup(VidshiftError, ValueError):
    pass


class IncompleteGrid(VidshiftError, ValueError):
    def __init__(self, missing):
        self.missing = list(missing)
        preview = ", ".join(f"{m}:{k}@{s}" for m, k, s in self.missing[:8])
        more = "" if len(self.missing) <= 8 else f" (+{len(self.missing) - 8} more)"
        super().__init__(f"incomplete severity grid, missing {preview}{more}")


class ZeroCleanAccuracy(VidshiftError, ZeroDivisionError):
    pass


class ManifestConflict(VidshiftError):
    pass


class MalformedFile(VidshiftError, ValueError):
    pass
