"""Exception hierarchy.

Every error raised for bad user input derives from :class:`BlockCVError`
(itself a ``ValueError``) so the CLI can map them all to exit status 2.
"""

from __future__ import annotations


class BlockCVError(ValueError):
    """Base class for validation errors raised by this package."""


class TooFewSamples(BlockCVError):
    def __init__(self, required: int, got: int, bound: str) -> None:
        self.required = required
        self.got = got
        self.bound = bound
        super().__init__(f"TooFewSamples: need {bound} (n >= {required}), got n = {got}")


class IllegitimateCenter(BlockCVError):
    def __init__(self, center: int, lo: int, hi: int) -> None:
        self.center = center
        self.lo = lo
        self.hi = hi
        super().__init__(f"IllegitimateCenter: center {center} outside [{lo}, {hi}]")


class IndexOutOfRange(BlockCVError):
    pass


class BadPair(BlockCVError):
    pass


class BadParameters(BlockCVError):
    pass


class MalformedDesign(BlockCVError):
    pass


class NotApplicable(BlockCVError):
    pass


class RankDeficient(BlockCVError):
    pass


class EvaluatorFailure(RuntimeError):
    """An evaluator raised or returned a non-finite loss for one split."""

    def __init__(self, center: int, cause: object, candidate: int | None = None) -> None:
        self.center = center
        self.cause = cause
        self.candidate = candidate
        where = f"center {center}"
        if candidate is not None:
            where = f"candidate {candidate}, {where}"
        super().__init__(f"EvaluatorFailure at {where}: {cause}")
