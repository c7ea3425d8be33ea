"""w-shingle sets and the Jaccard distance between symbol trajectories."""

from __future__ import annotations

from dataclasses import dataclass

from .core import SymbolTrajectory, TrajsimError

__all__ = ["ShingleSet", "shingle_set", "jaccard_distance", "UndefinedDistanceError"]


class UndefinedDistanceError(TrajsimError, ValueError):
    """Both shingle sets are empty, so the Jaccard ratio is 0/0."""


@dataclass(frozen=True)
class ShingleSet:
    w: int
    shingles: frozenset

    def __len__(self) -> int:
        return len(self.shingles)


def _syms(S) -> tuple:
    if isinstance(S, SymbolTrajectory):
        return S.symbols
    return tuple(S)


def shingle_set(S, w: int) -> ShingleSet:
    if not isinstance(w, int) or w < 1:
        raise ValueError("shingle width w must be a positive integer")
    s = _syms(S)
    return ShingleSet(w, frozenset(s[i:i + w] for i in range(len(s) - w + 1)))


def jaccard_distance(A, B, w: int) -> float:
    """``1 - |X & Y| / |X | Y|`` over the w-shingle sets of ``A`` and ``B``."""
    x = shingle_set(A, w).shingles
    y = shingle_set(B, w).shingles
    union = len(x | y)
    if union == 0:
        raise UndefinedDistanceError("Jaccard distance undefined: both shingle sets are empty")
    return 1.0 - len(x & y) / union
