"""Expansion modes and the canonical column ordering.

Degree n always starts at 1 (no monopole).  Columns are ordered by
``(n, m, μ)`` ascending.  For the ``μ = ±1`` near-field case the table is
two blocks of ``N(N+2)`` columns: block ``s = 1`` (sum combination
``D_{1m} + D_{−1m}``) first, block ``s = 2`` (difference) second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from wigner_cs import constants as C
from wigner_cs.constants import ModeKind
from wigner_cs.exceptions import DomainError, FormatError


@dataclass(frozen=True)
class Mode:
    """One column of a sensing matrix.

    ``mu`` is 0 for spherical harmonics.  ``block`` is 1 or 2 for the
    ``μ = ±1`` combinations and 0 otherwise.
    """

    n: int
    m: int
    mu: int = 0
    block: int = 0

    def as_tuple(self, kind: ModeKind) -> tuple[int, ...]:
        if kind == ModeKind.SPHERICAL_HARMONICS:
            return (self.n, self.m)
        if kind == ModeKind.SNF_MU_PM1:
            return (self.block, self.n, self.m)
        return (self.n, self.m, self.mu)


def mode_count(kind: ModeKind, N: int) -> int:
    """Number of columns L for *kind* truncated at degree *N*."""
    if N < 1:
        raise DomainError(f"truncation degree N must be >= 1 (got {N})")
    kind = ModeKind(kind)
    if kind == ModeKind.WIGNER_GENERAL:
        return (4 * N**3 + 12 * N**2 + 11 * N) // 3
    if kind == ModeKind.SPHERICAL_HARMONICS:
        return N * (N + 2)
    return 2 * N * (N + 2)


@dataclass(frozen=True)
class ModeTable:
    """Bijection between flat column index q and mode."""

    kind: ModeKind
    N: int
    entries: tuple[Mode, ...]
    _index: dict[Mode, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {mode: q for q, mode in enumerate(self.entries)})
        if len(self._index) != len(self.entries):
            raise DomainError("mode table contains duplicate entries")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, q: int) -> Mode:
        return self.entries[q]

    def __iter__(self):
        return iter(self.entries)

    def index_of(self, mode: Mode) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise DomainError(f"{mode} is not part of the {self.kind} table at N={self.N}") from None

    # -- Serialization -----------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": str(self.kind),
            "N": self.N,
            "L": len(self.entries),
            "modes": [list(mode.as_tuple(self.kind)) for mode in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> ModeTable:
        try:
            kind = ModeKind(data["kind"])
            N = int(data["N"])
            rows = data["modes"]
        except (KeyError, ValueError, TypeError) as exc:
            raise FormatError(f"malformed mode table: {exc}") from exc

        table = mode_table(kind, N)
        if [list(mode.as_tuple(kind)) for mode in table.entries] != [list(r) for r in rows]:
            raise FormatError("mode table ordering does not match the canonical ordering")
        return table


def mode_table(kind: ModeKind, N: int) -> ModeTable:
    """Build the canonical table for *kind* at degree *N*."""
    kind = ModeKind(kind)
    if N < 1:
        raise DomainError(f"truncation degree N must be >= 1 (got {N})")

    entries: list[Mode] = []
    if kind == ModeKind.WIGNER_GENERAL:
        for n in range(1, N + 1):
            for m in range(-n, n + 1):
                for mu in range(-n, n + 1):
                    entries.append(Mode(n, m, mu))
    elif kind == ModeKind.SPHERICAL_HARMONICS:
        for n in range(1, N + 1):
            for m in range(-n, n + 1):
                entries.append(Mode(n, m))
    else:
        for block in (1, 2):
            for n in range(1, N + 1):
                for m in range(-n, n + 1):
                    entries.append(Mode(n, m, 1, block))

    return ModeTable(kind, N, tuple(entries))


def truncation_degree(k: float, r_min: float, N0: int = C.TRUNCATION_N0) -> int:
    """Rule-of-thumb truncation ``ceil(k·r_min) + N0``.

    *k* is the wavenumber and *r_min* the radius of the minimum sphere
    enclosing the antenna under test.
    """
    if k <= 0 or r_min <= 0:
        raise DomainError(f"wavenumber and radius must be positive (got k={k}, r_min={r_min})")
    return math.ceil(k * r_min - C.TRUNCATION_ROUND_TOL) + int(N0)
