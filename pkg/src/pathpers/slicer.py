"""Restrict a bifiltration to a monotone path, giving a one-parameter filtration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .bifiltration import Bifiltration, faces
from .path import Mode, MonotonePath, entry_value


class Cell(NamedTuple):
    vertices: tuple[int, ...]
    dim: int
    value: float


@dataclass(frozen=True)
class ScalarFiltration:
    """Cells sorted by (value, dim, vertices); faces never follow cofaces."""

    cells: tuple[Cell, ...]
    max_dim: int | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        cells = tuple(sorted((Cell(tuple(c[0]), len(c[0]) - 1, float(c[2])) for c in self.cells),
                             key=lambda c: (c.value, c.dim, c.vertices)))
        top = max((c.dim for c in cells), default=0)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "max_dim", top if self.max_dim is None else int(self.max_dim))
        object.__setattr__(self, "_index", {c.vertices: i for i, c in enumerate(cells)})

    @classmethod
    def from_values(cls, values: dict[tuple[int, ...], float], max_dim: int | None = None) -> ScalarFiltration:
        return cls(tuple(Cell(vs, len(vs) - 1, v) for vs, v in values.items()), max_dim=max_dim)

    def __len__(self) -> int:
        return len(self.cells)

    def index_of(self, vertices: tuple[int, ...]) -> int:
        return self._index[vertices]

    def values(self) -> dict[tuple[int, ...], float]:
        return {c.vertices: c.value for c in self.cells}

    def dump(self) -> str:
        return "".join(
            f"{c.dim} {c.value!r} " + " ".join(map(str, c.vertices)) + "\n" for c in self.cells
        )


def slice_bifiltration(b: Bifiltration, path: MonotonePath, mode: Mode = "pushforward") -> ScalarFiltration:
    """Entry value of every simplex along ``path``.

    Orthogonal projection is not order preserving, so in that mode values
    are lifted to the max over faces afterwards.
    """
    values = {s.vertices: entry_value(path, s.grade, mode) for s in b.simplices}
    if mode == "orthogonal":
        for s in sorted(b.simplices, key=lambda s: s.dim):
            v = values[s.vertices]
            for f in faces(s.vertices):
                if values[f] > v:
                    v = values[f]
            values[s.vertices] = v
    return ScalarFiltration.from_values(values, max_dim=b.max_dim)


def slice_many(bs: Sequence[Bifiltration], path: MonotonePath, mode: Mode = "pushforward") -> list[ScalarFiltration]:
    return [slice_bifiltration(b, path, mode) for b in bs]
