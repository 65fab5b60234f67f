"""Persistence diagrams of a scalar filtration over Z/2.

Standard column reduction, run from the top dimension downwards so that
columns already known to be positive can be cleared without reduction.
Columns are Python ints used as bitsets over cell indices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bifiltration import faces
from .errors import DimensionOverflow, ValidationError
from .slicer import ScalarFiltration


@dataclass(frozen=True)
class PersistenceDiagram:
    """Finite (birth, death) pairs plus births of classes that never die.

    Essential classes are kept in their own list instead of carrying an
    infinite death value.
    """

    dim: int
    finite_pairs: tuple[tuple[float, float], ...] = ()
    essential_births: tuple[float, ...] = ()

    def __post_init__(self):
        pairs = []
        for b, d in self.finite_pairs:
            b, d = float(b), float(d)
            if d < b:
                raise ValidationError(f"pair ({b}, {d}) has death before birth")
            if d > b:
                pairs.append((b, d))
        object.__setattr__(self, "finite_pairs", tuple(sorted(pairs)))
        object.__setattr__(self, "essential_births", tuple(sorted(float(b) for b in self.essential_births)))

    def __len__(self) -> int:
        return len(self.finite_pairs) + len(self.essential_births)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "pairs": [[b, d] for b, d in self.finite_pairs],
            "essential": list(self.essential_births),
        }

    @classmethod
    def from_json(cls, doc: dict) -> PersistenceDiagram:
        return cls(int(doc["dim"]), tuple(tuple(p) for p in doc.get("pairs", ())), tuple(doc.get("essential", ())))


def reduce_filtration(f: ScalarFiltration, top: int | None = None):
    """Reduce the boundary matrix; return (pairs as index tuples, essential indices).

    Only cells of dimension <= ``top`` + 1 are reduced.
    """
    cells = f.cells
    if top is None:
        top = f.max_dim
    by_dim: dict[int, list[int]] = {}
    for i, c in enumerate(cells):
        if c.dim <= top + 1:
            by_dim.setdefault(c.dim, []).append(i)

    pairs: list[tuple[int, int]] = []
    paired: set[int] = set()
    cleared: set[int] = set()
    for d in sorted(by_dim, reverse=True):
        if d == 0:
            break
        pivots: dict[int, int] = {}
        reduced: dict[int, int] = {}
        next_cleared = set()
        for j in by_dim[d]:
            if j in cleared:
                continue
            col = 0
            for fv in faces(cells[j].vertices):
                col |= 1 << f.index_of(fv)
            while col:
                low = col.bit_length() - 1
                k = pivots.get(low)
                if k is None:
                    pivots[low] = j
                    reduced[j] = col
                    pairs.append((low, j))
                    paired.add(low)
                    paired.add(j)
                    next_cleared.add(low)
                    break
                col ^= reduced[k]
        cleared = next_cleared
    essential = [i for i, c in enumerate(cells) if c.dim <= top and i not in paired]
    return pairs, essential


def compute_diagrams(f: ScalarFiltration, max_dim: int) -> list[PersistenceDiagram]:
    """One diagram per dimension 0..max_dim."""
    if max_dim < 0:
        raise DimensionOverflow(f"max_dim must be >= 0, got {max_dim}")
    if max_dim > f.max_dim:
        raise DimensionOverflow(f"requested H_{max_dim} but the complex has dimension {f.max_dim}")
    pairs, essential = reduce_filtration(f, max_dim)
    cells = f.cells
    finite: list[list] = [[] for _ in range(max_dim + 1)]
    ess: list[list] = [[] for _ in range(max_dim + 1)]
    for i, j in pairs:
        q = cells[i].dim
        if q <= max_dim:
            finite[q].append((cells[i].value, cells[j].value))
    for i in essential:
        ess[cells[i].dim].append(cells[i].value)
    return [PersistenceDiagram(q, tuple(finite[q]), tuple(ess[q])) for q in range(max_dim + 1)]
