"""Set-valued instances and selections."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Hashable, Mapping

from .geometry.norms import PolyhedralNorm
from .geometry.polytope import Polytope
from .metric import FinitePseudometricSpace
from .rational import INF, sub


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class SetValuedInstance:
    space: FinitePseudometricSpace
    norm: PolyhedralNorm
    images: Mapping[Hashable, Polytope]
    m: int

    def __post_init__(self):
        pts = set(self.space.points)
        if set(self.images) != pts:
            missing = pts - set(self.images)
            extra = set(self.images) - pts
            raise InstanceError(f"images do not match points (missing {sorted(map(str, missing))}, extra {sorted(map(str, extra))})")
        for x, P in self.images.items():
            if not isinstance(P, Polytope):
                raise InstanceError(f"image of {x!r} is not a nonempty polytope")
            if P.dim != self.norm.dim:
                raise InstanceError(f"image of {x!r} lives in dimension {P.dim}, norm in {self.norm.dim}")
            if P.affine_dim > self.m:
                raise InstanceError(f"image of {x!r} has affine dimension {P.affine_dim} > m={self.m}")
        if self.m < 0:
            raise InstanceError("m must be nonnegative")

    @property
    def dim(self) -> int:
        return self.norm.dim

    @property
    def points(self):
        return self.space.points

    def restrict(self, subset) -> "SetValuedInstance":
        subset = list(subset)
        return SetValuedInstance(
            self.space.restrict(subset), self.norm, {x: self.images[x] for x in subset}, self.m
        )

    def with_images(self, images: Mapping[Hashable, Polytope]) -> "SetValuedInstance":
        return SetValuedInstance(self.space, self.norm, dict(images), self.m)


@dataclass(frozen=True)
class Selection:
    values: Dict[Hashable, tuple]
    lip: object = field(default=None)

    @staticmethod
    def measure(space: FinitePseudometricSpace, norm: PolyhedralNorm, values) -> object:
        """Exact Lipschitz seminorm; INF when two zero-distance points differ."""
        best = Fraction(0)
        for x, y in combinations(space.points, 2):
            r = space.d(x, y)
            if r is INF:
                continue
            g = norm.gauge(sub(values[x], values[y]))
            if r == 0:
                if g != 0:
                    return INF
                continue
            q = g / r
            if q > best:
                best = q
        return best

    def is_selection_of(self, instance: SetValuedInstance) -> bool:
        return all(instance.images[x].contains(self.values[x]) for x in instance.points)
