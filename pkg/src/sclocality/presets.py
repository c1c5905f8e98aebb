"""Named code parameter sets.

``sc1``..``sc5`` are coupled codes with gamma_c = gamma_l = 3, kappa = p = 13,
memory 1 and L = 10; ``lc1``/``lc2`` are the irregular local codes of
``sc4``/``sc5``.  ``tiny`` is a small instance for brute-force checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lifting import LiftedCode, ab_lift, build_coupled
from .partition import cutting_vector_partition
from .protograph import (
    PartitionMatrix,
    Protograph,
    build_balanced,
    build_regular,
    build_unbalanced,
    couple_protograph,
    partition_from_local,
    split_by_partition,
)

__all__ = ["Preset", "PRESETS", "get_preset", "P_C_CV", "P_C_LBO", "P_C_LAO"]

P_C_CV = np.array([
    [0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1],
], dtype=np.int8)

P_C_LBO = np.array([
    [0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [1, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1],
    [0, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0],
], dtype=np.int8)

P_C_LAO = np.array([
    [0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0],
    [0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 1],
], dtype=np.int8)

for _m in (P_C_CV, P_C_LBO, P_C_LAO):
    _m.setflags(write=False)

_BUILDERS = {
    "regular": lambda gl, k, nu: build_regular(gl, k),
    "balanced": build_balanced,
    "unbalanced": build_unbalanced,
}


@dataclass(frozen=True, eq=False)
class Preset:
    """Parameters of one code.

    ``kind == "sc"`` is the coupled code; ``kind == "lc"`` is the local code
    alone (its protograph is the gamma_l local rows).
    """

    name: str
    kind: str
    gamma_c: int
    gamma_l: int
    kappa: int
    p: int
    l: int
    nu: int = 0
    scheme: str = "regular"
    p_c: np.ndarray | None = None

    def local_protograph(self) -> Protograph:
        return _BUILDERS[self.scheme](self.gamma_l, self.kappa, self.nu)

    def protograph(self) -> Protograph:
        """Full protograph: all-ones coupling rows over the local rows."""
        loc = self.local_protograph().entries
        if self.kind == "lc":
            return Protograph(loc, gamma_c=0)
        top = np.ones((self.gamma_c, self.kappa), dtype=np.int8)
        return Protograph(np.vstack([top, loc]), gamma_c=self.gamma_c)

    def partition(self) -> PartitionMatrix:
        if self.kind == "lc":
            raise ValueError(f"preset {self.name} is an uncoupled local code")
        return PartitionMatrix.stack(self.p_c, partition_from_local(self.local_protograph()))

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        return split_by_partition(self.protograph(), self.partition())

    def analysis_matrix(self) -> np.ndarray:
        """Protograph used for cycle counts and thresholds: coupled for sc, local for lc."""
        if self.kind == "lc":
            return self.local_protograph().entries
        b0, b1 = self.components()
        return couple_protograph(b0, b1, self.l)

    def lifted(self) -> LiftedCode:
        if self.kind == "lc":
            code = ab_lift(self.local_protograph(), self.p)
            return LiftedCode(code.h, code.p, 0, code.gamma_l, code.kappa, 1, 0,
                              code.lcn_rows, self.name)
        return build_coupled(self.protograph(), self.partition(), self.p, self.l, self.name)

    def params(self) -> dict:
        d = {"name": self.name, "kind": self.kind, "gamma_c": self.gamma_c, "gamma_l": self.gamma_l,
             "kappa": self.kappa, "p": self.p, "L": self.l, "m": 1 if self.kind == "sc" else 0,
             "nu": self.nu, "scheme": self.scheme}
        if self.p_c is not None:
            d["p_c"] = np.asarray(self.p_c).tolist()
        return d


def _sc(name, p_c, nu=0, scheme="regular"):
    return Preset(name, "sc", 3, 3, 13, 13, 10, nu, scheme, p_c)


PRESETS: dict[str, Preset] = {
    "sc1": _sc("sc1", P_C_CV),
    "sc2": _sc("sc2", P_C_LBO),
    "sc3": _sc("sc3", P_C_LAO),
    "sc4": _sc("sc4", P_C_LAO, 10, "balanced"),
    "sc5": _sc("sc5", P_C_LAO, 10, "unbalanced"),
    "lc1": Preset("lc1", "lc", 0, 3, 13, 13, 1, 10, "balanced"),
    "lc2": Preset("lc2", "lc", 0, 3, 13, 13, 1, 10, "unbalanced"),
    "tiny": Preset("tiny", "sc", 1, 1, 3, 3, 2, 0, "regular", cutting_vector_partition(1, 3)),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
