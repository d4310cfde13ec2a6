"""Space-tagged sparse operators and diagonal quadrature weights.

Every operator produced by the library is a rectangular sparse matrix whose
rows and columns belong to named staggered spaces (scalar points, a face set,
or a stacked collection of face sets).  The tags catch shape/space mix-ups at
composition time; numerical code works on the underlying CSR matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class Space:
    """A staggered index space: kind plus its flattened size."""

    kind: str  # e.g. "scalar", "face_x", "faces" (stacked), "centers"
    size: int

    def __str__(self) -> str:
        return f"{self.kind}[{self.size}]"


class SparseOperator:
    """Sparse matrix tagged with domain and codomain spaces.

    Stored in CSR form with duplicates summed and explicit zeros dropped.
    """

    def __init__(self, matrix, domain: Space, codomain: Space):
        m = sp.csr_matrix(matrix)
        m.sum_duplicates()
        m.eliminate_zeros()
        if m.shape != (codomain.size, domain.size):
            raise ValueError(
                f"operator shape {m.shape} does not match spaces "
                f"{codomain} x {domain}"
            )
        self.matrix = m
        self.domain = domain
        self.codomain = codomain

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            if other.codomain != self.domain:
                raise ValueError(
                    f"cannot compose {self.codomain}x{self.domain} with "
                    f"{other.codomain}x{other.domain}"
                )
            return SparseOperator(self.matrix @ other.matrix, other.domain, self.codomain)
        arr = np.asarray(other)
        if arr.shape[0] != self.domain.size:
            raise ValueError(f"vector length {arr.shape[0]} != domain {self.domain}")
        return self.matrix @ arr

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def transpose(self) -> "SparseOperator":
        return SparseOperator(self.matrix.T, self.codomain, self.domain)

    @property
    def T(self) -> "SparseOperator":
        return self.transpose()

    def __repr__(self) -> str:
        return f"SparseOperator({self.codomain} <- {self.domain}, nnz={self.nnz})"


@dataclass(frozen=True)
class DiagonalWeight:
    """Positive diagonal quadrature weights on a staggered space."""

    values: np.ndarray
    space: Space

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size != self.space.size:
            raise ValueError(f"weight length {v.size} != space {self.space}")
        if not np.all(v > 0):
            raise ValueError(f"nonpositive weight entries on {self.space}")

    def diag(self) -> sp.csr_matrix:
        return sp.diags(self.values).tocsr()

    def inner(self, a, b, measure: float) -> float:
        """Weighted quadrature inner product  measure * sum(w * a * b)."""
        return float(measure * np.dot(self.values * np.asarray(a), np.asarray(b)))
