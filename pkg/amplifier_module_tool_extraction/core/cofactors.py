"""
Cofactor identities of the coefficient matrix.

For interlaced positive roots r_0 < β_1 < r_1 < ... < β_n < r_n the matrix

    A = [[1, ..., 1], [β_i/(β_i − r_j)]_{i=1..n, j=0..n}]

has cofactors with closed product forms. This module evaluates both sides of
each identity: the left side from a direct permutation-expansion determinant,
the right side from the products. It works on any interlaced configuration,
so synthetic instances need no ModelParams.

Indices follow the 1-based matrix convention of the identities: j ranges over
columns 1..n+1 (root r_{j-1}), i over rows 2..n+1 (rate β_{i-1}).
"""

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_ORDER = 8
TINY = 1e-300


@lru_cache(maxsize=None)
def _permutation_table(size: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(itertools.permutations(range(size))), dtype=np.intp).reshape(-1, size)
    signs = np.empty(len(perms))
    for row, perm in enumerate(perms):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        signs[row] = -1.0 if inversions % 2 else 1.0
    return perms, signs


def leibniz_det(matrix: np.ndarray) -> float:
    """Determinant by explicit permutation expansion (the direct oracle)."""
    matrix = np.asarray(matrix, dtype=float)
    size = matrix.shape[0]
    if size == 0:
        return 1.0
    perms, signs = _permutation_table(size)
    products = np.prod(matrix[np.arange(size), perms], axis=1)
    return math.fsum(signs * products)


def cofactor(matrix: np.ndarray, row: int, col: int) -> float:
    """Cofactor C_{row,col} with 1-based indices."""
    minor = np.delete(np.delete(np.asarray(matrix, dtype=float), row - 1, axis=0), col - 1, axis=1)
    return (-1.0) ** (row + col) * leibniz_det(minor)


def coefficient_matrix(roots, rates) -> np.ndarray:
    roots = np.asarray(roots, dtype=float)
    rates = np.asarray(rates, dtype=float)
    A = np.ones((len(roots), len(roots)))
    if len(rates):
        A[1:, :] = rates[:, None] / (rates[:, None] - roots[None, :])
    return A


def ratio_R(roots, rates) -> float:
    """ℛ = Π r / Π β."""
    return math.prod(roots) / math.prod(rates)


def eta_upper(roots, rates, j: int) -> float:
    return math.prod(roots[j - 1] - rates[k - 2] for k in range(2, j + 1))


def eta_lower(roots, rates, j: int) -> float:
    n = len(rates)
    return math.prod(rates[k - 2] - roots[j - 1] for k in range(j + 1, n + 2))


def gamma_upper(roots, j: int) -> float:
    return math.prod(roots[j - 1] - roots[k - 1] for k in range(1, j))


def gamma_lower(roots, j: int) -> float:
    return math.prod(roots[k - 1] - roots[j - 1] for k in range(j + 1, len(roots) + 1))


def nu_lower(roots, rates, i: int) -> float:
    return math.prod(rates[i - 2] - roots[k - 1] for k in range(1, i))


def nu_upper(roots, rates, i: int) -> float:
    return math.prod(roots[k - 1] - rates[i - 2] for k in range(i, len(roots) + 1))


def theta_lower(rates, i: int) -> float:
    return math.prod(rates[i - 2] - rates[k - 2] for k in range(2, i))


def theta_upper(rates, i: int) -> float:
    return math.prod(rates[k - 2] - rates[i - 2] for k in range(i + 1, len(rates) + 2))


def ratio_M(roots, rates) -> list[float]:
    """ℳ_1..ℳ_n from the ν/θ products."""
    return [
        nu_lower(roots, rates, i) * nu_upper(roots, rates, i)
        / (rates[i - 2] * theta_lower(rates, i) * theta_upper(rates, i))
        for i in range(2, len(rates) + 2)
    ]


def cofactor_ratio(roots, rates, j: int) -> float:
    """Closed form of Cof_{1,j}/det A."""
    return (
        eta_upper(roots, rates, j) * eta_lower(roots, rates, j)
        / (gamma_upper(roots, j) * gamma_lower(roots, j))
    )


def _relative(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / (abs(lhs) + TINY)


@dataclass
class CofactorReport:
    n: int
    absolute: dict[str, float] = field(default_factory=dict)
    relative: dict[str, float] = field(default_factory=dict)

    def passed(self, tolerance: float) -> bool:
        return all(value <= tolerance for value in self.relative.values())

    def to_dict(self) -> dict:
        return {"n": self.n, "absolute": dict(self.absolute), "relative": dict(self.relative)}


def cofactor_identity_suite(n: int, roots, rates) -> CofactorReport:
    """
    Both sides of the six cofactor identities, max residual of each.

    Args:
        n: Number of rates; roots must hold n+1 entries interlaced with them
        roots: r_0 < ... < r_n
        rates: β_1 < ... < β_n
    """
    roots = [float(r) for r in roots]
    rates = [float(b) for b in rates]
    if n > MAX_ORDER:
        raise ValueError(f"Cofactor oracle supports n <= {MAX_ORDER}, got {n}")
    if len(rates) != n or len(roots) != n + 1:
        raise ValueError(f"Expected {n} rates and {n + 1} roots")

    A = coefficient_matrix(roots, rates)
    det = leibniz_det(A)
    size = n + 1
    cof = np.array([[cofactor(A, i, j) for j in range(1, size + 1)] for i in range(1, size + 1)])
    R = ratio_R(roots, rates)
    M = ratio_M(roots, rates)

    pairs: dict[str, list[tuple[float, float]]] = {name: [] for name in ("cof1", "cof2", "cof3", "Cof2", "Rn", "Cof5")}

    for j in range(1, size + 1):
        pairs["cof1"].append((cof[0, j - 1] / det, cofactor_ratio(roots, rates, j)))

        replaced = A.copy()
        replaced[:, j - 1] = 1.0
        pairs["cof3"].append((leibniz_det(replaced), R / roots[j - 1] * cof[0, j - 1]))

        expansion = roots[j - 1] * (1.0 + math.fsum(
            M[i - 2] / (rates[i - 2] - roots[j - 1]) for i in range(2, size + 1)
        ))
        pairs["Rn"].append((R, expansion))

    for i in range(2, size + 1):
        beta = rates[i - 2]
        terms = [beta * cof[0, k - 1] / (beta - roots[k - 1]) for k in range(1, size + 1)]
        # alien-row expansion: the sum vanishes, so compare against the term scale
        scale = math.fsum(abs(t) for t in terms)
        pairs["cof2"].append((scale, scale + math.fsum(terms)))
        for j in range(1, size + 1):
            pairs["Cof2"].append((cof[i - 1, j - 1], M[i - 2] * cof[0, j - 1] / (beta - roots[j - 1])))

    lhs = (1.0 + math.fsum(M[i - 2] / rates[i - 2] for i in range(2, size + 1))) / R
    rhs = math.fsum(1.0 / r for r in roots) - math.fsum(1.0 / b for b in rates)
    pairs["Cof5"].append((lhs, rhs))

    report = CofactorReport(n=n)
    for name, items in pairs.items():
        if not items:
            report.absolute[name] = 0.0
            report.relative[name] = 0.0
            continue
        report.absolute[name] = max(abs(a - b) for a, b in items)
        report.relative[name] = max(_relative(a, b) for a, b in items)
    return report


def random_interlaced_instance(rng: np.random.Generator, n: int, margin: float = 0.05):
    """
    Synthetic interlaced configuration.

    Rates are sorted uniforms on (0.5, 10); one root is placed uniformly in each
    gap (0, β_1), (β_1, β_2), ..., (β_n, β_n + 5), kept `margin` of the gap
    away from either end.
    """
    rates = np.sort(rng.uniform(0.5, 10.0, size=n))
    edges = np.concatenate(([0.0], rates, [rates[-1] + 5.0 if n else 5.0]))
    lo, hi = edges[:-1], edges[1:]
    width = hi - lo
    roots = rng.uniform(lo + margin * width, hi - margin * width)
    return roots.tolist(), rates.tolist()
