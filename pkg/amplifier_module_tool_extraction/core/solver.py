"""
Optimal barrier and value-function coefficients.

The production route solves A·K = C by LU with partial pivoting; the cofactor
route K_j = ℛ·Cof_{1,j+1}/(r_j²·det A) is kept as a cross-check and both feed
the identity ledger attached to every BarrierSolution.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg

from ..exceptions import SingularMatrixError
from .cofactors import coefficient_matrix, ratio_M, ratio_R
from .model import JumpMix, ModelParams
from .roots import RootSet, solve_roots

logger = logging.getLogger(__name__)

SINGULAR_TOLERANCE = 1e-13
IDENTITY_TOLERANCE = 1e-10
TINY = 1e-300


@dataclass(frozen=True)
class BarrierSolution:
    params: ModelParams
    roots: RootSet
    bstar: float
    K: tuple[float, ...]
    Rn: float
    Mn: tuple[float, ...]
    Xi_n: tuple[float, ...]
    identity_residuals: dict[str, float] = field(default_factory=dict, compare=False, hash=False)

    @property
    def r(self) -> np.ndarray:
        return np.asarray(self.roots.pos, dtype=float)

    @property
    def k(self) -> np.ndarray:
        return np.asarray(self.K, dtype=float)

    def with_alpha(self, alpha: float) -> "BarrierSolution":
        """Same barrier and coefficients under another price impact (neither depends on α)."""
        return BarrierSolution(
            params=self.params.replace(alpha=alpha),
            roots=self.roots,
            bstar=self.bstar,
            K=self.K,
            Rn=self.Rn,
            Mn=self.Mn,
            Xi_n=self.Xi_n,
            identity_residuals=self.identity_residuals,
        )

    def violations(self, tolerance: float = IDENTITY_TOLERANCE) -> list[str]:
        """Every broken invariant of the solution (empty when all hold)."""
        problems = list(self.roots.violations(self.params))
        if not self.bstar > self.params.c:
            problems.append(f"bstar {self.bstar!r} is not above c {self.params.c!r}")
        if any(k <= 0.0 for k in self.K):
            problems.append(f"non-positive coefficient in K={list(self.K)}")
        if any(xi <= 0.0 for xi in self.Xi_n):
            problems.append(f"non-positive Xi in {list(self.Xi_n)}")
        for name, value in self.identity_residuals.items():
            if not value <= tolerance:
                problems.append(f"identity {name} residual {value!r} exceeds {tolerance}")
        return problems

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "bstar": self.bstar,
            "K": list(self.K),
            "roots": {
                "pos": list(self.roots.pos),
                "neg": list(self.roots.neg),
                "residuals": list(self.roots.residuals),
                "scale": self.roots.scale,
            },
            "Rn": self.Rn,
            "Mn": list(self.Mn),
            "Xi": list(self.Xi_n),
            "identity_residuals": dict(self.identity_residuals),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BarrierSolution":
        """Rebuild a serialized solution without re-solving."""
        params = ModelParams.from_dict(data["params"])
        roots = data["roots"]
        return cls(
            params=params,
            roots=RootSet(
                pos=tuple(float(r) for r in roots["pos"]),
                neg=tuple(float(r) for r in roots["neg"]),
                residuals=tuple(float(r) for r in roots.get("residuals", ())),
                scale=float(roots.get("scale", 1.0)),
            ),
            bstar=float(data["bstar"]),
            K=tuple(float(k) for k in data["K"]),
            Rn=float(data["Rn"]),
            Mn=tuple(float(m) for m in data.get("Mn", ())),
            Xi_n=tuple(float(x) for x in data.get("Xi", ())),
            identity_residuals=dict(data.get("identity_residuals", {})),
        )


def compute_bstar(roots: RootSet, mix_p: JumpMix, c: float) -> float:
    """b* = c + Σ 1/r_j − Σ 1/β^p_i."""
    return c + math.fsum(1.0 / r for r in roots.pos) - math.fsum(1.0 / b for b in mix_p.rates)


def build_matrix_A(roots: RootSet, mix_p: JumpMix) -> np.ndarray:
    """Row of ones, then β_i/(β_i − r_j) for each positive-jump rate."""
    return coefficient_matrix(roots.pos, mix_p.rates)


def _check_singular(det: float, A: np.ndarray) -> None:
    norm = float(np.linalg.norm(A))
    if not abs(det) >= SINGULAR_TOLERANCE * norm:
        raise SingularMatrixError(det, norm)


def compute_K_cofactor(roots: RootSet, mix_p: JumpMix) -> np.ndarray:
    """K_j = ℛ·Cof_{1,j+1}/(r_j²·det A)."""
    A = build_matrix_A(roots, mix_p)
    det = float(np.linalg.det(A))
    _check_singular(det, A)
    size = A.shape[0]
    r = np.asarray(roots.pos)
    R = ratio_R(roots.pos, mix_p.rates)
    cof = np.empty(size)
    for j in range(size):
        minor = np.delete(A[1:, :], j, axis=1)
        cof[j] = (-1.0) ** j * (float(np.linalg.det(minor)) if minor.size else 1.0)
    return R * cof / (r ** 2 * det)


def compute_K_linear(roots: RootSet, bstar: float, c: float, mix_p: JumpMix) -> np.ndarray:
    """Solve A·K = (b*−c, b*−c+1/β_1, ..., b*−c+1/β_{m_p})."""
    A = build_matrix_A(roots, mix_p)
    lu, piv = scipy.linalg.lu_factor(A)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    det = float(np.prod(np.diag(lu))) * (-1.0) ** swaps
    _check_singular(det, A)
    rhs = np.full(A.shape[0], bstar - c)
    rhs[1:] += 1.0 / np.asarray(mix_p.rates)
    return scipy.linalg.lu_solve((lu, piv), rhs)


def compute_xi(params: ModelParams, roots: RootSet, K: np.ndarray, bstar: float) -> np.ndarray:
    """Ξ^n_k = Σ_j K_j β^n_k/(β^n_k + r_j) − (b*−c) + 1/β^n_k."""
    r = np.asarray(roots.pos)
    return np.array([
        math.fsum(K * b / (b + r)) - (bstar - params.c) + 1.0 / b
        for b in params.mix_n.rates
    ])


def compute_xi_alternative(params: ModelParams, roots: RootSet, K: np.ndarray) -> np.ndarray:
    """Ξ^n_k = Σ_j K_j r_j²/(β^n_k(β^n_k + r_j))."""
    r = np.asarray(roots.pos)
    return np.array([math.fsum(K * r ** 2 / (b * (b + r))) for b in params.mix_n.rates])


def bstar_from_cofactors(roots: RootSet, mix_p: JumpMix, c: float) -> float:
    """b* = c + (1/ℛ)[1 + Σ ℳ_i/β_i]."""
    R = ratio_R(roots.pos, mix_p.rates)
    M = ratio_M(roots.pos, mix_p.rates)
    return c + (1.0 + math.fsum(m / b for m, b in zip(M, mix_p.rates))) / R


def _balance(terms) -> float:
    """Relative residual of an identity written as Σ terms = 0."""
    terms = [float(t) for t in terms]
    return abs(math.fsum(terms)) / (math.fsum(abs(t) for t in terms) + TINY)


def identity_residuals(
    params: ModelParams,
    roots: RootSet,
    bstar: float,
    K: np.ndarray,
    K_cofactor: np.ndarray | None = None,
) -> dict[str, float]:
    """
    Relative residual of every identity the coefficients must satisfy.

    Each identity is rearranged as a sum of terms equal to zero and measured
    against the sum of the absolute terms.
    """
    r = np.asarray(roots.pos)
    K = np.asarray(K)
    excess = bstar - params.c
    R = ratio_R(roots.pos, params.mix_p.rates)
    wp, bp = params.mix_p.weights, params.mix_p.rates
    wn, bn = params.mix_n.weights, params.mix_n.rates
    ledger: dict[str, float] = {}

    ledger["cond1K"] = _balance([*K, -excess])
    ledger["cond2K"] = _balance([*(r * K), -1.0])
    ledger["cond3K"] = max(
        (_balance([*(b * K / (b - r)), -excess, -1.0 / b]) for b in bp), default=0.0
    )
    ledger["r2K"] = _balance([*(r ** 2 * K), -R])

    equ1 = [
        0.5 * params.sigma ** 2 * R,
        params.mu,
        -(params.rho + params.lambda_n) * excess,
        *(params.lambda_p * w / b for w, b in zip(wp, bp)),
    ]
    for w, b in zip(wn, bn):
        equ1.extend(params.lambda_n * w * b * K / (b + r))
    ledger["equ1"] = _balance(equ1)

    equ2 = [0.5 * params.sigma ** 2, *(-params.rho * K / r), params.mu * excess]
    for w, b in zip(wn, bn):
        equ2.extend(-params.lambda_n * w * K / (b + r))
    for w, b in zip(wp, bp):
        equ2.extend(params.lambda_p * w * K / (b - r))
    ledger["equ2"] = _balance(equ2)

    ledger["equ3"] = max(
        (
            _balance([*(K * b / (b + r)), -excess, 1.0 / b, *(-K * r ** 2 / (b * (b + r)))])
            for b in bn
        ),
        default=0.0,
    )

    if K_cofactor is not None:
        ledger["K_routes"] = float(np.max(np.abs(K_cofactor - K) / (np.abs(K) + TINY)))
    alt = bstar_from_cofactors(roots, params.mix_p, params.c)
    ledger["bstar_routes"] = abs(alt - bstar) / (abs(bstar) + TINY)
    return ledger


def solve(params: ModelParams) -> BarrierSolution:
    """
    Compute b*, K and the derived quantities for validated params.

    Raises:
        BracketFailureError: root isolation failed
        SingularMatrixError: coefficient matrix numerically singular
    """
    roots = solve_roots(params)
    bstar = compute_bstar(roots, params.mix_p, params.c)
    K = compute_K_linear(roots, bstar, params.c, params.mix_p)
    K_cofactor = compute_K_cofactor(roots, params.mix_p)
    Rn = ratio_R(roots.pos, params.mix_p.rates)
    Mn = ratio_M(roots.pos, params.mix_p.rates)
    Xi = compute_xi(params, roots, K, bstar)

    solution = BarrierSolution(
        params=params,
        roots=roots,
        bstar=bstar,
        K=tuple(float(k) for k in K),
        Rn=Rn,
        Mn=tuple(float(m) for m in Mn),
        Xi_n=tuple(float(x) for x in Xi),
        identity_residuals=identity_residuals(params, roots, bstar, K, K_cofactor),
    )
    problems = solution.violations()
    if problems:
        logger.warning(f"Solution invariants violated: {problems}")
    logger.info(f"Solved barrier bstar={bstar!r} with {len(K)} coefficients")
    return solution
