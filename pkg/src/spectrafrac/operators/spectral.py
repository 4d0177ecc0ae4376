"""
Spectral measures, Green's functions and truncation scans for spectrafrac
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import Field, model_validator
from scipy.linalg import LinAlgError, eigh_tridiagonal

from ..dims.measures import DiscreteMeasure, RestrictionSet, levy_distance, restrict
from ..exceptions import DomainError, InvariantError, NumericError
from ..utils.io import PathLike, write_json
from .potentials import FrozenModel, JacobiTruncation, PotentialSpec, build_truncation

logger = logging.getLogger(__name__)

RESIDUAL_FACTOR = 1e-10
WEIGHT_FLOOR = 1e-16
MASS_TOLERANCE = 1e-9
SUPPORT_TOLERANCE = 1e-9
MIN_ETA = 1e-12
METHOD = "eigh_tridiagonal"

PsiChoice = Union[Literal["delta0", "delta1"], List[float]]


class SpectralRequest(FrozenModel):
    """Truncation size, potential and the vector whose spectral measure is wanted"""
    spec: PotentialSpec
    N: int = Field(ge=2)
    psi: PsiChoice = "delta0"

    @model_validator(mode="after")
    def _explicit_fits(self) -> "SpectralRequest":
        if isinstance(self.psi, list):
            if len(self.psi) != self.N:
                raise ValueError(f"explicit psi needs {self.N} entries (one per window site), got {len(self.psi)}")
            if not np.any(np.asarray(self.psi, dtype=float) != 0):
                raise ValueError("explicit psi must be nonzero")
        return self

    @property
    def psi_label(self) -> str:
        return self.psi if isinstance(self.psi, str) else "explicit"

    def vector(self, truncation: JacobiTruncation) -> np.ndarray:
        """psi in window coordinates, normalized."""
        if self.psi == "delta0":
            v = np.zeros(truncation.N)
            v[truncation.row_of(0)] = 1.0
            return v
        if self.psi == "delta1":
            v = np.zeros(truncation.N)
            v[truncation.row_of(1)] = 1.0
            return v
        v = np.asarray(self.psi, dtype=float)
        return v / np.linalg.norm(v)


@dataclass(frozen=True, eq=False)
class Eigensystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    residual_max: float

    def pairs(self) -> List[Tuple[float, np.ndarray]]:
        return [(float(lam), self.eigenvectors[:, k]) for k, lam in enumerate(self.eigenvalues)]


def _failed_index(error: LinAlgError) -> Optional[int]:
    match = re.search(r"(-?\d+)", str(error))
    return int(match.group(1)) if match else None


def tridiag_eigen(m: JacobiTruncation) -> Eigensystem:
    """Full eigendecomposition with a residual check ||T v - lambda v|| <= 1e-10 ||T||."""
    try:
        eigenvalues, eigenvectors = eigh_tridiagonal(m.diagonal, m.off_diagonal)
    except LinAlgError as e:
        raise NumericError(f"tridiagonal eigensolver failed: {e}", index=_failed_index(e)) from e
    residuals = np.linalg.norm(m.matvec(eigenvectors) - eigenvectors * eigenvalues, axis=0)
    norm_bound = float(np.max(np.abs(m.diagonal))) + 2.0
    worst = int(np.argmax(residuals))
    if residuals[worst] > RESIDUAL_FACTOR * norm_bound:
        raise NumericError(f"eigenpair residual {residuals[worst]:.3e} exceeds tolerance", index=worst)
    low, high = float(np.min(m.diagonal)) - 2.0, float(np.max(m.diagonal)) + 2.0
    slack = SUPPORT_TOLERANCE * norm_bound
    if eigenvalues[0] < low - slack or eigenvalues[-1] > high + slack:
        raise InvariantError(f"eigenvalues [{eigenvalues[0]}, {eigenvalues[-1]}] leave the Gershgorin interval")
    return Eigensystem(eigenvalues=eigenvalues, eigenvectors=eigenvectors, residual_max=float(residuals[worst]))


@dataclass(frozen=True)
class SpectralResult:
    """Spectral measure of a truncation: atoms at eigenvalues, weights |<psi, v_k>|^2"""
    measure: DiscreteMeasure
    N: int
    method: str
    residual_max: float
    dropped_mass: float
    psi: str
    spec_hash: str
    bound: float

    def metadata(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "method": self.method,
            "residual_max": self.residual_max,
            "dropped_mass": self.dropped_mass,
            "psi": self.psi,
            "spec_hash": self.spec_hash,
            "bound": self.bound,
            "atoms": self.measure.size,
            "total_mass": self.measure.total_mass,
        }

    def restrict(self, region: RestrictionSet) -> DiscreteMeasure:
        """mu^T_{psi;F}."""
        return restrict(self.measure, region)

    def save(self, stem: PathLike) -> Tuple[Path, Path]:
        """Write `<stem>.csv` (atoms) and `<stem>.json` (metadata sidecar)."""
        stem = Path(stem)
        csv_path = self.measure.save_csv(stem.with_suffix(".csv"))
        json_path = write_json(stem.with_suffix(".json"), self.metadata())
        return csv_path, json_path


def spectral_measure(req: SpectralRequest) -> SpectralResult:
    truncation = build_truncation(req.spec, req.N)
    eig = tridiag_eigen(truncation)
    psi = req.vector(truncation)
    weights = (eig.eigenvectors.T @ psi) ** 2
    keep = weights >= WEIGHT_FLOOR
    dropped = float(np.sum(weights[~keep]))
    if dropped > 0:
        logger.debug(f"Dropped {int(np.sum(~keep))} atoms below {WEIGHT_FLOOR:g} carrying {dropped:.3e}")
    measure = DiscreteMeasure.from_atoms(eig.eigenvalues[keep], weights[keep])
    if abs(measure.total_mass + dropped - 1.0) > MASS_TOLERANCE:
        raise InvariantError(f"spectral mass {measure.total_mass + dropped} differs from one")
    r = truncation.bound
    if measure.size and (measure.positions[0] < -2.0 - r - SUPPORT_TOLERANCE or measure.positions[-1] > 2.0 + r + SUPPORT_TOLERANCE):
        raise InvariantError(f"atoms leave [-2 - r, 2 + r] with r = {r}")
    return SpectralResult(
        measure=measure,
        N=req.N,
        method=METHOD,
        residual_max=eig.residual_max,
        dropped_mass=dropped,
        psi=req.psi_label,
        spec_hash=truncation.spec_hash,
        bound=r,
    )


def _half_line_tail(diagonal: np.ndarray, z: np.ndarray) -> np.ndarray:
    """g_n = 1 / (V_n - z - g_{n+1}) run from the far end inward; returns g at the first site."""
    g = np.zeros_like(z)
    for v in diagonal[::-1]:
        g = 1.0 / (v - z - g)
    return g


def green_density(spec: PotentialSpec, N: int, x: Union[float, np.ndarray], eta: float) -> Union[float, np.ndarray]:
    """Im <delta_0, (T - x - i eta)^-1 delta_0> / pi on the N-site truncation.

    Two-sided continued fraction around site 0, vectorized over x.
    """
    if not eta >= MIN_ETA:
        raise DomainError(f"eta must be at least {MIN_ETA:g}, got {eta!r}")
    truncation = build_truncation(spec, N)
    d = truncation.diagonal
    o = truncation.origin
    z = np.asarray(x, dtype=float) + 1j * eta
    right = _half_line_tail(d[o + 1:], z) if o + 1 < N else np.zeros_like(z)
    left = _half_line_tail(d[:o][::-1], z) if o > 0 else np.zeros_like(z)
    g00 = 1.0 / (d[o] - z - right - left)
    density = g00.imag / np.pi
    return float(density) if np.ndim(density) == 0 else density


def spectrum_support(spec: PotentialSpec, N: int) -> Tuple[float, float]:
    truncation = build_truncation(spec, N)
    try:
        eigenvalues = eigh_tridiagonal(truncation.diagonal, truncation.off_diagonal, eigvals_only=True)
    except LinAlgError as e:
        raise NumericError(f"tridiagonal eigensolver failed: {e}", index=_failed_index(e)) from e
    return float(eigenvalues[0]), float(eigenvalues[-1])


def resolvent_convergence_scan(
    spec: PotentialSpec, sizes: Sequence[int], psi: PsiChoice = "delta0"
) -> List[Tuple[int, float]]:
    """Levy distance of each truncation's spectral measure to the one at the largest size."""
    sizes = [int(n) for n in sizes]
    if len(sizes) < 2:
        raise DomainError("a convergence scan needs at least two sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise DomainError("scan sizes must be strictly increasing")
    measures = [spectral_measure(SpectralRequest(spec=spec, N=n, psi=psi)).measure for n in sizes]
    finest = measures[-1]
    rows = [(n, levy_distance(mu, finest)) for n, mu in zip(sizes, measures)]
    for n, dist in rows:
        logger.info(f"N={n}: Levy distance to N={sizes[-1]} is {dist:.3e}")
    return rows


def cyclic_coverage(spec: PotentialSpec, N: int) -> float:
    """min over k of |v_k(0)|^2 + |v_k(1)|^2: how well delta_0 and delta_1 jointly see every eigenvalue."""
    truncation = build_truncation(spec, N)
    eig = tridiag_eigen(truncation)
    rows = [truncation.row_of(0), truncation.row_of(1)]
    return float(np.min(np.sum(eig.eigenvectors[rows, :] ** 2, axis=0)))
