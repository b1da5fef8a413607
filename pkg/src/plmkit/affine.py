"""Classical affine gauge of the surface/conormal correspondence.

Fixing the last homogeneous component of the surface at -1 reduces the
projective relations to the classical Lelieuvre system for the affine
position bf and conormal bnu in R^3:

    bf_x = bnu x bnu_x,    bf_y = -(bnu x bnu_y),

whose closure condition is bnu_xy parallel to bnu.  The module integrates
this system over a sampled grid, lifts affine pairs back to homogeneous
coordinates, and computes the affine invariant forms (the Blaschke
coefficient F and the two cubic coefficients) together with every
cross-identity tying them to the dual surface.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ChartMismatchError, ClosureError, DomainError
from .fields import FieldGrid, jet_grid
from .multilinear import det_n, pair
from .report import InvariantReport

__all__ = [
    "AffineSurfacePair",
    "AffineForms",
    "classical_lelieuvre_integrate",
    "closure_residual",
    "lift_affine",
    "affine_forms",
]


@dataclass(frozen=True)
class AffineSurfacePair:
    """Affine position field bf and affine conormal field bnu (both d=3)."""

    f: FieldGrid
    nu: FieldGrid

    def __post_init__(self):
        if self.f.ncomp != 3 or self.nu.ncomp != 3:
            raise DomainError("affine pair needs 3-component fields")
        if self.f.dims != self.nu.dims:
            raise DomainError(f"grid mismatch: {self.f.dims} vs {self.nu.dims}")
        if self.f.origin != self.nu.origin or self.f.spacing != self.nu.spacing:
            raise DomainError("affine pair must share origin and spacing")


@dataclass
class AffineForms:
    """Blaschke coefficient and the two affine cubic coefficients."""

    F: np.ndarray
    A_cubic: np.ndarray
    B_cubic: np.ndarray


def _norm(a):
    return np.sqrt((np.asarray(a, dtype=float) ** 2).sum(axis=-1))


def closure_residual(nu: FieldGrid, stencil: int = 2):
    """Pointwise defect of bnu_xy from the bnu direction (interior only).

    The integrability condition of the affine Lelieuvre system is
    bnu_xy = U4 bnu with scalar U4; the residual is the relative norm of
    the component of bnu_xy orthogonal to bnu.
    """
    jg = jet_grid(nu, order=2, stencil=stencil)
    v = jg.value
    vv = np.maximum((v * v).sum(axis=-1), 1e-300)
    u4 = (jg.d_xy * v).sum(axis=-1) / vv
    defect = jg.d_xy - u4[..., None] * v
    scale = np.maximum(_norm(jg.d_xy), 1e-12 * np.sqrt(vv))
    return _norm(defect) / scale, u4


def classical_lelieuvre_integrate(nu: FieldGrid, f0, sigma: int = 1, closure_tol: float = 1e-8, stencil: int = 2) -> FieldGrid:
    """Integrate bf_x = bnu x bnu_x, bf_y = -(bnu x bnu_y) from a corner.

    Edge increments use the symmetric product nu(p) x nu(q) of adjacent
    samples, which equals the trapezoid rule for this system because
    nu x nu = 0; accumulation follows the canonical path (x first, then
    y).  The closure condition bnu_xy parallel to bnu is checked first and
    a violation reports the worst interior cell.
    """
    if sigma != 1:
        raise DomainError("only the indefinite-metric branch (sigma = 1) is implemented")
    if nu.ncomp != 3:
        raise DomainError("classical integration needs a 3-component conormal")
    res, _ = closure_residual(nu, stencil=stencil)
    if res.size and np.max(res) > closure_tol:
        k = np.unravel_index(int(np.argmax(res)), res.shape)
        raise ClosureError(
            f"closure condition violated (residual {float(np.max(res)):.3e}) near interior cell {tuple(int(i) for i in k)}",
            site=tuple(int(i) for i in k),
        )
    v = nu.values
    d1 = np.cross(v[:-1, :], v[1:, :])
    d2 = -np.cross(v[:, :-1], v[:, 1:])
    nx, ny = nu.dims
    f = np.empty((nx, ny, 3))
    f[0, 0] = np.asarray(f0, dtype=float)
    f[1:, 0] = f[0, 0] + np.cumsum(d1[:, 0], axis=0)
    f[:, 1:] = f[:, :1] + np.cumsum(d2, axis=1)
    return FieldGrid(origin=nu.origin, spacing=nu.spacing, values=f)


def lift_affine(pairg: AffineSurfacePair):
    """Homogeneous lift: f = (bf, -1), nu = (bnu, <bf, bnu>).

    The lifted pair satisfies the full projective relations, so every
    homogeneous-coordinate report applies to it downstream.
    """
    bf, bn = pairg.f.values, pairg.nu.values
    f4 = np.concatenate([bf, -np.ones(bf.shape[:2] + (1,))], axis=-1)
    nu4 = np.concatenate([bn, (bf * bn).sum(axis=-1)[..., None]], axis=-1)
    mk = lambda vals: FieldGrid(origin=pairg.f.origin, spacing=pairg.f.spacing, values=vals)
    return mk(f4), mk(nu4)


def affine_forms(pairg: AffineSurfacePair, stencil: int = 2, tol: float = 1e-8, sign_tol: float = 1e-10):
    """Affine form coefficients plus the report of their identities.

    F = det|bnu, bnu_x, bnu_y|, A_cubic = det|bnu, bnu_x, bnu_xx|,
    B_cubic = det|bnu, bnu_y, bnu_yy| (no radicals are needed on the
    conormal side).  The report checks the pairing expressions of F and
    the cubics on the dual surface, the squared-determinant relations on
    the surface side (their radicand signs are fixed; the wrong sign
    means the data is not in this chart), and the lifted determinant
    factorization det|nu, nu_x, nu_y, nu_xy| = F^2.
    """
    order = 3 if min(pairg.f.dims) >= (5 if stencil == 2 else 7) else 2
    fj = jet_grid(pairg.f, order=order, stencil=stencil)
    nj = jet_grid(pairg.nu, order=order, stencil=stencil)
    F = np.asarray(det_n([nj.value, nj.d_x, nj.d_y]), dtype=float)
    A = np.asarray(det_n([nj.value, nj.d_x, nj.d_xx]), dtype=float)
    B = np.asarray(det_n([nj.value, nj.d_y, nj.d_yy]), dtype=float)
    rep = InvariantReport(metadata={"stencil": stencil, "jet_order": order})

    def scaled(name, lhs, rhs, scale):
        denom = np.maximum(scale, 1e-300)
        rep.add(name, (lhs - rhs) / denom, tol)

    scaled("blaschke_pairing", pair(fj.d_x, nj.d_y), F, _norm(fj.d_x) * _norm(nj.d_y) + np.abs(F))
    scaled("cubic_pairing_x", pair(fj.d_xx, nj.d_x), A, _norm(fj.d_xx) * _norm(nj.d_x) + np.abs(A))
    scaled("cubic_pairing_y", pair(fj.d_yy, nj.d_y), -B, _norm(fj.d_yy) * _norm(nj.d_y) + np.abs(B))
    dfmix = np.asarray(det_n([fj.d_x, fj.d_y, fj.d_xy]), dtype=float)
    scaled("blaschke_squared", dfmix, F**2, np.abs(dfmix) + F**2 + 1e-12)
    if order >= 3:
        dfx = np.asarray(det_n([fj.d_x, fj.d_xx, fj.d_xxx]), dtype=float)
        dfy = np.asarray(det_n([fj.d_y, fj.d_yy, fj.d_yyy]), dtype=float)
        scale_x = _norm(fj.d_x) * _norm(fj.d_xx) * _norm(fj.d_xxx)
        scale_y = _norm(fj.d_y) * _norm(fj.d_yy) * _norm(fj.d_yyy)
        if np.any(dfx < -sign_tol * np.maximum(scale_x, 1e-300)):
            raise ChartMismatchError("det|bf_x, bf_xx, bf_xxx| < 0: wrong-sign radicand for the x cubic")
        if np.any(dfy > sign_tol * np.maximum(scale_y, 1e-300)):
            raise ChartMismatchError("det|bf_y, bf_yy, bf_yyy| > 0: wrong-sign radicand for the y cubic")
        scaled("cubic_squared_x", dfx, A**2, np.abs(dfx) + A**2 + 1e-12)
        scaled("cubic_squared_y", dfy, -(B**2), np.abs(dfy) + B**2 + 1e-12)
    # lifted factorization: the homogeneous mixed determinant is F^2
    f4, nu4 = lift_affine(pairg)
    n4j = jet_grid(nu4, order=2, stencil=stencil)
    d4 = np.asarray(det_n([n4j.value, n4j.d_x, n4j.d_y, n4j.d_xy]), dtype=float)
    # the lifted jets cover the same interior as the order-2 window; crop F
    Fw = F if d4.shape == F.shape else _crop_to(F, d4.shape)
    scaled("lift_mixed_det_is_F_squared", d4, Fw**2, np.abs(d4) + Fw**2 + 1e-12)
    return AffineForms(F=F, A_cubic=A, B_cubic=B), rep


def _crop_to(arr, shape):
    m0 = (arr.shape[0] - shape[0]) // 2
    m1 = (arr.shape[1] - shape[1]) // 2
    return arr[m0 : m0 + shape[0], m1 : m1 + shape[1]]
