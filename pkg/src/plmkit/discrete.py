"""Surface/conormal correspondence on the integer lattice and its affine gauge.

The defining relations couple a projective lattice surface f and its
conormal nu through shifts instead of derivatives:

    f ^ T1 f = *(nu ^ T1 nu),    f ^ T2 f = -*(nu ^ T2 nu).

In the affine gauge (last component of f frozen at -1) these become the
difference form of the classical Lelieuvre formula,

    bf1 - bf = bnu x T1 bnu,     bf2 - bf = -(bnu x T2 bnu),

whose closure condition is the Moutard equation
nu12 + nu = H (nu1 + nu2).  The module evolves Moutard data, integrates
the affine difference system, lifts to homogeneous coordinates, recovers
the projective normalization by a scale recursion, and reports every
lattice identity as a residual.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BoundaryError,
    ClosureError,
    DegeneratePointError,
    DomainError,
    EvolutionOverflowError,
    GaugeObstructionError,
    NotCompatibleError,
)
from .fields import LatticeField
from .multilinear import cross_n, det_n, hodge_star, pair, wedge2
from .report import InvariantReport

__all__ = [
    "MoutardCoeff",
    "DiscreteSurfacePair",
    "DiscreteForms",
    "DiscreteCompat",
    "moutard_evolve",
    "moutard_residual",
    "discrete_affine_integrate",
    "lift_to_projective",
    "discrete_direction",
    "discrete_scale_propagate",
    "discrete_residual",
    "discrete_det_invariance",
    "discrete_forms",
    "discrete_compat_coeffs",
    "affine_sphere_check",
]


@dataclass(frozen=True)
class MoutardCoeff:
    """Plaquette coefficient H of nu12 + nu = H (nu1 + nu2)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if not np.all(np.isfinite(v)):
            raise DomainError("Moutard coefficient contains non-finite entries")

    def at(self, n1, n2):
        if self.values.ndim == 0:
            return float(self.values)
        return float(self.values[n1, n2])


@dataclass(frozen=True)
class DiscreteSurfacePair:
    """A lattice surface together with its conormal lattice.

    gauge 'affine': 3-component fields with f4 = -1 semantics;
    gauge 'projective': 4-component homogeneous fields, <f, nu> = 0.
    """

    nu: LatticeField
    f: LatticeField
    gauge: str

    def __post_init__(self):
        if self.gauge not in ("affine", "projective"):
            raise DomainError("gauge must be 'affine' or 'projective'")
        want = 3 if self.gauge == "affine" else 4
        if self.nu.ncomp != want or self.f.ncomp != want:
            raise DomainError(f"{self.gauge} gauge needs {want}-component fields")
        if self.nu.extent != self.f.extent:
            raise DomainError(f"extent mismatch: {self.nu.extent} vs {self.f.extent}")

    @property
    def extent(self):
        return self.nu.extent


@dataclass
class DiscreteForms:
    """Lattice analogs of the quadratic/cubic invariant forms.

    The Omega fields come from the affine gauge pairings; the F fields are
    sqrt|det| of the homogeneous four-point determinants, with the sign of
    each determinant reported separately.
    """

    Omega2: Optional[np.ndarray]
    Omega3: Optional[np.ndarray]
    Omega3tilde: Optional[np.ndarray]
    F2d: np.ndarray
    F3d: np.ndarray
    F3dtilde: np.ndarray
    F2d_sign: np.ndarray
    F3d_sign: np.ndarray
    F3dtilde_sign: np.ndarray


@dataclass
class DiscreteCompat:
    """Per-site coefficients of the lattice compatibility system.

    nu11 = A1 nu12 + B1 nu1 + C1 nu  and  nu22 = A2 nu12 + B2 nu2 + C2 nu.
    The *_pairing_residual fields compare A and C against their pairing
    expressions on the dual surface when it is supplied.
    """

    A1: np.ndarray
    B1: np.ndarray
    C1: np.ndarray
    A2: np.ndarray
    B2: np.ndarray
    C2: np.ndarray
    a1_pairing_residual: Optional[np.ndarray] = None
    c1_pairing_residual: Optional[np.ndarray] = None
    a2_pairing_residual: Optional[np.ndarray] = None
    c2_pairing_residual: Optional[np.ndarray] = None


def _norm(a):
    return np.sqrt((np.asarray(a, dtype=float) ** 2).sum(axis=-1))


def _fro(B):
    return np.sqrt((np.asarray(B, dtype=float) ** 2).sum(axis=(-2, -1)))


def moutard_evolve(initial_row, initial_col, H) -> LatticeField:
    """Fill the rectangle from two boundary strips by the Moutard rule.

    initial_row is nu(n1, 0) for n1 = 0..M1-1, initial_col is nu(0, n2)
    for n2 = 0..M2-1 (they must share the corner value); the interior is
    nu(n1+1, n2+1) = H (nu(n1+1, n2) + nu(n1, n2+1)) - nu(n1, n2).
    """
    row = np.asarray(initial_row, dtype=float)
    col = np.asarray(initial_col, dtype=float)
    if row.ndim != 2 or col.ndim != 2 or row.shape[1] != col.shape[1]:
        raise DomainError("initial strips must be (M, d) arrays with equal d")
    if np.max(np.abs(row[0] - col[0])) > 1e-12 * max(np.max(np.abs(row[0])), 1e-300):
        raise DomainError("initial strips disagree at the shared corner")
    if not isinstance(H, MoutardCoeff):
        H = MoutardCoeff(np.asarray(H, dtype=float))
    m1, m2 = row.shape[0], col.shape[0]
    v = np.empty((m1, m2, row.shape[1]))
    v[:, 0] = row
    v[0, :] = col
    with np.errstate(over="ignore", invalid="ignore"):
        for n2 in range(m2 - 1):
            for n1 in range(m1 - 1):
                h = H.at(n1, n2)
                v[n1 + 1, n2 + 1] = h * (v[n1 + 1, n2] + v[n1, n2 + 1]) - v[n1, n2]
                if not np.all(np.isfinite(v[n1 + 1, n2 + 1])):
                    raise EvolutionOverflowError(
                        f"non-finite value at site ({n1 + 1}, {n2 + 1})", site=(n1 + 1, n2 + 1)
                    )
    return LatticeField(values=v)


def moutard_residual(nu: LatticeField):
    """Relative size of the defect of nu12 + nu from the nu1 + nu2 line.

    Vanishes exactly when some plaquette coefficient H exists; this is the
    closure condition of the affine difference system.
    """
    v = nu.values
    a = v[1:, 1:] + v[:-1, :-1]
    b = v[1:, :-1] + v[:-1, 1:]
    bb = np.maximum((b * b).sum(axis=-1), 1e-300)
    proj = (a * b).sum(axis=-1) / bb
    defect = a - proj[..., None] * b
    return _norm(defect) / np.maximum(_norm(a), 1e-300)


def discrete_affine_integrate(nu: LatticeField, f0, tol: float = 1e-10) -> LatticeField:
    """Integrate the affine difference system from the corner value f0.

    Increments are D1 = bnu x T1 bnu along axis 1 and D2 = -(bnu x T2 bnu)
    along axis 2, accumulated along the canonical path (axis 1 first).
    Requires the Moutard closure condition; when it fails the plaquette
    sums depend on the path and the worst cell is reported.
    """
    if nu.ncomp != 3:
        raise DomainError("affine integration needs a 3-component conormal")
    res = moutard_residual(nu)
    if res.size and np.max(res) > tol:
        site = np.unravel_index(int(np.argmax(res)), res.shape)
        raise ClosureError(
            f"Moutard closure violated (residual {float(np.max(res)):.3e}) at plaquette {tuple(int(s) for s in site)}",
            site=tuple(int(s) for s in site),
        )
    v = nu.values
    d1 = np.cross(v[:-1, :], v[1:, :])  # (M1-1, M2, 3)
    d2 = -np.cross(v[:, :-1], v[:, 1:])  # (M1, M2-1, 3)
    m1, m2 = nu.extent
    f = np.empty((m1, m2, 3))
    f[0, 0] = np.asarray(f0, dtype=float)
    f[1:, 0] = f[0, 0] + np.cumsum(d1[:, 0], axis=0)
    f[:, 1:] = f[:, :1] + np.cumsum(d2, axis=1)
    return LatticeField(values=f, base=nu.base)


def lift_to_projective(pairn: DiscreteSurfacePair) -> DiscreteSurfacePair:
    """Homogeneous lift of an affine pair: f = (bf, -1), nu = (bnu, <bf, bnu>)."""
    if pairn.gauge != "affine":
        raise DomainError("lift_to_projective expects an affine pair")
    bf, bn = pairn.f.values, pairn.nu.values
    f4 = np.concatenate([bf, -np.ones(bf.shape[:2] + (1,))], axis=-1)
    nu4 = np.concatenate([bn, (bf * bn).sum(axis=-1)[..., None]], axis=-1)
    return DiscreteSurfacePair(
        nu=LatticeField(values=nu4, base=pairn.nu.base),
        f=LatticeField(values=f4, base=pairn.f.base),
        gauge="projective",
    )


def discrete_direction(nu: LatticeField, site, eps_deg: float = 1e-10):
    """The surface point at a site, up to scale: [nu, T1 nu, T2 nu]."""
    if nu.ncomp != 4:
        raise DomainError("discrete_direction needs a 4-component conormal")
    n1, n2 = site
    m1, m2 = nu.extent
    if not (0 <= n1 < m1 - 1 and 0 <= n2 < m2 - 1):
        raise BoundaryError(f"site {site} lacks forward neighbors in extent {nu.extent}")
    a = nu.values[n1, n2]
    b = nu.values[n1 + 1, n2]
    c = nu.values[n1, n2 + 1]
    m = cross_n([a, b, c])
    scale = float(_norm(a) * _norm(b) * _norm(c))
    if float(_norm(m)) <= eps_deg * max(scale, 1e-300):
        raise DegeneratePointError(f"degenerate conormal triple at site {site}")
    return m


def _span_residual(basis, rhs):
    """Relative distance of rhs from the pointwise span of the basis."""
    M = np.stack(np.broadcast_arrays(*basis), axis=-1)
    G = np.swapaxes(M, -1, -2) @ M
    detG = np.linalg.det(G)
    scale2 = np.ones(np.asarray(detG).shape)
    for v in basis:
        scale2 = scale2 * (np.asarray(v, dtype=float) ** 2).sum(axis=-1)
    if np.any(detG <= 1e-24 * np.maximum(scale2, 1e-300)):
        raise DegeneratePointError("rank-deficient basis in lattice span test")
    b = np.swapaxes(M, -1, -2) @ rhs[..., :, None]
    coeff = np.linalg.solve(G, b)
    recon = (M @ coeff)[..., 0]
    basis_norm = np.sqrt(np.maximum(scale2, 1e-300)) ** (1.0 / len(basis))
    resid = _norm(rhs - recon) / np.maximum(_norm(rhs), 1e-12 * basis_norm)
    return coeff[..., 0], resid


def discrete_scale_propagate(nu: LatticeField, s0: float, span_tol: float = 1e-8, tol: float = 1e-8) -> LatticeField:
    """Normalized surface lattice f = [nu, T1 nu, T2 nu] / s.

    The scalar s = <T1 f, T2 nu> obeys the two-step recursions

        s(n) s(n + e1) =  det|nu2, nu1, nu11, nu12|(n),
        s(n) s(n + e2) = -det|nu1, nu2, nu22, nu12|(n),

    which follow from the shifted pairing laws of the defining system.
    s is propagated along the first column and then along rows; the
    unused recursion is re-checked on the result and any disagreement is
    a gauge obstruction.  The conormal must pass the compatibility span
    test first (incompatible data admits no normalization at all).
    """
    if nu.ncomp != 4:
        raise DomainError("scale propagation needs a 4-component conormal")
    if s0 == 0:
        raise DomainError("s0 must be nonzero")
    v = nu.values
    m1, m2 = nu.extent
    if m1 < 3 or m2 < 3:
        raise BoundaryError("scale propagation needs at least a 3x3 lattice")
    # compatibility: nu11 in span{nu12, nu1, nu} and nu22 in span{nu12, nu2, nu}
    _, r1 = _span_residual([v[1:-1, 1:], v[1:-1, :-1], v[:-2, :-1]], v[2:, :-1])
    _, r2 = _span_residual([v[1:, 1:-1], v[:-1, 1:-1], v[:-1, :-2]], v[:-1, 2:])
    worst = max(np.max(r1, initial=0.0), np.max(r2, initial=0.0))
    if worst > span_tol:
        raise NotCompatibleError(f"conormal fails the lattice compatibility span test (residual {worst:.3e})")
    w1, w2 = m1 - 1, m2 - 1
    mvec = cross_n([v[:-1, :-1], v[1:, :-1], v[:-1, 1:]])  # (w1, w2, 4)
    # row recursion dets at (n1, n2); the nu11 column needs n1+2 in range
    rowdet = np.asarray(
        det_n([v[:-2, 1 : w2 + 1], v[1:-1, :w2], v[2:, :w2], v[1:-1, 1 : w2 + 1]]), dtype=float
    )
    coldet = -np.asarray(
        det_n([v[1 : w1 + 1, :-2], v[:w1, 1:-1], v[:w1, 2:], v[1 : w1 + 1, 1:-1]]), dtype=float
    )
    s = np.empty((w1, w2))
    s[0, 0] = float(s0)
    for i in range(w1 - 1):
        if abs(s[i, 0]) < 1e-300 or abs(rowdet[i, 0]) < 1e-300:
            raise DegeneratePointError(f"vanishing determinant in row recursion at site ({i}, 0)")
        s[i + 1, 0] = rowdet[i, 0] / s[i, 0]
    for j in range(w2 - 1):
        if np.any(np.abs(s[:, j]) < 1e-300) or np.any(np.abs(coldet[:, j]) < 1e-300):
            raise DegeneratePointError(f"vanishing determinant in column recursion at column {j}")
        s[:, j + 1] = coldet[:, j] / s[:, j]
    # cross-check: the row recursion must also hold away from column 0
    lhs = s[:-1, :] * s[1:, :]
    rhs = rowdet[: w1 - 1, :]
    denom = np.maximum(np.abs(lhs) + np.abs(rhs), 1e-300)
    mismatch = np.abs(lhs - rhs) / denom
    if mismatch.size and np.max(mismatch) > tol:
        raise GaugeObstructionError(
            f"row and column scale propagation disagree (residual {float(np.max(mismatch)):.3e})"
        )
    return LatticeField(values=mvec / s[..., None], base=nu.base)


def _proj_windows(pairn):
    fv, nv = pairn.f.values, pairn.nu.values
    f = fv[:-1, :-1]
    f1 = fv[1:, :-1]
    f2 = fv[:-1, 1:]
    f12 = fv[1:, 1:]
    n = nv[:-1, :-1]
    n1 = nv[1:, :-1]
    n2 = nv[:-1, 1:]
    n12 = nv[1:, 1:]
    return f, f1, f2, f12, n, n1, n2, n12


def discrete_residual(pairn: DiscreteSurfacePair, tol: float = 1e-10) -> InvariantReport:
    """Residuals of the defining lattice relations and their pairing laws."""
    if pairn.gauge != "projective":
        pairn = lift_to_projective(pairn)
    f, f1, f2, f12, n, n1, n2, n12 = _proj_windows(pairn)
    rep = InvariantReport(metadata={"gauge": "projective", "extent": list(pairn.extent)})
    for name, lhs, rhs in (
        ("bivector_1", wedge2(f, f1), hodge_star(wedge2(n, n1))),
        ("bivector_2", wedge2(f, f2), -hodge_star(wedge2(n, n2))),
    ):
        denom = np.maximum(0.5 * (_fro(lhs) + _fro(rhs)), 1e-300)
        rep.add(name, _fro(lhs - rhs) / denom, tol)

    def addp(name, a, b):
        denom = np.maximum(_norm(a) * _norm(b), 1e-300)
        rep.add(name, pair(a, b) / denom, tol)

    addp("<f,nu>", f, n)
    addp("<f1,nu>", f1, n)
    addp("<f2,nu>", f2, n)
    addp("<f,nu1>", f, n1)
    addp("<f,nu2>", f, n2)
    for name, a, b, c, d in (
        ("<f1,nu2>-<f2,nu1>", f1, n2, f2, n1),
        ("<f,nu12>-<f12,nu>", f, n12, f12, n),
    ):
        pa = pair(a, b)
        pb = pair(c, d)
        # scale by the factor norms: both pairings can cancel to near zero
        denom = np.maximum(_norm(a) * _norm(b) + _norm(c) * _norm(d), 1e-300)
        rep.add(name, (pa - pb) / denom, tol)
    return rep


def discrete_det_invariance(pairn: DiscreteSurfacePair, tol: float = 1e-10) -> InvariantReport:
    """Equality of the four-point volume on both sides of the map.

    Projective: det|f, f1, f2, f12| = det|nu, nu1, nu2, nu12|.  In the
    affine gauge additionally the factorized form
    det|bf1-bf, bf2-bf, bf12-bf| = det|bnu, bnu1, bnu12| det|bnu, bnu1, bnu2|.
    """
    rep = InvariantReport(metadata={"gauge": pairn.gauge})
    if pairn.gauge == "affine":
        bf, bn = pairn.f.values, pairn.nu.values
        e1 = bf[1:, :-1] - bf[:-1, :-1]
        e2 = bf[:-1, 1:] - bf[:-1, :-1]
        e12 = bf[1:, 1:] - bf[:-1, :-1]
        dl = det_n([e1, e2, e12])
        dr = det_n([bn[:-1, :-1], bn[1:, :-1], bn[1:, 1:]]) * det_n([bn[:-1, :-1], bn[1:, :-1], bn[:-1, 1:]])
        # both dets can cancel below their factor scale; normalize by it
        scale = np.maximum(
            _norm(e1) * _norm(e2) * _norm(e12),
            _norm(bn[:-1, :-1]) ** 2 * _norm(bn[1:, :-1]) ** 2 * _norm(bn[1:, 1:]) * _norm(bn[:-1, 1:]),
        )
        denom = np.maximum(np.maximum(np.abs(dl), np.abs(dr)), np.maximum(scale, 1e-300))
        rep.add("affine_volume_factorization", (dl - dr) / denom, tol)
        pairn = lift_to_projective(pairn)
    f, f1, f2, f12, n, n1, n2, n12 = _proj_windows(pairn)
    df = np.asarray(det_n([f, f1, f2, f12]), dtype=float)
    dn = np.asarray(det_n([n, n1, n2, n12]), dtype=float)
    scale = np.maximum(
        _norm(f) * _norm(f1) * _norm(f2) * _norm(f12),
        _norm(n) * _norm(n1) * _norm(n2) * _norm(n12),
    )
    denom = np.maximum(np.maximum(np.abs(df), np.abs(dn)), np.maximum(scale, 1e-300))
    rep.add("volume_invariance", (df - dn) / denom, tol)
    return rep


def discrete_forms(pairn: DiscreteSurfacePair, tol: float = 1e-10):
    """Lattice form fields plus the report of their determinant identities.

    Omega2 = <bf2 - bf, bnu1 - bnu> (equals det|bnu, bnu1, bnu2|);
    Omega3 = <bf1 - bf_{-1}, bnu - bnu_{-1}> (equals -det|bnu_{-1}, bnu, bnu1|)
    and the tilde analog along axis 2 (equals +det|bnu_{-2}, bnu, bnu2|).
    The report metadata records the residuals of the variant determinant
    expressions with the forward index replaced along the other axis,
    which do NOT close in general.  F2d/F3d/F3dtilde are sqrt|det| of the
    homogeneous four-point determinants with signs reported separately.
    """
    rep = InvariantReport(metadata={"gauge": pairn.gauge})
    Omega2 = Omega3 = Omega3t = None
    if pairn.gauge == "affine":
        bf, bn = pairn.f.values, pairn.nu.values
        # identity residuals are scaled by the pairing-factor norms, which
        # stay meaningful where both sides of the identity vanish
        Omega2 = pair(bf[:-1, 1:] - bf[:-1, :-1], bn[1:, :-1] - bn[:-1, :-1])
        d2 = det_n([bn[:-1, :-1], bn[1:, :-1], bn[:-1, 1:]])
        denom = np.maximum(_norm(bf[:-1, 1:] - bf[:-1, :-1]) * _norm(bn[1:, :-1] - bn[:-1, :-1]), 1e-300)
        rep.add("omega2_det_identity", (Omega2 - d2) / denom, tol)
        Omega3 = pair(bf[2:, :] - bf[:-2, :], bn[1:-1, :] - bn[:-2, :])
        d3 = -det_n([bn[:-2, :], bn[1:-1, :], bn[2:, :]])
        denom3 = np.maximum(_norm(bf[2:, :] - bf[:-2, :]) * _norm(bn[1:-1, :] - bn[:-2, :]), 1e-300)
        rep.add("omega3_det_identity", (Omega3 - d3) / denom3, tol)
        Omega3t = pair(bf[:, 2:] - bf[:, :-2], bn[:, 1:-1] - bn[:, :-2])
        d3t = det_n([bn[:, :-2], bn[:, 1:-1], bn[:, 2:]])
        denom3t = np.maximum(_norm(bf[:, 2:] - bf[:, :-2]) * _norm(bn[:, 1:-1] - bn[:, :-2]), 1e-300)
        rep.add("omega3tilde_det_identity", (Omega3t - d3t) / denom3t, tol)
        # variant readings with nu2 (resp. the opposite sign) in place; informational only
        v3 = -det_n([bn[:-2, :-1], bn[1:-1, :-1], bn[1:-1, 1:]])
        rep.metadata["omega3_variant_nu2_max_residual"] = float(
            np.max(np.abs(Omega3[:, :-1] - v3) / denom3[:, :-1], initial=0.0)
        )
        rep.metadata["omega3tilde_variant_sign_max_residual"] = float(
            np.max(np.abs(Omega3t + d3t) / denom3t, initial=0.0)
        )
        pairn = lift_to_projective(pairn)
    fv = pairn.f.values
    f, f1, f2, f12, *_ = _proj_windows(pairn)
    d = np.asarray(det_n([f, f1, f2, f12]), dtype=float)
    F2d, F2s = np.sqrt(np.abs(d)), np.sign(d)
    d = np.asarray(det_n([fv[:-3, :], fv[1:-2, :], fv[2:-1, :], fv[3:, :]]), dtype=float)
    F3d, F3s = np.sqrt(np.abs(d)), np.sign(d)
    d = np.asarray(det_n([fv[:, :-3], fv[:, 1:-2], fv[:, 2:-1], fv[:, 3:]]), dtype=float)
    F3t, F3ts = np.sqrt(np.abs(d)), np.sign(d)
    forms = DiscreteForms(
        Omega2=Omega2,
        Omega3=Omega3,
        Omega3tilde=Omega3t,
        F2d=F2d,
        F3d=F3d,
        F3dtilde=F3t,
        F2d_sign=F2s,
        F3d_sign=F3s,
        F3dtilde_sign=F3ts,
    )
    return forms, rep


def discrete_compat_coeffs(nu: LatticeField, f: Optional[LatticeField] = None, span_tol: float = 1e-6) -> DiscreteCompat:
    """Solve the lattice compatibility system per site.

    nu11 = A1 nu12 + B1 nu1 + C1 nu over sites with (n1+2, n2+1) inside,
    nu22 = A2 nu12 + B2 nu2 + C2 nu over sites with (n1+1, n2+2) inside.
    With the dual lattice supplied, A and C are compared against their
    pairing quotients -<f11,nu>/<f12,nu> etc.
    """
    if nu.ncomp != 4:
        raise DomainError("compatibility coefficients need a 4-component conormal")
    v = nu.values
    m1, m2 = nu.extent
    if m1 < 3 or m2 < 3:
        raise BoundaryError("need at least a 3x3 lattice")
    b1 = [v[1:-1, 1:], v[1:-1, :-1], v[:-2, :-1]]  # nu12, nu1, nu at row sites
    c1, r1 = _span_residual(b1, v[2:, :-1])
    b2 = [v[1:, 1:-1], v[:-1, 1:-1], v[:-1, :-2]]  # nu12, nu2, nu at column sites
    c2, r2 = _span_residual(b2, v[:-1, 2:])
    worst = max(np.max(r1, initial=0.0), np.max(r2, initial=0.0))
    if worst > span_tol:
        raise NotCompatibleError(f"lattice fails the compatibility span test (residual {worst:.3e})")
    out = DiscreteCompat(
        A1=c1[..., 0], B1=c1[..., 1], C1=c1[..., 2],
        A2=c2[..., 0], B2=c2[..., 1], C2=c2[..., 2],
    )
    if f is not None:
        if f.ncomp != 4 or f.extent != nu.extent:
            raise DomainError("dual lattice must match the conormal extent with 4 components")
        fv = f.values
        p12_r = pair(fv[1:-1, 1:], v[:-2, :-1])

        def rel(x, y):
            # absolute below unit scale, relative above (coefficients are O(1))
            return np.abs(x - y) / np.maximum(np.abs(x) + np.abs(y), 1.0)

        out.a1_pairing_residual = rel(out.A1, -pair(fv[2:, :-1], v[:-2, :-1]) / p12_r)
        out.c1_pairing_residual = rel(out.C1, pair(fv[2:, :-1], v[1:-1, 1:]) / p12_r)
        p12_c = pair(fv[1:, 1:-1], v[:-1, :-2])
        out.a2_pairing_residual = rel(out.A2, -pair(fv[:-1, 2:], v[:-1, :-2]) / p12_c)
        # the sign of the C2 quotient is pinned by pairing the nu22 relation
        # with f12 (all other pairings vanish), not guessed
        out.c2_pairing_residual = rel(out.C2, pair(fv[:-1, 2:], v[1:, 1:-1]) / p12_c)
    return out


def affine_sphere_check(pairn: DiscreteSurfacePair, tol: float = 1e-10) -> InvariantReport:
    """Residual of the affine-sphere normalization <bf, bnu> = 1."""
    if pairn.gauge != "affine":
        raise DomainError("affine_sphere_check expects an affine pair")
    rep = InvariantReport(metadata={"gauge": "affine"})
    rep.add("<bf,bnu>-1", (pairn.f.values * pairn.nu.values).sum(axis=-1) - 1.0, tol)
    return rep
