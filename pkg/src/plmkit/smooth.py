"""Surface/conormal correspondence for smooth surfaces in P3.

Two charts are supported.  In the asymptotic chart the defining relations
are ``f ^ f_x = *(nu ^ nu_x)`` and ``f ^ f_y = -*(nu ^ nu_y)``; in the
conjugate-line (elliptic) chart they are ``f ^ f_x = -*(nu ^ nu_y)`` and
``f ^ f_y = *(nu ^ nu_x)``.  The module reconstructs the surface point
from a conormal jet, runs the inverse map by symmetry, and turns each
identity of the correspondence (orthogonality relations, determinant
invariance, quadratic/cubic form expressions, compatibility systems)
into a residual report.

All reconstruction radicals take the positive square root; the resulting
global sign of f is projectively irrelevant because every defining
relation is quadratic in f.
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ChartMismatchError, DegeneratePointError, DomainError, NotCompatibleError
from .fields import FieldGrid, JetGrid, JetRecord, jet_grid
from .multilinear import cross_n, det_n, hodge_star, pair, wedge2
from .report import InvariantReport

__all__ = [
    "ChartKind",
    "FubiniForms",
    "AsymptoticCompat",
    "ConjugateCompat",
    "reconstruct_point",
    "reconstruct_point_alt",
    "inverse_reconstruct_point",
    "reconstruct_field",
    "plm_residual",
    "orthogonality_report",
    "det_invariance_report",
    "fubini_forms",
    "compat_coeffs",
    "det_families",
]


class ChartKind(enum.Enum):
    ASYMPTOTIC = "asymptotic"
    CONJUGATE = "conjugate"


def as_jets(obj, order=2, stencil=2):
    """Accept a FieldGrid (finite differences) or precomputed jets."""
    if isinstance(obj, (JetGrid, JetRecord)):
        return obj
    if isinstance(obj, FieldGrid):
        return jet_grid(obj, order=order, stencil=stencil)
    raise DomainError(f"expected FieldGrid, JetGrid or JetRecord, got {type(obj).__name__}")


def _norm(a):
    return np.sqrt((np.asarray(a, dtype=float) ** 2).sum(axis=-1))


def _fro(B):
    return np.sqrt((np.asarray(B, dtype=float) ** 2).sum(axis=(-2, -1)))


def _degeneracy_scale(*vecs):
    s = 1.0
    for v in vecs:
        s = s * _norm(v)
    return s


def _reconstruct_arrays(value, d_x, d_y, last, eps_deg):
    """Shared core of direct/inverse reconstruction: cross / sqrt(det).

    Returns (result, det, scale); result entries are NaN where the
    discriminant is degenerate or negative.
    """
    num = cross_n([value, d_x, d_y])
    det = det_n([value, d_x, d_y, last])
    scale = _degeneracy_scale(value, d_x, d_y, last)
    det = np.asarray(det, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        res = num / np.sqrt(det)[..., None]
    return res, det, scale


def reconstruct_point(jet: JetRecord, chart: ChartKind, eps_deg: float = 1e-10):
    """Surface point from a conormal jet: cross(v, v_x, v_y) / sqrt(det).

    The discriminant is det|v, v_x, v_y, v_xy| in the asymptotic chart
    and det|v, v_x, v_y, v_xx| in the conjugate chart; both must be
    positive at a generic point.
    """
    last = jet.d_xy if chart is ChartKind.ASYMPTOTIC else jet.d_xx
    res, det, scale = _reconstruct_arrays(jet.value, jet.d_x, jet.d_y, last, eps_deg)
    if abs(det) <= eps_deg * max(scale, 1e-300):
        raise DegeneratePointError("non-generic point: planar/parabolic locus (discriminant ~ 0)")
    if det < 0:
        raise ChartMismatchError(f"negative discriminant {det:.3e} for chart {chart.value}")
    return res


def inverse_reconstruct_point(jet: JetRecord, chart: ChartKind, eps_deg: float = 1e-10):
    """Conormal from a surface jet; literally the same formula with the
    roles of f and nu swapped (projective duality)."""
    return reconstruct_point(jet, chart, eps_deg=eps_deg)


def reconstruct_point_alt(jet: JetRecord, axis: str, eps_deg: float = 1e-10):
    """Single-coordinate reconstruction from third-order data.

    axis 'x': f = -cross(v, v_x, v_xx) / sqrt(det|v, v_x, v_xx, v_xxx|);
    axis 'y': the analogous formula where the valid radicand is
    -det|v, v_y, v_yy, v_yyy|.  Asymptotic chart only.
    """
    if jet.order < 3:
        raise DomainError("reconstruct_point_alt needs third derivatives")
    if axis == "x":
        a, b, c = jet.d_x, jet.d_xx, jet.d_xxx
        det = float(det_n([jet.value, a, b, c]))
        radicand = det
    elif axis == "y":
        a, b, c = jet.d_y, jet.d_yy, jet.d_yyy
        det = float(det_n([jet.value, a, b, c]))
        radicand = -det
    else:
        raise DomainError("axis must be 'x' or 'y'")
    scale = float(_degeneracy_scale(jet.value, a, b, c))
    if abs(radicand) <= eps_deg * max(scale, 1e-300):
        raise DegeneratePointError("degenerate third-order discriminant (ruled/quadric locus)")
    if radicand < 0:
        raise ChartMismatchError(f"wrong-sign radicand {radicand:.3e} for axis {axis}")
    return -cross_n([jet.value, a, b]) / np.sqrt(radicand)


def reconstruct_field(jets, chart: ChartKind, eps_deg: float = 1e-10, strict: bool = False):
    """Vectorized reconstruction over a JetGrid.

    Returns (f, degenerate_mask); degenerate or chart-mismatched points
    are NaN in f.  With ``strict`` the first bad point raises.
    """
    jets = as_jets(jets)
    last = jets.d_xy if chart is ChartKind.ASYMPTOTIC else jets.d_xx
    res, det, scale = _reconstruct_arrays(jets.value, jets.d_x, jets.d_y, last, eps_deg)
    bad = ~(det > eps_deg * np.maximum(scale, 1e-300))
    if strict and np.any(bad):
        i, j = np.argwhere(bad)[0]
        if abs(det[i, j]) <= eps_deg * max(scale[i, j], 1e-300):
            raise DegeneratePointError(f"degenerate point at grid index ({i}, {j})")
        raise ChartMismatchError(f"negative discriminant at grid index ({i}, {j})")
    res = np.where(bad[..., None], np.nan, res)
    return res, bad


def _pair_jets(f_obj, nu_obj, order=2, stencil=2):
    fj = as_jets(f_obj, order=order, stencil=stencil)
    nj = as_jets(nu_obj, order=order, stencil=stencil)
    if fj.shape != nj.shape:
        raise DomainError(f"grid mismatch: {fj.shape} vs {nj.shape}")
    if fj.shape[0] == 0 or fj.shape[1] == 0:
        raise DomainError("empty interior")
    return fj, nj


def plm_residual(f_obj, nu_obj, chart: ChartKind, stencil: int = 2, tol: float = 1e-8) -> InvariantReport:
    """Residual of the two defining bivector relations, normalized by the
    pointwise bivector magnitude."""
    fj, nj = _pair_jets(f_obj, nu_obj, stencil=stencil)
    wfx = wedge2(fj.value, fj.d_x)
    wfy = wedge2(fj.value, fj.d_y)
    snx = hodge_star(wedge2(nj.value, nj.d_x))
    sny = hodge_star(wedge2(nj.value, nj.d_y))
    if chart is ChartKind.ASYMPTOTIC:
        pairs = [("bivector_x", wfx, snx), ("bivector_y", wfy, -sny)]
    else:
        pairs = [("bivector_x", wfx, -sny), ("bivector_y", wfy, snx)]
    rep = InvariantReport(metadata={"chart": chart.value})
    for name, lhs, rhs in pairs:
        denom = np.maximum(0.5 * (_fro(lhs) + _fro(rhs)), 1e-300)
        rep.add(name, _fro(lhs - rhs) / denom, tol)
    return rep


def orthogonality_report(f_obj, nu_obj, chart: ChartKind, stencil: int = 2, tol: float = 1e-8) -> InvariantReport:
    """Vanishing-pairing relations of the correspondence."""
    fj, nj = _pair_jets(f_obj, nu_obj, stencil=stencil)
    rep = InvariantReport(metadata={"chart": chart.value})

    # floor the scale at |f||nu| so a jet that vanishes identically (and is
    # pure roundoff under finite differences) does not divide noise by noise
    floor = np.maximum(_norm(fj.value) * _norm(nj.value), 1e-300)

    def add(name, a, b):
        denom = np.maximum(_norm(a) * _norm(b), floor)
        rep.add(name, pair(a, b) / denom, tol)

    if chart is ChartKind.ASYMPTOTIC:
        add("<f_x,nu>", fj.d_x, nj.value)
        add("<f_x,nu_x>", fj.d_x, nj.d_x)
        add("<f_xx,nu>", fj.d_xx, nj.value)
        add("<f,nu_xx>", fj.value, nj.d_xx)
        add("<f_xx,nu_xx>", fj.d_xx, nj.d_xx)
        add("<f_y,nu>", fj.d_y, nj.value)
        add("<f_y,nu_y>", fj.d_y, nj.d_y)
        add("<f_yy,nu>", fj.d_yy, nj.value)
        add("<f,nu_yy>", fj.value, nj.d_yy)
        add("<f_yy,nu_yy>", fj.d_yy, nj.d_yy)
    else:
        add("<f,nu_x>", fj.value, nj.d_x)
        add("<f_x,nu>", fj.d_x, nj.value)
        add("<f,nu_y>", fj.value, nj.d_y)
        add("<f_y,nu>", fj.d_y, nj.value)
        add("<f_x,nu_y>", fj.d_x, nj.d_y)
        add("<f_y,nu_x>", fj.d_y, nj.d_x)
        add("<f_xy,nu>", fj.d_xy, nj.value)
        add("<f,nu_xy>", fj.value, nj.d_xy)
        # equality of the two diagonal pairings (these do not vanish)
        a = pair(fj.d_x, nj.d_x)
        b = pair(fj.d_y, nj.d_y)
        denom = np.maximum(np.abs(a) + np.abs(b), 1e-300)
        rep.add("<f_x,nu_x>-<f_y,nu_y>", (a - b) / denom, tol)
    return rep


def det_families(jets, which: str):
    """The determinant families entering the invariance identities.

    which = 'mixed'  -> det|v, v_x, v_y, v_xy|
            'xx'     -> det|v, v_x, v_xx, v_xxx|   (needs order 3)
            'yy'     -> det|v, v_y, v_yy, v_yyy|   (needs order 3)
            'conj_xx'-> det|v, v_x, v_y, v_xx|
            'conj_yy'-> det|v, v_x, v_y, v_yy|
    """
    j = jets
    table = {
        "mixed": lambda: det_n([j.value, j.d_x, j.d_y, j.d_xy]),
        "xx": lambda: det_n([j.value, j.d_x, j.d_xx, j.d_xxx]),
        "yy": lambda: det_n([j.value, j.d_y, j.d_yy, j.d_yyy]),
        "conj_xx": lambda: det_n([j.value, j.d_x, j.d_y, j.d_xx]),
        "conj_yy": lambda: det_n([j.value, j.d_x, j.d_y, j.d_yy]),
    }
    if which not in table:
        raise DomainError(f"unknown determinant family {which!r}")
    if which in ("xx", "yy") and j.d_xxx is None:
        raise DomainError(f"family {which!r} needs third-order jets")
    return np.asarray(table[which](), dtype=float)


def det_invariance_report(f_obj, nu_obj, chart: ChartKind, stencil: int = 2, tol: float = 1e-8) -> InvariantReport:
    """Determinant invariance (asymptotic: equal; conjugate: sign-flipped,
    plus the vanishing mixed determinant and equality of the xx/yy
    determinants, which follows from the equal diagonal pairings)."""
    order = 3 if chart is ChartKind.ASYMPTOTIC else 2
    fj, nj = _pair_jets(f_obj, nu_obj, order=order, stencil=stencil)
    rep = InvariantReport(metadata={"chart": chart.value})
    if chart is ChartKind.ASYMPTOTIC:
        fams = [("mixed", "mixed"), ("xx", "xx"), ("yy", "yy")]
        for name, which in fams:
            if which in ("xx", "yy") and fj.d_xxx is None:
                continue
            df = det_families(fj, which)
            dn = det_families(nj, which)
            denom = np.maximum(np.maximum(np.abs(df), np.abs(dn)), 1.0)
            rep.add(f"det_{name}_invariance", (df - dn) / denom, tol)
    else:
        for name in ("conj_xx", "conj_yy"):
            df = det_families(fj, name)
            dn = det_families(nj, name)
            denom = np.maximum(np.maximum(np.abs(df), np.abs(dn)), 1.0)
            rep.add(f"det_{name}_sign_flip", (df + dn) / denom, tol)
        dmix = det_families(nj, "mixed")
        scale = np.maximum(_degeneracy_scale(nj.value, nj.d_x, nj.d_y, nj.d_xy), 1e-300)
        rep.add("det_mixed_vanishes", dmix / scale, tol)
        dxx = det_families(nj, "conj_xx")
        dyy = det_families(nj, "conj_yy")
        denom = np.maximum(np.maximum(np.abs(dxx), np.abs(dyy)), 1e-300)
        rep.add("det_xx_yy_equal", (dxx - dyy) / denom, tol)
    return rep


@dataclass
class FubiniForms:
    """Coefficients of the quadratic and the two cubic invariant forms."""

    F2_coeff: np.ndarray
    F3_coeff: Optional[np.ndarray]
    F3tilde_coeff: Optional[np.ndarray]


def fubini_forms(f_obj, nu_obj, stencil: int = 2, sign_tol: float = 1e-10) -> FubiniForms:
    """Projective form coefficients in the asymptotic chart.

    F2 = 2 <f_x, nu_y>.  F3 = sign(<f_x, nu_xx>) * sqrt(det|nu, nu_x,
    nu_xx, nu_xxx|) and F3~ analogously with -det|nu, nu_y, nu_yy,
    nu_yyy|; the sign source is the derivation's pairing (the printed
    third line of the form table uses a first-order pairing instead,
    which is inconsistent with the derivation and not used here).
    Cubic coefficients need third-order jets and are None otherwise.
    """
    fj, nj = _pair_jets(f_obj, nu_obj, order=3, stencil=stencil)
    F2 = 2.0 * np.asarray(pair(fj.d_x, nj.d_y), dtype=float)
    F3 = F3t = None
    if nj.d_xxx is not None:
        scale = np.maximum(_degeneracy_scale(nj.value, nj.d_x, nj.d_xx, nj.d_xxx), 1e-300)
        det = det_families(nj, "xx")
        if np.any(det < -sign_tol * scale):
            raise ChartMismatchError("det|nu,nu_x,nu_xx,nu_xxx| < 0: not an asymptotic chart for F3")
        F3 = np.sign(pair(fj.d_x, nj.d_xx)) * np.sqrt(np.maximum(det, 0.0))
        scale = np.maximum(_degeneracy_scale(nj.value, nj.d_y, nj.d_yy, nj.d_yyy), 1e-300)
        det = det_families(nj, "yy")
        if np.any(det > sign_tol * scale):
            raise ChartMismatchError("det|nu,nu_y,nu_yy,nu_yyy| > 0: wrong-sign radicand for F3~")
        F3t = np.sign(pair(fj.d_y, nj.d_yy)) * np.sqrt(np.maximum(-det, 0.0))
    return FubiniForms(F2_coeff=F2, F3_coeff=F3, F3tilde_coeff=F3t)


def _solve_span(basis, rhs, span_tol, what):
    """Least-squares coefficients of rhs in a pointwise 3-vector basis.

    basis: list of three (..., 4) arrays; rhs: (..., 4).  Raises when the
    basis is rank deficient or the residual orthogonal to the span is
    above ``span_tol`` relative to the basis scale.
    """
    M = np.stack(basis, axis=-1)  # (..., 4, 3)
    G = np.swapaxes(M, -1, -2) @ M[..., :, :]
    b = (np.swapaxes(M, -1, -2) @ rhs[..., :, None])[..., 0]
    detG = np.linalg.det(G)
    scale2 = 1.0
    for v in basis:
        scale2 = scale2 * (np.asarray(v, dtype=float) ** 2).sum(axis=-1)
    if np.any(detG <= 1e-24 * np.maximum(scale2, 1e-300)):
        raise DegeneratePointError(f"rank-deficient span while solving {what}")
    coeff = np.linalg.solve(G, b[..., :, None])[..., 0]
    recon = (M @ coeff[..., :, None])[..., 0]
    rhs_norm = _norm(rhs)
    basis_norm = np.sqrt(np.maximum(scale2, 1e-300)) ** (1.0 / 3.0)
    resid = _norm(rhs - recon) / np.maximum(rhs_norm, 1e-12 * basis_norm)
    if np.any(resid > span_tol):
        k = int(np.argmax(resid))
        raise NotCompatibleError(
            f"{what}: span residual {float(resid.reshape(-1)[k]):.3e} exceeds {span_tol:.1e} "
            "(input is not a compatible conormal)"
        )
    return coeff, resid


@dataclass
class AsymptoticCompat:
    """Coefficients of the second-derivative span systems, asymptotic chart."""

    U1: np.ndarray
    V1: np.ndarray
    W1: np.ndarray
    U2: np.ndarray
    V2: np.ndarray
    W2: np.ndarray
    Wt1: Optional[np.ndarray] = None
    Wt2: Optional[np.ndarray] = None
    v1_sq_residual: Optional[np.ndarray] = None
    u2_sq_residual: Optional[np.ndarray] = None


@dataclass
class ConjugateCompat:
    """Coefficients of the mixed/trace span systems, conjugate chart."""

    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    Ut: np.ndarray
    Vt: np.ndarray
    C: np.ndarray
    Wt: Optional[np.ndarray] = None
    Ct: Optional[np.ndarray] = None


def compat_coeffs(nu_obj, chart: ChartKind, stencil: int = 2, f_obj=None, span_tol: float = 1e-6):
    """Per-point compatibility coefficients of the conormal field.

    Asymptotic chart: v_xx = U1 v_x + V1 v_y + W1 v and v_yy = U2 v_x +
    V2 v_y + W2 v, with the squared-coefficient/determinant-ratio checks
    attached (these need third-order jets).  Conjugate chart: v_xy =
    U v_x + V v_y + W v and v_yy - v_xx = -2 Vt v_x + 2 Ut v_y + C v.
    Supplying the dual field adds the coefficients only visible on it.
    """
    order = 3 if chart is ChartKind.ASYMPTOTIC else 2
    nj = as_jets(nu_obj, order=order, stencil=stencil)
    fj = None if f_obj is None else as_jets(f_obj, order=order, stencil=stencil)
    basis = [nj.d_x, nj.d_y, nj.value]
    if chart is ChartKind.ASYMPTOTIC:
        c1, _ = _solve_span(basis, nj.d_xx, span_tol, "nu_xx in span{nu_x, nu_y, nu}")
        c2, _ = _solve_span(basis, nj.d_yy, span_tol, "nu_yy in span{nu_x, nu_y, nu}")
        out = AsymptoticCompat(
            U1=c1[..., 0], V1=c1[..., 1], W1=c1[..., 2],
            U2=c2[..., 0], V2=c2[..., 1], W2=c2[..., 2],
        )
        if nj.d_xxx is not None:
            dmix = det_families(nj, "mixed")
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio1 = det_families(nj, "xx") / dmix
                ratio2 = -det_families(nj, "yy") / dmix
            denom1 = np.maximum(np.abs(out.V1) ** 2 + np.abs(ratio1), 1e-12)
            denom2 = np.maximum(np.abs(out.U2) ** 2 + np.abs(ratio2), 1e-12)
            out.v1_sq_residual = np.abs(out.V1**2 - ratio1) / denom1
            out.u2_sq_residual = np.abs(out.U2**2 - ratio2) / denom2
        if fj is not None:
            fb = [fj.d_x, fj.d_y, fj.value]
            d1, _ = _solve_span(fb, fj.d_xx, span_tol, "f_xx in span{f_x, f_y, f}")
            d2, _ = _solve_span(fb, fj.d_yy, span_tol, "f_yy in span{f_x, f_y, f}")
            out.Wt1 = d1[..., 2]
            out.Wt2 = d2[..., 2]
        return out
    cm, _ = _solve_span(basis, nj.d_xy, span_tol, "nu_xy in span{nu_x, nu_y, nu}")
    ct, _ = _solve_span(basis, nj.d_yy - nj.d_xx, span_tol, "nu_yy - nu_xx in span{nu_x, nu_y, nu}")
    out = ConjugateCompat(
        U=cm[..., 0], V=cm[..., 1], W=cm[..., 2],
        Vt=-0.5 * ct[..., 0], Ut=0.5 * ct[..., 1], C=ct[..., 2],
    )
    if fj is not None:
        fb = [fj.d_x, fj.d_y, fj.value]
        dm, _ = _solve_span(fb, fj.d_xy, span_tol, "f_xy in span{f_x, f_y, f}")
        dt, _ = _solve_span(fb, fj.d_yy - fj.d_xx, span_tol, "f_yy - f_xx in span{f_x, f_y, f}")
        out.Wt = dm[..., 2]
        out.Ct = dt[..., 2]
    return out
