"""Surface/conormal correspondence for hypersurfaces in P^{n+1}, n <= 4.

The defining system couples each coordinate direction through an n x n
weight matrix A:

    f ^ f_{x_a} = sum_b A[a, b] * star(nu_{x_1} ^ ... ^ nu[slot b] ^ ... ^ nu_{x_n})

where the b-th wedge factor is nu itself and the others are the first
partials.  For n = 2 an anti-diagonal A reduces to the asymptotic chart
of the surface module and a diagonal A to the conjugate chart (up to a
projective rescaling of f).

The module reconstructs f from a second-order conormal jet, recovers A
from a dual pair, and reports the defining-system, pairing and
compatibility residuals.  The sign convention of A is fixed by the
round-trip law: ``recover_A`` followed by ``hyper_reconstruct`` must
reproduce f projectively, and the recovered A must zero the defining
residual.
"""

from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .errors import (
    BoundaryError,
    DegeneratePointError,
    DomainError,
    ParseError,
    PivotMismatchError,
)
from .fields import _STENCILS
from .multilinear import cross_n, det_n, pair, star_of_wedge, wedge2
from .report import InvariantReport

__all__ = [
    "AMatrix",
    "HyperGrid",
    "HyperJet",
    "hyper_jet_grid",
    "hyper_reconstruct",
    "recover_A",
    "hyper_plm_residual",
    "hyper_compat_residual",
    "read_hyper_grid",
    "write_hyper_grid",
    "read_amatrix_field",
    "write_amatrix_field",
]

_MAX_N = 4


@dataclass(frozen=True)
class AMatrix:
    """Constant n x n weight matrix of the defining system; det != 0."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DomainError("AMatrix must be square")
        n = v.shape[0]
        if not 2 <= n <= _MAX_N:
            raise DomainError(f"AMatrix size must be in 2..{_MAX_N}, got {n}")
        if not np.all(np.isfinite(v)):
            raise DomainError("AMatrix contains non-finite entries")
        if abs(np.linalg.det(v)) <= 1e-12 * max(np.abs(v).max(), 1e-300) ** n:
            raise DomainError("AMatrix is singular (det A = 0)")

    @property
    def n(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class HyperGrid:
    """Uniform sampling of an (n+2)-component field over an n-box.

    values[i1, ..., in] sits at (origin[a] + i_a * spacing[a]).
    """

    origin: tuple
    spacing: tuple
    values: np.ndarray  # (N1, ..., Nn, n + 2)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        n = v.ndim - 1
        if not 2 <= n <= _MAX_N:
            raise DomainError(f"HyperGrid needs 2..{_MAX_N} parameter axes, got {n}")
        if v.shape[-1] != n + 2:
            raise DomainError(f"expected {n + 2} components for {n} parameters, got {v.shape[-1]}")
        if len(self.origin) != n or len(self.spacing) != n:
            raise DomainError("origin/spacing length must match the number of axes")
        if not all(h > 0 for h in self.spacing):
            raise DomainError("grid spacing must be strictly positive")
        if not np.all(np.isfinite(v)):
            raise DomainError("grid contains non-finite samples")

    @property
    def n(self):
        return self.values.ndim - 1

    @property
    def dims(self):
        return self.values.shape[:-1]

    def axis_coords(self, a):
        return self.origin[a] + self.spacing[a] * np.arange(self.dims[a])


@dataclass
class HyperJet:
    """Conormal (or surface) jet to second order at one or many points.

    value: (..., n + 2); d1[..., a, :] the partial along x_{a+1};
    d2[..., a, c, :] the symmetric second partials.
    """

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=float)
        self.d1 = np.asarray(self.d1, dtype=float)
        self.d2 = np.asarray(self.d2, dtype=float)
        n = self.d1.shape[-2]
        if self.value.shape[-1] != n + 2 or self.d2.shape[-3:-1] != (n, n):
            raise DomainError("inconsistent jet shapes")
        for arr in (self.value, self.d1, self.d2):
            if not np.all(np.isfinite(arr)):
                raise DomainError("jet contains non-finite entries")
        sym = self.d2 - np.swapaxes(self.d2, -3, -2)
        if np.max(np.abs(sym), initial=0.0) > 1e-9 * max(np.max(np.abs(self.d2), initial=0.0), 1e-300):
            raise DomainError("second partials must be symmetric")

    @property
    def n(self):
        return self.d1.shape[-2]

    @property
    def batch_shape(self):
        return self.value.shape[:-1]


def hyper_jet_grid(grid: HyperGrid, stencil: int = 2) -> HyperJet:
    """Central-difference second-order jets at every interior point."""
    if stencil not in (2, 4):
        raise DomainError("stencil must be 2 or 4")
    m = 1 if stencil == 2 else 2
    n = grid.n
    dims = grid.dims
    if any(N < 2 * m + 1 for N in dims):
        raise BoundaryError(f"grid dims {dims} smaller than stencil width {2 * m + 1}")
    v = grid.values

    def shifted(offsets):
        sl = tuple(slice(m + o, dims[a] - m + o) for a, o in enumerate(offsets)) + (slice(None),)
        return v[sl]

    def dv(axis, deriv):
        offs, wts, hpow = _STENCILS[(stencil, deriv)]
        out = None
        for o, w in zip(offs, wts):
            shift = [0] * n
            shift[axis] = o
            term = w * shifted(shift)
            out = term if out is None else out + term
        return out / grid.spacing[axis] ** hpow

    def dmixed(ax1, ax2):
        offs, wts, _ = _STENCILS[(stencil, 1)]
        out = None
        for o1, w1 in zip(offs, wts):
            for o2, w2 in zip(offs, wts):
                shift = [0] * n
                shift[ax1], shift[ax2] = o1, o2
                term = (w1 * w2) * shifted(shift)
                out = term if out is None else out + term
        return out / (grid.spacing[ax1] * grid.spacing[ax2])

    d1 = np.stack([dv(a, 1) for a in range(n)], axis=-2)
    rows = []
    for a in range(n):
        row = [dv(a, 2) if a == c else dmixed(a, c) for c in range(n)]
        rows.append(np.stack(row, axis=-2))
    d2 = np.stack(rows, axis=-3)
    return HyperJet(value=shifted([0] * n), d1=d1, d2=d2)


def _norm(a):
    return np.sqrt((np.asarray(a, dtype=float) ** 2).sum(axis=-1))


def _fro(B):
    return np.sqrt((np.asarray(B, dtype=float) ** 2).sum(axis=(-2, -1)))


def _a_values(A, n):
    """Normalize an AMatrix or a per-point (..., n, n) array of weights."""
    if isinstance(A, AMatrix):
        v = A.values
    else:
        v = np.asarray(A, dtype=float)
    if v.shape[-2:] != (n, n):
        raise DomainError(f"weight matrix shape {v.shape[-2:]} does not match n = {n}")
    return v

def _conormal_cross(jet: HyperJet):
    """[nu, nu_{x_1}, ..., nu_{x_n}] via the generalized cross product."""
    vecs = [jet.value] + [jet.d1[..., a, :] for a in range(jet.n)]
    return cross_n(vecs)


def _slot_star(jet: HyperJet, beta):
    """star(nu_{x_1} ^ ... ^ nu in slot beta ^ ... ^ nu_{x_n}), 0-based beta."""
    vecs = [jet.value if a == beta else jet.d1[..., a, :] for a in range(jet.n)]
    return star_of_wedge(vecs)


def hyper_reconstruct(jet: HyperJet, A, pivot=(1, 1), eps_deg: float = 1e-10):
    """Surface point from a conormal jet and weight matrix.

    f = -sqrt(A[a, c] / det|nu_{x_a x_c}, nu, nu_{x_1}, ..., nu_{x_n}|)
        * [nu, nu_{x_1}, ..., nu_{x_n}]

    with a 1-based ``pivot`` (a, c).  When the compatibility system holds
    the result does not depend on the pivot; that is something to verify
    on data, not an assumption made here.
    """
    n = jet.n
    a, c = pivot
    if not (1 <= a <= n and 1 <= c <= n):
        raise DomainError(f"pivot {pivot} out of range 1..{n}")
    Av = _a_values(A, n)
    m = _conormal_cross(jet)
    piv = [jet.d2[..., a - 1, c - 1, :], jet.value] + [jet.d1[..., r, :] for r in range(n)]
    det = np.asarray(det_n(piv), dtype=float)
    scale = _norm(jet.d2[..., a - 1, c - 1, :]) * _norm(jet.value)
    for r in range(n):
        scale = scale * _norm(jet.d1[..., r, :])
    if np.any(np.abs(det) <= eps_deg * np.maximum(scale, 1e-300)):
        raise DegeneratePointError(f"degenerate pivot determinant for pivot {pivot}")
    ratio = Av[..., a - 1, c - 1] / det
    if np.any(ratio <= 0):
        raise PivotMismatchError(f"negative radicand A{pivot}/det at pivot {pivot}; choose another pivot")
    return -np.sqrt(ratio)[..., None] * m


def recover_A(f_jet: HyperJet, nu_jet: HyperJet, eps_deg: float = 1e-10):
    """Weight matrix from a dual pair of jets.

    From the pairing law  <f_{x_a}, nu_{x_c}> f = -A[a, c] [nu, nu_{x_1},
    ..., nu_{x_n}]  projected on the cross-product direction:
    A[a, c] = -<f_{x_a}, nu_{x_c}> <f, m> / <m, m>.  Returns an (..., n, n)
    array (an AMatrix for single-point input would lose the batch).
    """
    n = nu_jet.n
    if f_jet.n != n:
        raise DomainError("f and nu jets disagree on the number of parameters")
    m = _conormal_cross(nu_jet)
    mm = (m * m).sum(axis=-1)
    scale = _norm(nu_jet.value)
    for r in range(n):
        scale = scale * _norm(nu_jet.d1[..., r, :])
    if np.any(np.sqrt(mm) <= eps_deg * np.maximum(scale, 1e-300)):
        raise DegeneratePointError("conormal frame is degenerate: [nu, nu_x1, ..., nu_xn] ~ 0")
    c = pair(f_jet.value, m) / mm
    rows = []
    for a in range(n):
        row = [-pair(f_jet.d1[..., a, :], nu_jet.d1[..., g, :]) * c for g in range(n)]
        rows.append(np.stack(np.broadcast_arrays(*row), axis=-1))
    return np.stack(rows, axis=-2)


def hyper_plm_residual(f_jet: HyperJet, nu_jet: HyperJet, A, tol: float = 1e-8) -> InvariantReport:
    """Residuals of the defining bivector system and its pairing laws."""
    n = nu_jet.n
    if f_jet.n != n:
        raise DomainError("f and nu jets disagree on the number of parameters")
    if f_jet.batch_shape != nu_jet.batch_shape:
        raise DomainError(f"batch shape mismatch: {f_jet.batch_shape} vs {nu_jet.batch_shape}")
    Av = _a_values(A, n)
    stars = [_slot_star(nu_jet, b) for b in range(n)]
    rep = InvariantReport(metadata={"n": n})
    for a in range(n):
        lhs = wedge2(f_jet.value, f_jet.d1[..., a, :])
        rhs = None
        for b in range(n):
            term = Av[..., a, b, None, None] * stars[b]
            rhs = term if rhs is None else rhs + term
        denom = np.maximum(0.5 * (_fro(lhs) + _fro(rhs)), 1e-300)
        rep.add(f"bivector_x{a + 1}", _fro(lhs - rhs) / denom, tol)
    for a in range(n):
        fa = f_jet.d1[..., a, :]
        na = nu_jet.d1[..., a, :]
        denom = np.maximum(_norm(fa) * _norm(nu_jet.value), 1e-300)
        rep.add(f"<f_x{a + 1},nu>", pair(fa, nu_jet.value) / denom, tol)
        denom = np.maximum(_norm(f_jet.value) * _norm(na), 1e-300)
        rep.add(f"<f,nu_x{a + 1}>", pair(f_jet.value, na) / denom, tol)
    return rep


def _span_distance(basis, rhs, what):
    """Relative distance of rhs from the pointwise span of the basis."""
    M = np.stack(np.broadcast_arrays(*basis), axis=-1)  # (..., d, k)
    G = np.swapaxes(M, -1, -2) @ M
    detG = np.linalg.det(G)
    scale2 = np.ones(np.asarray(detG).shape)
    for v in basis:
        scale2 = scale2 * (np.asarray(v, dtype=float) ** 2).sum(axis=-1)
    if np.any(detG <= 1e-24 * np.maximum(scale2, 1e-300)):
        raise DegeneratePointError(f"rank-deficient span while testing {what}")
    b = (np.swapaxes(M, -1, -2) @ rhs[..., :, None])
    coeff = np.linalg.solve(G, b)
    recon = (M @ coeff)[..., 0]
    k = len(basis)
    basis_norm = np.sqrt(np.maximum(scale2, 1e-300)) ** (1.0 / k)
    return _norm(rhs - recon) / np.maximum(_norm(rhs), 1e-12 * basis_norm)


def hyper_compat_residual(nu_jet: HyperJet, A, tol: float = 1e-8) -> InvariantReport:
    """Span test of the compatibility system.

    For each index quadruple (a, b, g, d) the combination
    A[a, g] nu_{x_b x_d} - A[b, d] nu_{x_a x_g} must lie in
    span{nu, nu_{x_1}, ..., nu_{x_n}}.
    """
    n = nu_jet.n
    Av = _a_values(A, n)
    basis = [nu_jet.value] + [nu_jet.d1[..., r, :] for r in range(n)]
    rep = InvariantReport(metadata={"n": n})
    for a, b, g, d in product(range(n), repeat=4):
        if (a, g) == (b, d):
            continue
        w = (
            Av[..., a, g, None] * nu_jet.d2[..., b, d, :]
            - Av[..., b, d, None] * nu_jet.d2[..., a, g, :]
        )
        name = f"compat_{a + 1}{b + 1}{g + 1}{d + 1}"
        if np.max(_norm(w), initial=0.0) == 0.0:
            rep.add(name, np.zeros(np.asarray(_norm(w)).shape), tol)
            continue
        rep.add(name, _span_distance(basis, w, name), tol)
    return rep


def _fmt(x):
    return repr(float(x))


def write_hyper_grid(grid: HyperGrid, path):
    """Hyper grid CSV: header x1..xn,v1..v(n+2); first axis varies fastest."""
    n = grid.n
    d = n + 2
    coords = [grid.axis_coords(a) for a in range(n)]
    with open(path, "w") as fh:
        head = [f"x{a + 1}" for a in range(n)] + [f"v{k + 1}" for k in range(d)]
        fh.write(",".join(head) + "\n")
        for idx in product(*(range(N) for N in reversed(grid.dims))):
            site = tuple(reversed(idx))
            row = [_fmt(coords[a][site[a]]) for a in range(n)]
            row += [_fmt(c) for c in grid.values[site]]
            fh.write(",".join(row) + "\n")


def _read_table(path, n_coords, value_names):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=0)
    header = [c.strip() for c in lines[0].split(",")]
    want = [f"x{a + 1}" for a in range(n_coords)] + value_names
    if header != want:
        raise ParseError(f"expected columns {','.join(want)}, got {','.join(header)}", line=1)
    rows = []
    for ln, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != len(want):
            raise ParseError(f"expected {len(want)} columns, got {len(cells)}", line=ln)
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line=ln) from None
    return np.array(rows), len(lines)


def _assemble(rows, n, nval, last_line):
    coords = [np.unique(rows[:, a]) for a in range(n)]
    dims = tuple(len(u) for u in coords)
    if int(np.prod(dims)) != rows.shape[0]:
        raise ParseError(f"rows do not fill a full {'x'.join(map(str, dims))} grid", line=last_line)
    for a, u in enumerate(coords):
        if len(u) > 1:
            du = np.diff(u)
            if np.max(np.abs(du - du[0])) > 1e-12 * max(abs(du[0]), 1e-300):
                raise ParseError(f"non-uniform spacing along x{a + 1}", line=last_line)
    values = np.empty(dims + (nval,))
    idx = []
    for a in range(n):
        idx.append(np.searchsorted(coords[a], rows[:, a]))
    values[tuple(idx)] = rows[:, n:]
    origin = tuple(float(u[0]) for u in coords)
    spacing = tuple(float(u[1] - u[0]) if len(u) > 1 else 1.0 for u in coords)
    return origin, spacing, values


def _sniff_ncoords(path):
    with open(path) as fh:
        header = fh.readline()
    cols = [c.strip() for c in header.split(",")]
    n = 0
    while n < len(cols) and cols[n] == f"x{n + 1}":
        n += 1
    if not 2 <= n <= _MAX_N:
        raise ParseError(f"could not find coordinate columns x1..xn (n in 2..{_MAX_N})", line=1)
    return n


def read_hyper_grid(path) -> HyperGrid:
    n = _sniff_ncoords(path)
    names = [f"v{k + 1}" for k in range(n + 2)]
    rows, last = _read_table(path, n, names)
    origin, spacing, values = _assemble(rows, n, n + 2, last)
    return HyperGrid(origin=origin, spacing=spacing, values=values)


def write_amatrix_field(origin, spacing, field, path):
    """Per-point weight matrices as CSV x1..xn,a11..ann (row-major entries)."""
    field = np.asarray(field, dtype=float)
    n = field.shape[-1]
    if field.shape[-2:] != (n, n) or field.ndim != n + 2:
        raise DomainError("A field must have shape (N1, ..., Nn, n, n)")
    coords = [origin[a] + spacing[a] * np.arange(field.shape[a]) for a in range(n)]
    with open(path, "w") as fh:
        head = [f"x{a + 1}" for a in range(n)]
        head += [f"a{i + 1}{j + 1}" for i in range(n) for j in range(n)]
        fh.write(",".join(head) + "\n")
        for idx in product(*(range(N) for N in reversed(field.shape[:n]))):
            site = tuple(reversed(idx))
            row = [_fmt(coords[a][site[a]]) for a in range(n)]
            row += [_fmt(c) for c in field[site].reshape(-1)]
            fh.write(",".join(row) + "\n")


def read_amatrix_field(path):
    """Inverse of :func:`write_amatrix_field`: (origin, spacing, field)."""
    n = _sniff_ncoords(path)
    names = [f"a{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    rows, last = _read_table(path, n, names)
    origin, spacing, values = _assemble(rows, n, n * n, last)
    return origin, spacing, values.reshape(values.shape[:-1] + (n, n))
