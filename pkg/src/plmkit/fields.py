"""Sampled vector fields on uniform grids and integer lattices.

``FieldGrid`` holds a d-component field over a uniform 2-D parameter box,
``LatticeField`` a field over integer sites with shift operators, and
``jet_at`` / ``jet_grid`` extract central-difference jets (derivatives up
to third order) at 2nd or 4th accuracy order.  CSV round-trip I/O uses
repr-precision floats so write-then-read is bitwise lossless.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BoundaryError, DomainError, ParseError

__all__ = [
    "FieldGrid",
    "JetRecord",
    "JetGrid",
    "LatticeField",
    "jet_at",
    "jet_grid",
    "shift",
    "read_grid",
    "write_grid",
    "read_lattice",
    "write_lattice",
]


@dataclass(frozen=True)
class FieldGrid:
    """Uniform rectangular sampling of a vector field.

    values[i, j] is the sample at (x0 + i*hx, y0 + j*hy).
    """

    origin: tuple
    spacing: tuple
    values: np.ndarray  # (Nx, Ny, d)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 3:
            raise DomainError("FieldGrid values must have shape (Nx, Ny, d)")
        if not (self.spacing[0] > 0 and self.spacing[1] > 0):
            raise DomainError("grid spacing must be strictly positive")
        if not np.all(np.isfinite(v)):
            raise DomainError("grid contains non-finite samples")

    @property
    def dims(self):
        return self.values.shape[:2]

    @property
    def ncomp(self):
        return self.values.shape[2]

    def xs(self):
        return self.origin[0] + self.spacing[0] * np.arange(self.dims[0])

    def ys(self):
        return self.origin[1] + self.spacing[1] * np.arange(self.dims[1])


@dataclass
class JetRecord:
    """A vector with its partial derivatives at one parameter point."""

    value: np.ndarray
    d_x: np.ndarray
    d_y: np.ndarray
    d_xx: np.ndarray
    d_xy: np.ndarray
    d_yy: np.ndarray
    d_xxx: Optional[np.ndarray] = None
    d_yyy: Optional[np.ndarray] = None

    @property
    def order(self):
        return 3 if self.d_xxx is not None else 2


@dataclass
class JetGrid:
    """Per-point jets over (a sub-box of) a grid; batched JetRecord.

    Each derivative array has shape (nx, ny, d); ``xs``/``ys`` give the
    parameter coordinates of the covered points.
    """

    xs: np.ndarray
    ys: np.ndarray
    value: np.ndarray
    d_x: np.ndarray
    d_y: np.ndarray
    d_xx: np.ndarray
    d_xy: np.ndarray
    d_yy: np.ndarray
    d_xxx: Optional[np.ndarray] = None
    d_yyy: Optional[np.ndarray] = None

    @property
    def order(self):
        return 3 if self.d_xxx is not None else 2

    @property
    def shape(self):
        return self.value.shape[:2]

    def at(self, i, j):
        """JetRecord at interior index (i, j)."""
        return JetRecord(
            value=self.value[i, j],
            d_x=self.d_x[i, j],
            d_y=self.d_y[i, j],
            d_xx=self.d_xx[i, j],
            d_xy=self.d_xy[i, j],
            d_yy=self.d_yy[i, j],
            d_xxx=None if self.d_xxx is None else self.d_xxx[i, j],
            d_yyy=None if self.d_yyy is None else self.d_yyy[i, j],
        )


# Central-difference coefficients, offsets symmetric around 0.
# (accuracy order, derivative order) -> (offsets, weights, h power)
_STENCILS = {
    (2, 1): ([-1, 1], [-0.5, 0.5], 1),
    (2, 2): ([-1, 0, 1], [1.0, -2.0, 1.0], 2),
    (2, 3): ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5], 3),
    (4, 1): ([-2, -1, 1, 2], [1 / 12, -8 / 12, 8 / 12, -1 / 12], 1),
    (4, 2): ([-2, -1, 0, 1, 2], [-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12], 2),
    (4, 3): (
        [-3, -2, -1, 1, 2, 3],
        [1 / 8, -8 / 8, 13 / 8, -13 / 8, 8 / 8, -1 / 8],
        3,
    ),
}


def _margin(stencil, order):
    # widest one-sided reach of any stencil used at this request
    m = 1 if stencil == 2 else 2
    if order >= 3:
        m = 2 if stencil == 2 else 3
    return m


def jet_at(grid: FieldGrid, i: int, j: int, order: int = 2, stencil: int = 2) -> JetRecord:
    """Finite-difference jet at interior grid index (i, j).

    ``order`` is the highest derivative (2 or 3); ``stencil`` the design
    accuracy order (2 or 4).  Raises :class:`BoundaryError` when the
    stencil does not fit.
    """
    jg = jet_grid(grid, order=order, stencil=stencil)
    m = _margin(stencil, order)
    ii, jj = i - m, j - m
    if not (0 <= ii < jg.shape[0] and 0 <= jj < jg.shape[1]):
        raise BoundaryError(f"point ({i}, {j}) too close to the boundary for stencil {stencil}, order {order}")
    return jg.at(ii, jj)


def jet_grid(grid: FieldGrid, order: int = 2, stencil: int = 2) -> JetGrid:
    """Jets at every interior point, vectorized.

    The interior margin is the widest stencil reach; derivatives are
    never one-sided.
    """
    if order not in (2, 3):
        raise DomainError("order must be 2 or 3")
    if stencil not in (2, 4):
        raise DomainError("stencil must be 2 or 4")
    m = _margin(stencil, order)
    nx, ny = grid.dims
    if nx < 2 * m + 1 or ny < 2 * m + 1:
        raise BoundaryError(f"grid dims {grid.dims} smaller than stencil width {2 * m + 1}")
    hx, hy = grid.spacing
    v = grid.values

    def dv(axis, deriv):
        h = hx if axis == 0 else hy
        offsets, weights, hpow = _STENCILS[(stencil, deriv)]
        out = None
        for off, w in zip(offsets, weights):
            sl = [slice(None)] * 3
            sl[axis] = slice(m + off, v.shape[axis] - m + off)
            sl[1 - axis] = slice(m, v.shape[1 - axis] - m)
            term = w * v[tuple(sl)]
            out = term if out is None else out + term
        return out / h**hpow

    def dxy():
        ox, wx, _ = _STENCILS[(stencil, 1)]
        oy, wy, _ = _STENCILS[(stencil, 1)]
        out = None
        for ax, awx in zip(ox, wx):
            for ay, awy in zip(oy, wy):
                term = (awx * awy) * v[m + ax : nx - m + ax, m + ay : ny - m + ay]
                out = term if out is None else out + term
        return out / (hx * hy)

    core = v[m : nx - m, m : ny - m]
    jg = JetGrid(
        xs=grid.xs()[m : nx - m],
        ys=grid.ys()[m : ny - m],
        value=core,
        d_x=dv(0, 1),
        d_y=dv(1, 1),
        d_xx=dv(0, 2),
        d_xy=dxy(),
        d_yy=dv(1, 2),
    )
    if order >= 3:
        jg.d_xxx = dv(0, 3)
        jg.d_yyy = dv(1, 3)
    return jg


@dataclass(frozen=True)
class LatticeField:
    """Map from integer lattice sites to 3- or 4-component vectors.

    values[n1, n2] is the sample at site (base[0] + n1, base[1] + n2);
    ``base`` tracks the window origin so shifted views stay aligned.
    """

    values: np.ndarray  # (M1, M2, d)
    base: tuple = (0, 0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 3:
            raise DomainError("LatticeField values must have shape (M1, M2, d)")
        if v.shape[2] not in (3, 4):
            raise DomainError("LatticeField supports d in {3, 4}")
        if not np.all(np.isfinite(v)):
            raise DomainError("lattice contains non-finite entries")

    @property
    def extent(self):
        return self.values.shape[:2]

    @property
    def ncomp(self):
        return self.values.shape[2]


def shift(lat: LatticeField, direction: int, steps: int) -> LatticeField:
    """View of the lattice advanced ``steps`` sites along axis 1 or 2.

    The value of the result at window index (n1, n2) equals the original
    at the shifted site; the window shrinks by |steps| along ``direction``.
    T1 and T2 commute.
    """
    if direction not in (1, 2):
        raise DomainError("direction must be 1 or 2")
    ax = direction - 1
    n = lat.extent[ax]
    if abs(steps) >= n:
        raise BoundaryError(f"shift by {steps} leaves the lattice extent {lat.extent}")
    sl = [slice(None), slice(None), slice(None)]
    if steps >= 0:
        sl[ax] = slice(steps, n)
    else:
        sl[ax] = slice(0, n + steps)
    base = list(lat.base)
    base[ax] += max(steps, 0)
    return LatticeField(values=lat.values[tuple(sl)], base=tuple(base))


def _fmt(x):
    return repr(float(x))


def write_grid(grid: FieldGrid, path):
    """Grid CSV: header x,y,v1..vd; rows row-major (y outer, x inner)."""
    d = grid.ncomp
    xs, ys = grid.xs(), grid.ys()
    with open(path, "w") as fh:
        fh.write("x,y," + ",".join(f"v{k + 1}" for k in range(d)) + "\n")
        for j in range(grid.dims[1]):
            for i in range(grid.dims[0]):
                row = [_fmt(xs[i]), _fmt(ys[j])] + [_fmt(c) for c in grid.values[i, j]]
                fh.write(",".join(row) + "\n")


def read_grid(path) -> FieldGrid:
    """Parse a grid CSV, validating uniform spacing to 1e-12 relative."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=0)
    header = [c.strip() for c in lines[0].split(",")]
    if header[:2] != ["x", "y"]:
        raise ParseError("grid CSV must start with columns x,y", line=1)
    d = len(header) - 2
    if d < 1 or header[2:] != [f"v{k + 1}" for k in range(d)]:
        raise ParseError(f"expected value columns v1..v{max(d, 1)}, got {header[2:]}", line=1)
    xs, ys, vals = [], [], []
    for ln, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != 2 + d:
            missing = header[len(cells)] if len(cells) < len(header) else None
            what = f"missing column {missing}" if missing else f"expected {2 + d} columns, got {len(cells)}"
            raise ParseError(what, line=ln)
        try:
            nums = [float(c) for c in cells]
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line=ln) from None
        xs.append(nums[0])
        ys.append(nums[1])
        vals.append(nums[2:])
    xs = np.array(xs)
    ys = np.array(ys)
    ux = np.unique(xs)
    uy = np.unique(ys)
    nx, ny = len(ux), len(uy)
    if nx * ny != len(xs):
        raise ParseError(f"inconsistent grid dims: {nx}x{ny} points expected, {len(xs)} rows found", line=len(lines))
    for u, name in ((ux, "x"), (uy, "y")):
        if len(u) > 1:
            du = np.diff(u)
            if np.max(np.abs(du - du[0])) > 1e-12 * max(abs(du[0]), 1e-300):
                raise ParseError(f"non-uniform spacing along {name}", line=len(lines))
    values = np.array(vals).reshape(ny, nx, d).transpose(1, 0, 2)
    hx = ux[1] - ux[0] if nx > 1 else 1.0
    hy = uy[1] - uy[0] if ny > 1 else 1.0
    return FieldGrid(origin=(ux[0], uy[0]), spacing=(hx, hy), values=values)


def write_lattice(lat: LatticeField, path):
    """Lattice CSV: header n1,n2,v1..vd; integer sites."""
    d = lat.ncomp
    with open(path, "w") as fh:
        fh.write("n1,n2," + ",".join(f"v{k + 1}" for k in range(d)) + "\n")
        for n2 in range(lat.extent[1]):
            for n1 in range(lat.extent[0]):
                row = [str(n1), str(n2)] + [_fmt(c) for c in lat.values[n1, n2]]
                fh.write(",".join(row) + "\n")


def read_lattice(path) -> LatticeField:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=0)
    header = [c.strip() for c in lines[0].split(",")]
    if header[:2] != ["n1", "n2"]:
        raise ParseError("lattice CSV must start with columns n1,n2", line=1)
    d = len(header) - 2
    if d not in (3, 4) or header[2:] != [f"v{k + 1}" for k in range(d)]:
        raise ParseError(f"expected value columns v1..v{max(d, 1)}, got {header[2:]}", line=1)
    sites, vals = [], []
    for ln, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != 2 + d:
            raise ParseError(f"expected {2 + d} columns, got {len(cells)}", line=ln)
        try:
            n1, n2 = int(cells[0]), int(cells[1])
            nums = [float(c) for c in cells[2:]]
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line=ln) from None
        sites.append((n1, n2))
        vals.append(nums)
    n1s = sorted({s[0] for s in sites})
    n2s = sorted({s[1] for s in sites})
    m1, m2 = len(n1s), len(n2s)
    if n1s != list(range(m1)) or n2s != list(range(m2)) or m1 * m2 != len(sites):
        raise ParseError("lattice sites must cover a full rectangle [0,M1)x[0,M2)", line=len(lines))
    values = np.empty((m1, m2, d))
    for (n1, n2), row in zip(sites, vals):
        values[n1, n2] = row
    return LatticeField(values=values)
