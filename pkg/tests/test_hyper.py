"""Hypersurface correspondence in dimensions n = 2 and 3."""

import numpy as np
import pytest

from plmkit.errors import DegeneratePointError, DomainError, PivotMismatchError
from plmkit.hyper import (
    AMatrix,
    HyperGrid,
    HyperJet,
    hyper_compat_residual,
    hyper_jet_grid,
    hyper_plm_residual,
    hyper_reconstruct,
    read_amatrix_field,
    read_hyper_grid,
    recover_A,
    write_amatrix_field,
    write_hyper_grid,
)
from plmkit.projective import projective_distance
from plmkit.scenarios import scenario
from plmkit.smooth import ChartKind, reconstruct_field

ELL = scenario("ell-paraboloid")


def hypar_hyper_jets(h=0.1, n=11):
    """The bilinear saddle as an n = 2 system with A antidiagonal(-2)."""
    xs = h * np.arange(n) - 0.5
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    one, zero = np.ones_like(X), np.zeros_like(X)
    nval = np.stack([-Y, -X, one, -X * Y], axis=-1)
    nd1 = np.stack(
        [np.stack([zero, -one, zero, -Y], axis=-1), np.stack([-one, zero, zero, -X], axis=-1)],
        axis=-2,
    )
    z4 = np.zeros(X.shape + (4,))
    e4 = np.stack([zero, zero, zero, -one], axis=-1)
    nd2 = np.stack([np.stack([z4, e4], axis=-2), np.stack([e4, z4], axis=-2)], axis=-3)
    fval = np.stack([X, Y, X * Y, -one], axis=-1)
    return HyperJet(value=nval, d1=nd1, d2=nd2), fval, xs


def paraboloid3_jets(h=0.25, n=5):
    """Elliptic paraboloid in R^4 as an n = 3 system with A = I."""
    xs = h * np.arange(n) - 0.5
    X1, X2, X3 = np.meshgrid(xs, xs, xs, indexing="ij")
    R = (X1**2 + X2**2 + X3**2) / 2
    one, zero = np.ones_like(X1), np.zeros_like(X1)
    Xs = [X1, X2, X3]
    fval = np.stack(Xs + [R, -one], axis=-1)
    fd1 = np.stack(
        [np.stack([one * (a == b) for b in range(3)] + [Xs[a], zero], axis=-1) for a in range(3)],
        axis=-2,
    )
    e4 = np.stack([zero, zero, zero, one, zero], axis=-1)
    z5 = np.zeros(X1.shape + (5,))
    fd2 = np.stack(
        [np.stack([e4 if a == c else z5 for c in range(3)], axis=-2) for a in range(3)], axis=-3
    )
    nval = np.stack([-X1, -X2, -X3, one, -R], axis=-1)
    nd1 = np.stack(
        [np.stack([-one * (a == b) for b in range(3)] + [zero, -Xs[a]], axis=-1) for a in range(3)],
        axis=-2,
    )
    e5 = np.stack([zero, zero, zero, zero, -one], axis=-1)
    nd2 = np.stack(
        [np.stack([e5 if a == c else z5 for c in range(3)], axis=-2) for a in range(3)], axis=-3
    )
    return HyperJet(value=fval, d1=fd1, d2=fd2), HyperJet(value=nval, d1=nd1, d2=nd2)


# --- n = 2 elliptic paraboloid (A = I) ------------------------------------


def test_defining_relation_ell_paraboloid():
    rep = hyper_plm_residual(ELL.hyper_f_jet, ELL.hyper_nu_jet, ELL.amatrix)
    assert rep.max_residual() < 1e-12
    assert rep.passed


def test_compatibility_ell_paraboloid():
    rep = hyper_compat_residual(ELL.hyper_nu_jet, ELL.amatrix)
    assert rep.max_residual() < 1e-10


def test_recover_A_identity():
    A = recover_A(ELL.hyper_f_jet, ELL.hyper_nu_jet)
    assert A.shape[-2:] == (2, 2)
    diag = np.stack([A[..., 0, 0], A[..., 1, 1]], axis=-1)
    off = np.stack([A[..., 0, 1], A[..., 1, 0]], axis=-1)
    assert np.max(np.abs(np.abs(diag) - 1.0)) < 1e-10
    assert np.max(np.abs(off)) < 1e-12


def test_round_trip_recovered_A_reconstructs():
    A = recover_A(ELL.hyper_f_jet, ELL.hyper_nu_jet)
    f = hyper_reconstruct(ELL.hyper_nu_jet, A)
    assert np.max(projective_distance(f, ELL.hyper_f_jet.value)) < 1e-12


# --- n = 2 reduction to the smooth asymptotic chart -----------------------


def test_antidiagonal_reduction_matches_smooth_chart():
    nj, fval, _ = hypar_hyper_jets()
    A = AMatrix([[0.0, -2.0], [-2.0, 0.0]])
    f = hyper_reconstruct(nj, A, pivot=(1, 2))
    assert np.max(projective_distance(f, fval)) < 1e-12
    smooth_f, bad = reconstruct_field(scenario("hypar").nu_jets, ChartKind.ASYMPTOTIC)
    assert not bad.any()
    # same surface from both code paths
    f_here = hyper_reconstruct(nj, A, pivot=(2, 1))
    assert np.max(projective_distance(f_here, f)) < 1e-12


def test_pivot_independence():
    nj, _, _ = hypar_hyper_jets()
    A = AMatrix([[0.0, -2.0], [-2.0, 0.0]])
    f12 = hyper_reconstruct(nj, A, pivot=(1, 2))
    f21 = hyper_reconstruct(nj, A, pivot=(2, 1))
    assert np.max(projective_distance(f12, f21)) < 1e-12


def test_degenerate_pivot_rejected():
    nj, _, _ = hypar_hyper_jets()
    A = AMatrix([[0.0, -2.0], [-2.0, 0.0]])
    # the (1,1) second partial vanishes on the saddle: degenerate pivot
    with pytest.raises(DegeneratePointError):
        hyper_reconstruct(nj, A, pivot=(1, 1))


def test_pivot_sign_mismatch_rejected():
    A = AMatrix([[-1.0, 0.5], [0.5, -1.0]])
    with pytest.raises(PivotMismatchError):
        hyper_reconstruct(ELL.hyper_nu_jet, A, pivot=(1, 1))


def test_homogeneity_of_reconstruction():
    jet = ELL.hyper_nu_jet
    lam = 1.7
    scaled = HyperJet(value=lam * jet.value, d1=lam * jet.d1, d2=lam * jet.d2)
    f1 = hyper_reconstruct(jet, ELL.amatrix)
    f2 = hyper_reconstruct(scaled, ELL.amatrix)
    assert np.max(projective_distance(f1, f2)) < 1e-12


# --- n = 3 ----------------------------------------------------------------


def test_n3_defining_relation_and_recovery():
    # with an odd parameter count the same paraboloid pair carries -I
    fj, nj = paraboloid3_jets()
    An = AMatrix(-np.eye(3))
    rep = hyper_plm_residual(fj, nj, An)
    assert rep.max_residual() < 1e-12
    A = recover_A(fj, nj)
    assert np.max(np.abs(A + np.eye(3))) < 1e-10
    f = hyper_reconstruct(nj, An)
    assert np.max(projective_distance(f, fj.value)) < 1e-12


def test_n3_compatibility():
    fj, nj = paraboloid3_jets()
    rep = hyper_compat_residual(nj, AMatrix(-np.eye(3)))
    assert rep.max_residual() < 1e-10


# --- finite differences and I/O ------------------------------------------


def test_fd_jets_match_analytic():
    grid = ELL.hyper_nu_grid
    jets = hyper_jet_grid(grid, stencil=2)
    an = ELL.hyper_nu_jet
    sl = (slice(1, -1), slice(1, -1))
    # quadratic components: second-order stencils are exact
    assert np.max(np.abs(jets.value - an.value[sl])) < 1e-12
    assert np.max(np.abs(jets.d1 - an.d1[sl])) < 1e-10
    assert np.max(np.abs(jets.d2 - an.d2[sl])) < 1e-9


def test_fd_reconstruction_close():
    jets = hyper_jet_grid(ELL.hyper_nu_grid, stencil=2)
    f = hyper_reconstruct(jets, ELL.amatrix)
    sl = (slice(1, -1), slice(1, -1))
    assert np.max(projective_distance(f, ELL.hyper_f_jet.value[sl])) < 1e-9


def test_amatrix_guards():
    with pytest.raises(DomainError):
        AMatrix([[1.0, 1.0], [1.0, 1.0]])  # singular
    with pytest.raises(DomainError):
        AMatrix(np.eye(5))  # n out of supported range


def test_hyper_grid_csv_round_trip(tmp_path):
    path = tmp_path / "nu.csv"
    write_hyper_grid(ELL.hyper_nu_grid, path)
    g2 = read_hyper_grid(path)
    assert g2.n == 2
    assert np.array_equal(g2.values, ELL.hyper_nu_grid.values)


def test_amatrix_field_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    field = rng.standard_normal((4, 3, 2, 2))
    path = tmp_path / "A.csv"
    write_amatrix_field((0.0, 0.0), (0.1, 0.1), field, path)
    origin, spacing, field2 = read_amatrix_field(path)
    assert np.array_equal(field2, field)
    assert tuple(origin) == (0.0, 0.0)
