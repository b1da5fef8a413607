"""Classical affine gauge: integration, forms, lift."""

import numpy as np
import pytest

from plmkit.affine import (
    AffineSurfacePair,
    affine_forms,
    classical_lelieuvre_integrate,
    closure_residual,
    lift_affine,
)
from plmkit.errors import ChartMismatchError, ClosureError, DomainError
from plmkit.fields import FieldGrid, jet_grid
from plmkit.scenarios import scenario
from plmkit.smooth import ChartKind, det_families, plm_residual

HYPAR = scenario("hypar")


def make_grid(fn, h=0.05, lo=-1.0, hi=1.0):
    n = int(round((hi - lo) / h)) + 1
    xs = lo + h * np.arange(n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    return FieldGrid(origin=(lo, lo), spacing=(h, h), values=fn(X, Y))


def saddle_nu(X, Y):
    return np.stack([-Y, -X, np.ones_like(X)], axis=-1)


def test_closure_holds_on_saddle_conormal():
    res, u4 = closure_residual(HYPAR.nu3_grid)
    assert np.max(res) < 1e-12
    assert np.max(np.abs(u4)) < 1e-10  # nu_xy = 0 here


def test_integration_reproduces_saddle_within_quadrature_error():
    h = HYPAR.meta["h"]
    nu = HYPAR.nu3_grid
    f0 = HYPAR.f3_grid.values[0, 0]
    f = classical_lelieuvre_integrate(nu, f0)
    err = np.max(np.abs(f.values - HYPAR.f3_grid.values))
    assert err <= 5 * h * h  # trapezoid-level accuracy bound
    # on the bilinear saddle the edge-product rule is actually exact
    assert err < 1e-13


def test_integration_rejects_nonintegrable_conormal():
    grid = make_grid(lambda X, Y: np.stack([-Y, -X, 1 + X**2 * Y**2], axis=-1), h=0.1)
    with pytest.raises(ClosureError) as exc:
        classical_lelieuvre_integrate(grid, np.zeros(3))
    assert exc.value.site is not None


def test_integration_rejects_unsupported_signature():
    with pytest.raises(DomainError):
        classical_lelieuvre_integrate(HYPAR.nu3_grid, np.zeros(3), sigma=-1)


def test_forms_ground_truth_on_saddle():
    forms, rep = affine_forms(AffineSurfacePair(f=HYPAR.f3_grid, nu=HYPAR.nu3_grid))
    assert rep.passed
    assert np.max(np.abs(forms.F - HYPAR.ground_truth["blaschke_F"])) < 1e-10
    assert np.max(np.abs(forms.A_cubic)) < 1e-10
    assert np.max(np.abs(forms.B_cubic)) < 1e-10


def test_forms_report_includes_squared_relations():
    _, rep = affine_forms(AffineSurfacePair(f=HYPAR.f3_grid, nu=HYPAR.nu3_grid))
    for name in (
        "blaschke_pairing",
        "cubic_pairing_x",
        "cubic_pairing_y",
        "blaschke_squared",
        "cubic_squared_x",
        "cubic_squared_y",
        "lift_mixed_det_is_F_squared",
    ):
        assert rep[name].passed, name


def test_forms_wrong_sign_cubic_radicand_rejected():
    # det|bf_x, bf_xx, bf_xxx| = -12 for this position field: the cubic
    # radicand has the wrong sign, so the data is not in this chart
    bad_f = make_grid(lambda X, Y: np.stack([X, X**3, X**2 + Y], axis=-1), h=0.1)
    nu = make_grid(saddle_nu, h=0.1)
    with pytest.raises(ChartMismatchError):
        affine_forms(AffineSurfacePair(f=bad_f, nu=nu))


def test_pair_validation():
    with pytest.raises(DomainError):
        AffineSurfacePair(f=HYPAR.f3_grid, nu=HYPAR.nu_grid)  # 4 components
    shifted = FieldGrid(origin=(5.0, 5.0), spacing=HYPAR.nu3_grid.spacing, values=HYPAR.nu3_grid.values)
    with pytest.raises(DomainError):
        AffineSurfacePair(f=HYPAR.f3_grid, nu=shifted)


def test_lift_satisfies_projective_relations():
    f4, nu4 = lift_affine(AffineSurfacePair(f=HYPAR.f3_grid, nu=HYPAR.nu3_grid))
    rep = plm_residual(f4, nu4, chart=ChartKind.ASYMPTOTIC)
    assert rep.max_residual() < 1e-10
    jets = jet_grid(nu4, order=2)
    # homogeneous mixed determinant equals F^2 = 1 on the saddle
    assert np.allclose(det_families(jets, "mixed"), 1.0, atol=1e-10)
