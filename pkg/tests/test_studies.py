import math

import numpy as np
import pytest

from swgalerkin import swsolver
from swgalerkin.mesh import uniform_mesh
from swgalerkin.mms import get_mms
from swgalerkin.projection import Projector, error_norms
from swgalerkin.spline import SplineSpace
from swgalerkin.studies import (
    PROJECTION_COLUMNS,
    RateTable,
    gram_distance,
    order,
    projection_study,
    smooth_target,
    spatial_study,
    temporal_study,
)


def test_order_examples():
    assert order(1.1057e-06, 5.6700e-07, 1 / 160, 1 / 200) == pytest.approx(2.993, abs=5e-4)
    assert order(3e-5, 3e-5, 0.1, 0.05) == 0.0
    assert order(2.0, 1.0, 0.2, 0.1) == pytest.approx(1.0)
    assert math.isnan(order(0.0, 1.0, 0.2, 0.1))
    assert math.isnan(order(-1.0, 1.0, 0.2, 0.1))
    with pytest.raises(ValueError):
        order(1.0, 2.0, 0.1, 0.1)


def test_rate_table_csv_layout():
    t = RateTable(("L2_eta", "Linf_eta", "H1_eta", "L2_u", "Linf_u", "H1_u"))
    t.add_row(10, 0.1, dict.fromkeys(t.columns, 1e-3))
    t.add_row(20, 0.05, None)
    t.add_row(40, 0.025, dict.fromkeys(t.columns, 1e-5))
    lines = t.to_csv().splitlines()
    assert lines[0] == ("resolution,L2_eta,rate_L2_eta,Linf_eta,rate_Linf_eta,H1_eta,rate_H1_eta,"
                        "L2_u,rate_L2_u,Linf_u,rate_Linf_u,H1_u,rate_H1_u")
    assert lines[1].split(",")[2] == "-"
    assert lines[2].split(",")[1:3] == ["diverged", "-"]
    assert lines[3].split(",")[2] == "-"
    assert t.diverged
    assert "diverged" in t.format()
    # diverged rows are omitted from plot data
    plot = t.to_plot_data().splitlines()
    assert len(plot) == 3 and plot[0].startswith("#")


def test_rate_table_finite_orders():
    t = RateTable(("L2",))
    for n, e in [(8, 1e-2), (16, 6.25e-4), (32, 3.9e-5)]:
        t.add_row(n, 1 / n, {"L2": e})
    rates = t.rates("L2")
    assert math.isnan(rates[0])
    assert all(math.isfinite(q) for q in rates[1:])
    assert rates[1] == pytest.approx(4.0)


def test_spatial_study_still_water():
    t = spatial_study(r=4, family="quasi-a", N_list=(4, 8), T=0.1, lam=0.05, mms_id=0)
    assert t.status == ["ok", "ok"]
    for c in t.columns:
        assert np.all(t.column(c) == 0.0)


def test_spatial_study_diverged_row_kept():
    t = spatial_study(r=4, family="quasi-a", N_list=(8, 16), T=1.0, lam=2.0, mms_id=1)
    assert t.status == ["diverged", "diverged"]
    assert t.diverged


def test_spatial_study_small_rates():
    t = spatial_study(r=4, family="uniform", N_list=(8, 16), T=0.2, k=0.002, mms_id=2)
    assert t.metadata["study"] == "spatial"
    q = t.rates("L2_eta")[1]
    assert 2.5 < q < 4.5


def test_temporal_study_single_reference_run(monkeypatch):
    calls = []
    original = swsolver.ShallowWaterGalerkin.evolve

    def counting(self, state, k, n, forcing=None):
        calls.append(n)
        return original(self, state, k, n, forcing)

    monkeypatch.setattr(swsolver.ShallowWaterGalerkin, "evolve", counting)
    t = temporal_study(r=4, family="uniform", N=8, M_list=[20, 25, 30], M_ref=120, T=0.5)
    assert calls.count(120) == 1 and len(calls) == 4
    assert t.metadata["E_ref_eta"] > 0
    assert t.resolution == [20, 25, 30]
    np.testing.assert_allclose(t.measure, [0.025, 0.02, 0.5 / 30])


def test_temporal_study_rejects_small_reference():
    with pytest.raises(ValueError):
        temporal_study(N=8, M_list=[20, 40], M_ref=40)


def test_estar_of_identical_runs_is_zero():
    mms = get_mms(2)
    s = swsolver.ShallowWaterGalerkin(uniform_mesh(8), 4, 2)
    a = s.evolve(s.mms_initial_state(mms), 0.05, 20, mms)
    b = s.evolve(s.mms_initial_state(mms), 0.05, 20, mms)
    assert gram_distance(s.eta_proj.mass, a.eta.coeffs, b.eta.coeffs) == 0.0


def test_gram_distance_matches_quadrature():
    space = SplineSpace(uniform_mesh(6), 4, 2)
    proj = Projector(space)
    rng = np.random.default_rng(4)
    a, b = rng.standard_normal((2, space.dim))
    direct = np.sqrt(proj.wq @ (proj.values(a) - proj.values(b)) ** 2)
    assert gram_distance(proj.mass, a, b) == pytest.approx(direct, rel=1e-12)


def test_projection_study_smooth_cubic_h3_order():
    t = projection_study(r=4, family="quasi-a", N_list=(16, 32, 64), target="smooth")
    assert t.columns == PROJECTION_COLUMNS
    assert t.rates("H3full")[-1] == pytest.approx(1.0, abs=0.05)
    assert t.rates("L2")[-1] == pytest.approx(4.0, abs=0.1)


def test_projection_study_rows_match_direct_call():
    t = projection_study(r=4, family="uniform", N_list=(9,), target="smooth")
    space = SplineSpace(uniform_mesh(9), 4, 2)
    pf = Projector(space).project(smooth_target)
    e = error_norms(pf, smooth_target, [smooth_target.derivative(d) for d in (1, 2, 3)])
    assert t.errors[0] == e


def test_projection_study_validation():
    with pytest.raises(ValueError):
        projection_study(r=3, mu=1, N_list=(8,))
    with pytest.raises(ValueError):
        projection_study(target="rough", N_list=(8,))


def test_parallel_rows_match_serial():
    kw = dict(r=4, family="uniform", N_list=(9, 17), target="nonsmooth")
    assert projection_study(n_jobs=2, **kw).errors == projection_study(**kw).errors
