"""Smoke tests for the compiled taxisim module."""

import math

import pytest

import taxisim


def test_grid_counts_and_volume():
    spec = taxisim.DomainSpec.box2d(0.0, 1.0, 0.0, 1.0)
    g = taxisim.build_grid(spec, [10, 10, 1])
    assert g.num_active == 100
    assert g.num_faces == 180
    assert taxisim.active_volume(g) == pytest.approx(1.0, rel=1e-14)

    disk = taxisim.build_grid(taxisim.DomainSpec.disk(0, 0, 1.0, 1.0), [200, 200, 1])
    assert taxisim.active_volume(disk) == pytest.approx(math.pi, rel=0.02)


def test_field_init_and_extrema():
    g = taxisim.build_grid(taxisim.DomainSpec.box2d(0, 1, 0, 1), [10, 10, 1])
    f = taxisim.init_field(g, taxisim.InitialData.gaussian(20.0, 30.0))
    lo, hi = taxisim.field_extrema(f)
    assert 0.0 <= lo <= hi <= 20.0
    assert f[0] == pytest.approx(20.0 * math.exp(-30.0 * 2 * 0.05**2), rel=1e-12)


def test_thresholds_reference_values():
    r = taxisim.thresholds(3, 20.0, 20.0)
    assert r.chi_max_theorem == pytest.approx(1.0 / 300.0, rel=1e-14)
    assert r.reference_baghaei == pytest.approx(0.055536, abs=5e-7)
    assert r.chi_max_theorem < r.chi_sup_limit_attr_rep < r.chi_interval_attraction_only


def test_single_step_conserves_mass_and_bounds():
    g = taxisim.build_grid(taxisim.DomainSpec.disk(0, 0, 1.0, 1.0), [24, 24, 1])
    state = taxisim.make_state(
        g,
        taxisim.InitialData.gaussian(20.0, 30.0),
        taxisim.InitialData.gaussian(20.0, 30.0),
    )
    params = taxisim.ModelParams()
    params.variant = taxisim.ModelVariant.attraction_only
    params.chi = 20.0
    params.dt = 1e-4  # far above the taxis CFL bound: the step must clamp
    params.t_end = 1e-3

    m0 = taxisim.mass(g, state.u)
    out = taxisim.step(state, params, g)
    assert out.cfl_clamped
    assert out.dt_used <= params.dt
    assert taxisim.mass(g, out.state.u) == pytest.approx(m0, rel=1e-10)
    assert taxisim.field_extrema(out.state.u)[0] >= -1e-12
    assert taxisim.field_extrema(out.state.v)[1] <= state.v_sup0 + 1e-9


def test_run_scenario_in_memory():
    s = taxisim.preset_scenario("circle2d")
    s.cells_per_axis = [24, 24, 1]
    s.model.t_end = 1e-4
    s.output_directory = ""
    s.record_every = 1
    summary = taxisim.run_scenario(s)
    assert not summary.halted
    assert summary.steps > 0
    masses = [rec.mass_u for rec in summary.series]
    assert max(masses) - min(masses) <= 1e-8 * masses[0]


def test_run_scenario_writes_outputs(tmp_path):
    s = taxisim.preset_scenario("circle2d")
    s.cells_per_axis = [16, 16, 1]
    s.model.t_end = 5e-5
    s.output_directory = str(tmp_path / "run")
    summary = taxisim.run_scenario(s)
    assert (tmp_path / "run" / "series.csv").exists()
    assert (tmp_path / "run" / "summary.json").exists()
    assert taxisim.check_series_file(str(tmp_path / "run" / "series.csv")) == []
    assert summary.outputs


def test_strict_json_validation():
    s = taxisim.preset_scenario("lyapunov2d")
    text = taxisim.scenario_to_json_text(s)
    back = taxisim.scenario_from_json_text(text, "<py>")
    assert back.name == "lyapunov2d"

    with pytest.raises(ValueError, match="surprise"):
        taxisim.scenario_from_json_text(
            text.replace('{\n', '{\n  "surprise": 1,\n', 1), "<py>"
        )


def test_compare_2d_3d_requires_both_dimensions():
    s = taxisim.preset_scenario("circle2d")
    s.cells_per_axis = [16, 16, 1]
    s.model.t_end = 5e-5
    s.output_directory = ""
    a = taxisim.run_scenario(s)
    with pytest.raises(ValueError):
        taxisim.compare_2d_3d(a, a)


def test_lyapunov_config_and_value():
    params = taxisim.ModelParams()
    params.variant = taxisim.ModelVariant.attraction_repulsion
    params.chi = 1e-3
    params.xi = 1e-3
    cfg = taxisim.default_lyapunov_config(params, 2, 1.0, 1.0, 2.0)
    assert cfg.eps1_sq == pytest.approx(0.2475, rel=1e-12)
    assert cfg.phi_upper_bound() >= 1.0
