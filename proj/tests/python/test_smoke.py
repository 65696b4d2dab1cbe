import smaflow


def test_enthalpy_roundtrip():
    p = smaflow.MaterialParams()
    for theta in (0.1, 0.7, 1.0, 3.5):
        v = smaflow.g_of_theta(p, theta)
        assert abs(smaflow.zeta_of_enthalpy(p, v) - theta) < 1e-12
    assert smaflow.zeta_of_enthalpy(p, -1.0) == 0.0


def test_validate_params_names_the_violation():
    p = smaflow.MaterialParams()
    p.beta1 = 2.0
    violations = smaflow.validate_params(p)
    assert len(violations) == 1
    assert "beta1" in violations[0]


def test_prox_worked_value():
    p = smaflow.MaterialParams()  # rho = 0.5, eta_z = 1
    # shrink: (|r| - rho) / ((eta_z / dt) |r|) * r = 1.5 / 20 * 2
    d = smaflow.prox_flow(p, smaflow.DevTensor(2.0, 0.0), 0.1, 1.0)
    assert abs(d.a - 0.15) < 1e-15
    assert d.b == 0.0
    stuck = smaflow.prox_flow(p, smaflow.DevTensor(0.3, 0.0), 0.1, 1.0)
    assert stuck.a == 0.0 and stuck.b == 0.0


def test_config_parse_and_reject():
    cfg = smaflow.parse_config("[mesh]\nnx = 4\nny = 4\n[time]\ndt = 0.05\nt_end = 0.1\n")
    assert cfg.nx == 4 and cfg.dt == 0.05
    try:
        smaflow.parse_config("[material]\nbeta1 = 2\n")
    except ValueError as e:
        assert ">= 4" in str(e)
    else:
        raise AssertionError("expected ConfigError")


def test_tiny_run_ledger():
    cfg = smaflow.parse_config("[mesh]\nnx = 4\nny = 4\n[time]\ndt = 0.05\nt_end = 0.1\n")
    out = smaflow.run(cfg)
    assert len(out["t"]) == 3
    assert out["t"][0] == 0.0
    assert all(v > 0.0 for v in out["min_theta"])
    assert all(v >= 0.0 for v in out["entropy_prod"])
    assert len(out["final"]["vartheta"]) == 25


def test_material_point_elastic_cycle():
    p = smaflow.MaterialParams()
    path = smaflow.MaterialPointConfig()
    path.dev_amp = 0.9 * p.rho / (4.0 * p.mu)
    path.cycles = 1
    path.steps_per_cycle = 100
    out = smaflow.material_point_run(p, path, path.period / 100.0, 1.0)
    assert out["loop_dissipation"] == 0.0
    assert abs(out["loop_area"]) < 1e-10
    assert all(a == 0.0 for a in out["z_a"])
    assert out["D_cum"][-1] == 0.0
