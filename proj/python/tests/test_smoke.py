import math

import numpy as np
import pytest

import vvlc


def test_lambertian_and_white_point():
    assert vvlc.lambertian_order(60.0) == pytest.approx(1.0)
    assert vvlc.lambertian_order(20.0) == pytest.approx(11.143, abs=1e-3)
    x, y = vvlc.white_point(6500.0)
    assert abs(x - 0.3135) < 5e-3 and abs(y - 0.3236) < 5e-3


def test_mueller_first_row():
    m = vvlc.mueller_from_jones(0.8, 0.4, 0.3)
    assert m.shape == (4, 4)
    assert m[0, 0] == pytest.approx(0.6)
    assert m[0, 1] == pytest.approx(0.2)


def test_slnr_beats_random_directions():
    rng = np.random.default_rng(3)
    h = rng.uniform(0, 1, (4, 4))
    l = rng.uniform(0, 1, (4, 4))
    l = l.T @ l
    f, _, slnr = vvlc.solve_slnr(h, l, 0.1, 0.5, 1.0)
    assert np.linalg.norm(f) == pytest.approx(1.0)
    for _ in range(500):
        g = rng.normal(size=4)
        g /= np.linalg.norm(g)
        assert vvlc.slnr_objective(h, l, 0.1, 0.5, 1.0, g) <= slnr * (1 + 1e-9)


def test_ber_helpers():
    k = vvlc.kappa_for_ber(1e-3)
    assert vvlc.ber_4pam(k) == pytest.approx(1e-3)
    assert vvlc.ber_4pam_exact(k) <= 1e-3
    assert 0.0 <= vvlc.ber_4pam_monte_carlo(1.0, 10000, 1) <= 0.5


def test_scenario_round_trip():
    s = vvlc.Scenario.defaults()
    back = vvlc.Scenario.from_json(s.to_json())
    assert back.hash == s.hash
    assert vvlc.Scenario.defaults("wiretap").mode == "wiretap"
    with pytest.raises(ValueError):
        vvlc.Scenario.from_json('{"unknown": 1}')


def test_sumrate_ordering_at_top_power():
    s = vvlc.Scenario.defaults()
    s.ptx_dbm = [60.0]
    rows = {r["variant"]: r["sum_rate"] for r in vvlc.sumrate_sweep(s)}
    assert set(rows) == set(vvlc.sumrate_variants())
    assert rows["slnr_gnp_ao"] >= rows["slnr_gnp_noao"] >= rows["slnr_nognp"]
    assert rows["slnr_gnp_ao"] >= rows["mrt_gnp"]


def test_condition_number_and_experiment(tmp_path):
    s = vvlc.Scenario.defaults()
    (d, c), = vvlc.condition_sweep(s, [20.0])
    assert d == 20.0 and c > 1e3
    files = vvlc.run_experiment(s, "chromaticity", tmp_path)
    text = open(files[0]).read().splitlines()
    assert text[0] == f"# config_hash={s.hash} seed=1"
    assert text[1] == "u,i,K_selected,x,y"
    with pytest.raises(ValueError):
        vvlc.run_experiment(s, "nope", tmp_path)
