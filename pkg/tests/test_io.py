import numpy as np
import pytest

from conftest import make_params
from skewsphere import MultivariateObservations, lonlat_grid, simulate_field
from skewsphere.errors import ConfigError, ShapeError
from skewsphere.io import (
    load_config,
    params_from_dict,
    params_to_dict,
    read_json,
    read_observations_csv,
    read_sites_csv,
    write_json,
    write_observations_csv,
    write_sites_csv,
)


def test_config_parsing(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        """
# a comment
model.family = askey
model.sigma2 = 1.0, 2.0   # trailing comment
simulate.n_reps = 10
fit.share_scale = true
fit.gaussian = off
threads = 0
name.key = plain_string
""",
        encoding="utf-8",
    )
    config = load_config(cfg)
    assert config["model.family"] == "askey"
    assert config["model.sigma2"] == [1.0, 2.0]
    assert config["simulate.n_reps"] == 10
    assert config["fit.share_scale"] is True
    assert config["fit.gaussian"] is False
    assert config["threads"] == 0
    assert config["name.key"] == "plain_string"


def test_config_env_override(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("simulate.n_reps = 10\n", encoding="utf-8")
    monkeypatch.setenv("SKEWSPHERE_SIMULATE__N_REPS", "3")
    monkeypatch.setenv("SKEWSPHERE_MODEL__RHO12", "0.25")
    config = load_config(cfg)
    assert config["simulate.n_reps"] == 3
    assert config["model.rho12"] == 0.25


def test_config_rejects_garbage(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this line has no equals sign\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(cfg)


def test_sites_csv_round_trip(tmp_path):
    sites = lonlat_grid(5, 3, -60.0, 60.0)
    path = tmp_path / "sites.csv"
    write_sites_csv(path, sites)
    back = read_sites_csv(path)
    assert back.n == sites.n
    assert np.allclose(back.unit_vecs, sites.unit_vecs, atol=1e-12)


def test_observations_long_round_trip(tmp_path):
    p = make_params()
    sites = lonlat_grid(4, 3, -50.0, 50.0)
    obs = simulate_field(p, sites, 2, seed=3)
    path = tmp_path / "obs.csv"
    write_observations_csv(path, sites, obs)
    back_sites, back_obs = read_observations_csv(path)
    assert back_sites.n == sites.n
    assert back_obs.values.shape == obs.values.shape
    assert np.array_equal(back_obs.values, obs.values)  # repr round-trips floats


def test_observations_wide_format(tmp_path):
    path = tmp_path / "wide.csv"
    path.write_text(
        "replicate_id,site_id,lon_deg,lat_deg,tmin,tmax\n"
        "0,0,0.0,0.0,1.5,2.5\n"
        "0,1,10.0,0.0,-0.5,0.25\n",
        encoding="utf-8",
    )
    sites, obs = read_observations_csv(path)
    assert sites.n == 2
    assert obs.m == 2
    assert obs.values[0, 0, 0] == 1.5
    assert obs.values[0, 1, 1] == 0.25


def test_observations_multiple_files_are_replicates(tmp_path):
    p = make_params()
    sites = lonlat_grid(3, 2, -30.0, 30.0)
    obs = simulate_field(p, sites, 2, seed=5)
    paths = []
    for rep in range(2):
        path = tmp_path / f"rep{rep}.csv"
        write_observations_csv(
            path, sites, MultivariateObservations(obs.values[rep : rep + 1])
        )
        paths.append(path)
    _, back = read_observations_csv(paths)
    assert back.n_reps == 2
    assert np.array_equal(back.values, obs.values)


def test_observations_gap_detection(tmp_path):
    path = tmp_path / "gappy.csv"
    path.write_text(
        "replicate_id,site_id,lon_deg,lat_deg,component,value\n"
        "0,0,0.0,0.0,1,1.5\n"
        "0,1,10.0,0.0,1,0.5\n"
        "0,0,0.0,0.0,2,2.5\n",
        encoding="utf-8",
    )
    with pytest.raises(ShapeError):
        read_observations_csv(path)


def test_params_json_round_trip(tmp_path, exp_mixed_params):
    path = tmp_path / "params.json"
    write_json(path, params_to_dict(exp_mixed_params))
    back = params_from_dict(read_json(path))
    assert np.allclose(back.sigma2, exp_mixed_params.sigma2)
    assert np.allclose(back.eta, exp_mixed_params.eta)
    assert back.corr.family == "exponential"
    assert back.corr.rho12 == exp_mixed_params.corr.rho12
