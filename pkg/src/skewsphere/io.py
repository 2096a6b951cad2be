"""File formats and configuration.

Config files are flat ``section.key = value`` text; ``#`` starts a comment.
Every key can be overridden by an environment variable named
``SKEWSPHERE_<SECTION>__<KEY>`` (upper case, the dot replaced by a double
underscore).  Values are parsed as bool/int/float/comma-list when they look
like one, otherwise kept as strings.

Data CSVs use the long format
``replicate_id, site_id, lon_deg, lat_deg, component, value``; a wide
variant with one trailing column per component is also accepted.  Site
lists are ``site_id, lon_deg, lat_deg``.  All files are UTF-8 with LF
newlines.
"""

import csv
import json
import os

import numpy as np

from .corrmodels import CorrelationSpec
from .errors import ConfigError, ShapeError
from .model import MultivariateObservations, ParameterVector
from .sphere import SiteSet

ENV_PREFIX = "SKEWSPHERE_"


def _parse_value(raw: str):
    text = raw.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if "," in text:
        return [_parse_value(part) for part in text.split(",")]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def load_config(path) -> dict:
    """Parse a flat key-value config file and apply env overrides."""
    config = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = stripped.partition("=")
            config[key.strip()] = _parse_value(raw)
    for env_key, raw in os.environ.items():
        if not env_key.startswith(ENV_PREFIX):
            continue
        body = env_key[len(ENV_PREFIX):]
        if "__" not in body:
            continue
        section, _, key = body.partition("__")
        config[f"{section.lower()}.{key.lower()}"] = _parse_value(raw)
    return config


def config_get(config: dict, key: str, default=None, required=False):
    if key in config:
        return config[key]
    if required:
        raise ConfigError(f"missing required config key: {key}")
    return default


def as_float_list(value, name="value"):
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, list):
        return [float(v) for v in value]
    raise ConfigError(f"{name} must be a number or comma list, got {value!r}")


def write_sites_csv(path, sites: SiteSet):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["site_id", "lon_deg", "lat_deg"])
        for idx, site in enumerate(sites):
            writer.writerow([idx, f"{site.lon:.10g}", f"{site.lat:.10g}"])


def read_sites_csv(path) -> SiteSet:
    lons, lats = [], []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            lons.append(float(row["lon_deg"]))
            lats.append(float(row["lat_deg"]))
    return SiteSet.from_lonlat(lons, lats)


def write_observations_csv(path, sites: SiteSet, obs: MultivariateObservations,
                           replicate_ids=None):
    """Long-format observations for the given replicates (default: all)."""
    reps = range(obs.n_reps) if replicate_ids is None else replicate_ids
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["replicate_id", "site_id", "lon_deg", "lat_deg", "component", "value"]
        )
        for rep in reps:
            for comp in range(obs.m):
                for k, site in enumerate(sites):
                    writer.writerow([
                        rep, k, f"{site.lon:.10g}", f"{site.lat:.10g}",
                        comp + 1, repr(float(obs.values[rep, comp, k])),
                    ])


def read_observations_csv(paths):
    """Read one or more observation CSVs (long or wide format).

    Returns (sites, observations); replicates are ordered by replicate_id
    and file order, sites by first appearance.
    """
    if isinstance(paths, (str, os.PathLike)):
        paths = [paths]
    site_order = {}
    site_coords = []
    records = []  # (file index, replicate_id, site index, component, value)
    for file_idx, path in enumerate(paths):
        with open(path, "r", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ShapeError(f"{path}: empty CSV")
            fields = [f.strip() for f in reader.fieldnames]
            base = {"replicate_id", "site_id", "lon_deg", "lat_deg"}
            long_format = "component" in fields and "value" in fields
            wide_cols = [f for f in fields if f not in base | {"component", "value"}]
            for row in reader:
                key = (row["site_id"], row["lon_deg"], row["lat_deg"])
                if key not in site_order:
                    site_order[key] = len(site_coords)
                    site_coords.append((float(row["lon_deg"]), float(row["lat_deg"])))
                k = site_order[key]
                rep = int(row["replicate_id"])
                if long_format:
                    comp = int(row["component"]) - 1
                    records.append((file_idx, rep, k, comp, float(row["value"])))
                else:
                    for comp, col in enumerate(wide_cols):
                        records.append((file_idx, rep, k, comp, float(row[col])))
    if not records:
        raise ShapeError("no observation records found")
    n = len(site_coords)
    m = max(r[3] for r in records) + 1
    rep_keys = sorted({(r[0], r[1]) for r in records})
    rep_index = {key: idx for idx, key in enumerate(rep_keys)}
    values = np.full((len(rep_keys), m, n), np.nan)
    for file_idx, rep, k, comp, value in records:
        values[rep_index[(file_idx, rep)], comp, k] = value
    if np.isnan(values).any():
        raise ShapeError("observation table has gaps (site/component missing)")
    sites = SiteSet.from_lonlat(*zip(*site_coords))
    return sites, MultivariateObservations(values)


def params_to_dict(p: ParameterVector) -> dict:
    out = {
        "family": p.corr.family,
        "sigma2": p.sigma2.tolist(),
        "eta": p.eta.tolist(),
        "mu": p.mu.tolist(),
        "scales": p.corr.scales.tolist(),
    }
    if p.m == 2:
        out["rho12"] = p.corr.rho12
    else:
        out["rho_matrix"] = p.corr.rho_matrix.tolist()
    return out


def params_from_dict(d: dict) -> ParameterVector:
    cross = d.get("rho12") if "rho12" in d else np.asarray(d["rho_matrix"])
    corr = CorrelationSpec(d["family"], np.asarray(d["scales"], dtype=float), cross)
    return ParameterVector(
        np.asarray(d["sigma2"], dtype=float),
        np.asarray(d["eta"], dtype=float),
        np.asarray(d["mu"], dtype=float),
        corr,
    )


def write_json(path, payload: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
