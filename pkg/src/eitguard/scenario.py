"""Scenario configuration, presets, phantoms and simulated measurements.

A scenario file is YAML.  Every section is optional when ``preset`` names a
built-in scenario; given sections are merged over the preset, except that a
``partition``, ``domain`` or ``region`` mapping carrying a ``kind``/``shape``
key replaces the preset's mapping wholesale.  Unknown keys are errors.

Setting values are absolute.  Sweep values are fractions: background errors
relative to ``sigma0`` and impedance errors relative to the smallest ``z0``
entry.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import yaml

from .cem import CemSystem
from .mesh import (
    DomainSpec,
    Mesh,
    MeshError,
    Partition,
    SectorGrid,
    TriangleList,
    UniformGrid,
    build_mesh,
    build_partition,
    place_electrodes,
    select_triangles,
)
from .numerics import spectral_norm
from .setting import MODES, RegionOfInterest, SettingAssumptions, SettingError, normalize_polarity

SWEEP_HEADER = (
    "background_error relative to sigma0, impedance_error relative to min(z0); "
    "noise in the spectral norm; delta_star is a supremum (strict inequality)"
)

PRESETS = {
    "fig3": {
        "domain": {"shape": "rectangle", "width": 2.0, "height": 2.0},
        "electrodes": {"count": 36, "coverage": 0.5, "region": "full_boundary"},
        "mesh": {"target_edge_length": 1 / 36},
        "partition": {"kind": "uniform_grid", "nx": 10, "ny": 10},
        "setting": {"sigma0": 1.0, "contrast": 10.0, "z0": 1.0, "sigma_max": 15.0},
        "polarity": "conductive",
        "mode": "nonlinearized",
        "sweep": {"background_error": [0.0, 0.0025], "impedance_error": [0.0, 0.0025]},
    },
    "fig4": {
        "domain": {"shape": "rectangle", "width": 2.0, "height": 2.0},
        "electrodes": {"count": 8, "coverage": 0.25, "region": "lower_edge"},
        "mesh": {"target_edge_length": 1 / 32},
        "partition": {"kind": "uniform_grid", "nx": 6, "ny": 3, "bounds": [-1.0, 1.0, -1.0, 0.0]},
        "setting": {"sigma0": 1.0, "contrast": 10.0, "z0": 1.0, "sigma_max": 12.0},
        "polarity": "conductive",
        "mode": "linearized",
        "sweep": {"background_error": [0.0, 0.0005], "impedance_error": [0.0, 0.0005]},
    },
    "fig5": {
        "domain": {"shape": "disk", "diameter": 0.05},
        "electrodes": {"count": 8, "coverage": 0.47, "region": "lower_half"},
        "mesh": {"target_edge_length": 0.001},
        "partition": {"kind": "sector_grid", "radial": 2, "angular": 4, "region": "lower_half"},
        "setting": {"sigma0": 0.03, "contrast": 0.4, "z0": 0.01, "sigma_max": 0.7},
        "polarity": "conductive",
        "mode": "nonlinearized",
        "sweep": {"background_error": [0.0, 0.05], "impedance_error": [0.0, 0.05]},
    },
}
PRESETS["fig6"] = copy.deepcopy(PRESETS["fig5"])
PRESETS["fig6"]["roi"] = {
    "region": {"kind": "circle", "center": [0.0, 0.0125], "radius": 0.005},
    "sigma_min": 0.01,
    "sigma_max": 0.7,
}

_SCHEMA = {
    "preset": None,
    "name": None,
    "seed": None,
    "polarity": None,
    "mode": None,
    "domain": {"shape", "width", "height", "diameter"},
    "electrodes": {"count", "coverage", "region"},
    "mesh": {"target_edge_length"},
    "partition": {"kind", "nx", "ny", "bounds", "radial", "angular", "region", "r_min", "r_max",
                  "sets"},
    "setting": {"sigma0", "contrast", "z0", "background_error", "impedance_error", "noise",
                "sigma_max"},
    "roi": {"region", "sigma_min", "sigma_max"},
    "phantom": {"elements", "value", "perturb_background"},
    "sweep": {"background_error", "impedance_error"},
}
_REPLACING = ("kind", "shape")


class ScenarioError(ValueError):
    def __init__(self, problems, source=None):
        self.problems = list(problems)
        where = f"{source}: " if source else ""
        super().__init__(where + "invalid scenario:\n  " + "\n  ".join(self.problems))


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            if any(k in val for k in _REPLACING):
                out[key] = copy.deepcopy(val)
            else:
                out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass(frozen=True)
class PhantomSpec:
    """Inclusion made of whole partition elements plus optional extra triangles."""

    elements: tuple = ()
    value: float | None = None
    triangles: tuple = ()
    perturb_background: bool = True


@dataclass(frozen=True, eq=False)
class Scenario:
    config: dict
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        problems = _validate(self.config)
        if problems:
            raise ScenarioError(problems, self.source)

    # raw sections ---------------------------------------------------------
    @property
    def name(self) -> str:
        return self.config.get("name") or self.config.get("preset") or "scenario"

    @property
    def seed(self) -> int:
        return int(self.config.get("seed", 0))

    @property
    def polarity(self) -> str:
        return normalize_polarity(self.config.get("polarity", "conductive"))

    @property
    def mode(self) -> str:
        return self.config.get("mode", "nonlinearized")

    @property
    def target_edge_length(self) -> float:
        return float(self.config["mesh"]["target_edge_length"])

    @property
    def sweep_grid(self) -> tuple[list, list]:
        sw = self.config.get("sweep", {})
        return list(sw.get("background_error", [0.0])), list(sw.get("impedance_error", [0.0]))

    def with_overrides(self, **over) -> "Scenario":
        """Copy with top-level keys (``mode``, ``polarity``, ``seed``) or
        ``section__key`` entries replaced."""
        cfg = copy.deepcopy(self.config)
        for key, val in over.items():
            if val is None:
                continue
            if "__" in key:
                sec, sub = key.split("__", 1)
                cfg.setdefault(sec, {})[sub] = val
            else:
                cfg[key] = val
        return Scenario(cfg, self.source)

    # derived objects ------------------------------------------------------
    @cached_property
    def domain(self) -> DomainSpec:
        d = self.config["domain"]
        if d["shape"] == "rectangle":
            return DomainSpec.rectangle(d["width"], d["height"])
        return DomainSpec.disk(d["diameter"])

    @cached_property
    def electrodes(self):
        e = self.config["electrodes"]
        return place_electrodes(self.domain, int(e["count"]), float(e["coverage"]),
                                e.get("region", "full_boundary"))

    @cached_property
    def mesh(self) -> Mesh:
        return build_mesh(self.domain, self.target_edge_length, self.electrodes)

    @cached_property
    def partition(self) -> Partition:
        return build_partition(self.mesh, _partition_spec(self.config["partition"]))

    @cached_property
    def roi(self) -> RegionOfInterest | None:
        r = self.config.get("roi")
        if not r:
            return None
        tri = select_triangles(self.mesh, _region(r["region"]))
        return RegionOfInterest(tri, float(r["sigma_min"]), float(r["sigma_max"]))

    def setting(self, background_error=None, impedance_error=None, noise=None) -> SettingAssumptions:
        s = self.config["setting"]
        z0 = np.asarray(s["z0"], dtype=float)
        if z0.ndim == 0:
            z0 = np.full(self.electrodes.count, float(z0))
        def pick(v, key):
            return float(s.get(key, 0.0)) if v is None else float(v)
        return SettingAssumptions(
            sigma0=float(s["sigma0"]),
            contrast=float(s["contrast"]),
            z0=z0,
            background_error=pick(background_error, "background_error"),
            impedance_error=pick(impedance_error, "impedance_error"),
            noise=pick(noise, "noise"),
            polarity=self.polarity,
            sigma_max=None if s.get("sigma_max") is None else float(s["sigma_max"]),
            roi=self.roi,
        )

    def relative_errors(self, eps_rel: float, gamma_rel: float) -> tuple[float, float]:
        base = self.setting()
        return eps_rel * base.sigma0, gamma_rel * float(np.min(base.z0))

    def phantom_spec(self) -> PhantomSpec:
        p = self.config.get("phantom") or {}
        return PhantomSpec(
            elements=tuple(int(k) for k in p.get("elements", [])),
            value=p.get("value"),
            perturb_background=bool(p.get("perturb_background", True)),
        )


def _region(r: dict) -> dict:
    out = dict(r)
    if "center" in out:
        out["center"] = tuple(out["center"])
    if "bounds" in out:
        out["bounds"] = tuple(out["bounds"])
    return out


def _partition_spec(p: dict):
    kind = p["kind"]
    if kind == "uniform_grid":
        b = p.get("bounds")
        return UniformGrid(int(p["nx"]), int(p["ny"]), None if b is None else tuple(map(float, b)))
    if kind == "sector_grid":
        return SectorGrid(int(p["radial"]), int(p["angular"]), p.get("region", "full"),
                          float(p.get("r_min", 0.0)), p.get("r_max"))
    return TriangleList(tuple(tuple(s) for s in p["sets"]))


def _validate(cfg: dict) -> list[str]:
    problems = []
    if not isinstance(cfg, dict):
        return ["top level must be a mapping"]
    for key, val in cfg.items():
        if key not in _SCHEMA:
            problems.append(f"unknown key '{key}'")
        elif _SCHEMA[key] is not None:
            if not isinstance(val, dict):
                if val is not None:
                    problems.append(f"'{key}' must be a mapping")
                continue
            for sub in val:
                if sub not in _SCHEMA[key]:
                    problems.append(f"unknown key '{key}.{sub}'")
    missing = [s for s in ("domain", "electrodes", "mesh", "partition", "setting")
               if not isinstance(cfg.get(s), dict)]
    problems += [f"missing section '{s}'" for s in missing]
    if missing:
        return problems

    d = cfg["domain"]
    if d.get("shape") not in ("rectangle", "disk"):
        problems.append(f"domain.shape must be 'rectangle' or 'disk', got {d.get('shape')!r}")
    try:
        DomainSpec(**{k: v for k, v in d.items() if k in _SCHEMA["domain"]})
    except (MeshError, TypeError) as exc:
        problems.append(f"domain: {exc}")
    e = cfg["electrodes"]
    if not isinstance(e.get("count"), int) or e["count"] < 2:
        problems.append("electrodes.count must be an integer >= 2")
    cov = e.get("coverage")
    if not isinstance(cov, (int, float)) or not 0 < cov < 1:
        problems.append("electrodes.coverage must lie in (0, 1)")
    h = cfg["mesh"].get("target_edge_length")
    if not isinstance(h, (int, float)) or not h > 0:
        problems.append("mesh.target_edge_length must be positive")
    kind = cfg["partition"].get("kind")
    if kind not in ("uniform_grid", "sector_grid", "triangle_list"):
        problems.append(f"partition.kind must be uniform_grid, sector_grid or triangle_list, got {kind!r}")
    if cfg.get("mode", "nonlinearized") not in MODES:
        problems.append(f"mode must be one of {MODES}")
    try:
        normalize_polarity(cfg.get("polarity", "conductive"))
    except SettingError as exc:
        problems.extend(exc.problems)

    s = cfg["setting"]
    for key in ("sigma0", "contrast", "z0"):
        if key not in s:
            problems.append(f"missing key 'setting.{key}'")
    count_ok = isinstance(e.get("count"), int) and e["count"] >= 2
    if count_ok and all(k in s for k in ("sigma0", "contrast", "z0")):
        try:
            count = e["count"]
            z0 = np.asarray(s["z0"], dtype=float)
            if z0.ndim == 0:
                z0 = np.full(count, float(z0))
            elif z0.size != count:
                problems.append(f"setting.z0 has {z0.size} entries for {count} electrodes")
            SettingAssumptions(
                sigma0=float(s["sigma0"]),
                contrast=float(s["contrast"]),
                z0=z0,
                background_error=float(s.get("background_error", 0.0)),
                impedance_error=float(s.get("impedance_error", 0.0)),
                noise=float(s.get("noise", 0.0)),
                polarity=cfg.get("polarity", "conductive"),
                sigma_max=None if s.get("sigma_max") is None else float(s["sigma_max"]),
            )
        except SettingError as exc:
            problems.extend(f"setting: {p}" for p in exc.problems)
        except (TypeError, ValueError) as exc:
            problems.append(f"setting: {exc}")
    sw = cfg.get("sweep") or {}
    for key in ("background_error", "impedance_error"):
        vals = sw.get(key, [0.0])
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and v >= 0 for v in vals):
            problems.append(f"sweep.{key} must be a list of non-negative fractions")
    roi = cfg.get("roi")
    if roi:
        for key in ("region", "sigma_min", "sigma_max"):
            if key not in roi:
                problems.append(f"missing key 'roi.{key}'")
    return problems


def load_scenario(source=None, preset: str | None = None) -> Scenario:
    """Load a scenario from a YAML file, a mapping, or a preset name."""
    if source is None and preset is None:
        raise ScenarioError(["need a scenario file or a preset"])
    label = None
    cfg: dict = {}
    if isinstance(source, dict):
        cfg = copy.deepcopy(source)
    elif source is not None:
        label = str(source)
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ScenarioError([f"cannot read file: {exc}"], label) from exc
        try:
            cfg = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
            raise ScenarioError([f"{where}{getattr(exc, 'problem', exc)}"], label) from exc
        if not isinstance(cfg, dict):
            raise ScenarioError(["top level must be a mapping"], label)
    name = preset or cfg.get("preset")
    if name is not None:
        if name not in PRESETS:
            raise ScenarioError([f"unknown preset {name!r}; choose from {sorted(PRESETS)}"], label)
        cfg = _merge(PRESETS[name], cfg)
        cfg["preset"] = name
    return Scenario(cfg, label)


# phantoms and measurements ------------------------------------------------


def make_phantom(scenario: Scenario, spec: PhantomSpec | None = None, seed: int = 0,
                 setting: SettingAssumptions | None = None) -> np.ndarray:
    """Conductivity per triangle from the admitted class of the setting.

    Inclusion triangles get ``spec.value`` (default: the contrast bound
    itself).  Background triangles get ``sigma0`` plus a seeded uniform
    perturbation in ``[-eps, eps]``; excluded-region triangles a seeded value
    in their band.
    """
    spec = spec or scenario.phantom_spec()
    st = setting or scenario.setting()
    mesh, part = scenario.mesh, scenario.partition
    rng = np.random.default_rng(seed)
    sigma = np.full(mesh.n_triangles, st.sigma0)
    if spec.perturb_background and st.background_error > 0:
        sigma += rng.uniform(-st.background_error, st.background_error, mesh.n_triangles)
    if st.roi is not None:
        roi = st.roi
        sigma[roi.triangles] = rng.uniform(roi.sigma_min, roi.sigma_max, roi.triangles.size)

    inclusion = [part.elements[k] for k in spec.elements]
    if spec.triangles:
        inclusion.append(np.asarray(spec.triangles, dtype=int))
    if not inclusion:
        return sigma
    value = spec.value
    if value is None:
        value = st.sigma_d_min if st.polarity == "conductive" else st.sigma_d_max
    value = float(value)
    if st.polarity == "conductive" and value < st.sigma_d_min:
        raise SettingError([f"inclusion value {value} is below sigma0 + contrast"])
    if st.polarity == "resistive" and not 0 < value <= st.sigma_d_max:
        raise SettingError([f"inclusion value {value} must lie in (0, sigma0 - contrast]"])
    sigma[np.concatenate(inclusion)] = value
    return sigma


def make_noisy_measurement(R, delta: float, seed: int = 0) -> np.ndarray:
    """``R + E`` with ``E`` symmetric Gaussian rescaled to spectral norm ``delta``."""
    if delta < 0:
        raise ValueError("noise level must be non-negative")
    R = np.asarray(R, dtype=float)
    if delta == 0:
        return R.copy()
    rng = np.random.default_rng(seed)
    G = rng.standard_normal(R.shape)
    E = 0.5 * (G + G.T)
    E *= delta / spectral_norm(E)
    return R + E


def simulate_measurement(scenario: Scenario, sigma, seed: int = 0,
                         setting: SettingAssumptions | None = None) -> np.ndarray:
    """Noisy data for conductivity ``sigma`` with impedances drawn from ``z0 +- gamma``."""
    st = setting or scenario.setting()
    rng = np.random.default_rng([seed, 1])
    z = st.z0 + (rng.uniform(-st.impedance_error, st.impedance_error, st.z0.size)
                 if st.impedance_error > 0 else 0.0)
    R = CemSystem(scenario.mesh, sigma, z).measurement_matrix()
    return make_noisy_measurement(R, st.noise, seed)


def preset_names() -> list[str]:
    return sorted(PRESETS)


def describe(scenario: Scenario) -> str:
    st = scenario.setting()
    m = scenario.mesh
    return "\n".join([
        f"scenario          : {scenario.name}",
        f"domain            : {scenario.config['domain']}",
        f"electrodes        : {scenario.electrodes.count} ({scenario.config['electrodes']})",
        f"mesh              : {m.n_nodes} nodes, {m.n_triangles} triangles, "
        f"h = {scenario.target_edge_length:.6g}",
        f"partition         : {len(scenario.partition)} elements ({scenario.config['partition']})",
        f"sigma0, contrast  : {st.sigma0:g}, {st.contrast:g}",
        f"errors eps, gamma : {st.background_error:g}, {st.impedance_error:g}",
        f"sigma_max         : {st.sigma_max}",
        f"excluded region   : {'yes' if st.roi is not None else 'no'}",
    ])

