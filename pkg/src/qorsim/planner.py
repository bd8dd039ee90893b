"""Route configuration, chain construction, and feasibility reports.

A route file is JSON:

    {
      "name": "metro-ring-7",
      "fiber_type": "NDSF",
      "quantum_band": "O",
      "coexistence": true,
      "sites": [
        {"name": "A",    "position_km": 0.0,  "kind": "endpoint"},
        {"name": "ILA1", "position_km": 80.0, "kind": "ila"},
        {"name": "B",    "position_km": 160.0, "kind": "endpoint"}
      ],
      "defaults": { ... engineering overrides, see DEFAULT_PARAMS ... }
    }

Sites must be listed in order of strictly increasing position; the first
and last are endpoints, everything between is an inline amplifier hut that
the plan would convert into a repeater site.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from . import __version__
from .fiber import BANDS, DEFAULT_FIBER_TYPES, Band, FiberConfigError, FiberSpec, FiberSpan
from .linalg import StateError, fidelity, phi_plus
from .qkd import (
    OneWayRepeaterSpec,
    TECH_ENTANGLEMENT,
    TECH_ONE_WAY,
    TECHNOLOGIES,
    assess_chain,
    key_metrics_from_result,
    qber_from_state,
)
from .repeater import (
    MemorySpec,
    QorsNode,
    RepeaterChain,
    simulate_chain_mc,
    span_entanglement_attempt,
)

SCHEMA_VERSION = 1

SITE_KIND_ENDPOINT = "endpoint"
SITE_KIND_ILA = "ila"

# Engineering defaults; every key can be overridden per route ("defaults"
# object in the route file) or per call (param_overrides).
DEFAULT_PARAMS: dict[str, float | bool] = {
    "sop_drift_rate": 5e4,                # rad/s polarization walk
    "sop_recalibration_interval": 1e-6,   # s between tracker resets
    "dephasing_p": 1e-3,
    "coexistence_noise_prob": 1e-5,
    "mux_insertion_loss_db": 1.0,
    "attempt_rate": 1e6,
    "memory_coherence_time": 1.0,
    "memory_write_efficiency": 0.9,
    "memory_read_efficiency": 0.9,
    "memory_cryogenic": False,
    "memory_cutoff": 0.0,                 # 0 means: use the coherence time
    "bsm_success_prob": 0.5,
    "bsm_visibility_penalty": 0.0,
    "detector_efficiency": 0.8,
    "max_heralding_km": 100.0,
    "one_way_loss_threshold_db": 3.0,
    "one_way_cryogenic": False,
}


class ConfigError(ValueError):
    """A route or fiber configuration file is malformed."""


@dataclass(frozen=True)
class Site:
    name: str
    position_km: float
    kind: str


@dataclass(frozen=True)
class RouteConfig:
    name: str
    sites: tuple[Site, ...]
    fiber: FiberSpec
    quantum_band: Band
    coexistence: bool
    params: dict[str, float | bool]

    @property
    def length_km(self) -> float:
        return self.sites[-1].position_km - self.sites[0].position_km


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def load_fiber_table(path: str) -> dict[str, FiberSpec]:
    """Fiber-type catalog from JSON: {"TYPE": {"attenuation_db_per_km":
    {"O": 0.35, ...}, "group_index": 1.468}, ...}."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    _require(isinstance(raw, dict) and raw, f"{path}: expected an object of fiber types")
    table = {}
    for name, body in raw.items():
        _require(isinstance(body, dict), f"{path}: fiber type {name!r} must be an object")
        att = body.get("attenuation_db_per_km")
        _require(
            isinstance(att, dict) and att,
            f"{path}: fiber type {name!r} needs attenuation_db_per_km per band",
        )
        for band, val in att.items():
            _require(
                isinstance(val, (int, float)) and val > 0,
                f"{path}: fiber {name!r} band {band!r} attenuation must be positive",
            )
        group = body.get("group_index", 1.468)
        _require(
            isinstance(group, (int, float)) and group >= 1.0,
            f"{path}: fiber {name!r} group_index must be at least 1",
        )
        try:
            table[name] = FiberSpec(name, {k: float(v) for k, v in att.items()}, float(group))
        except FiberConfigError as e:
            raise ConfigError(f"{path}: fiber {name!r}: {e}") from None
    return table


def load_route(path: str, fiber_table: dict[str, FiberSpec] | None = None) -> RouteConfig:
    """Parse and validate a route file."""
    table = fiber_table if fiber_table is not None else DEFAULT_FIBER_TYPES
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(
                f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
            ) from None
    _require(isinstance(raw, dict), f"{path}: route must be a JSON object")
    known = {"name", "sites", "fiber_type", "quantum_band", "coexistence", "defaults"}
    for key in raw:
        _require(key in known, f"{path}: unknown route key {key!r}")

    name = raw.get("name", "route")
    _require(isinstance(name, str) and name, f"{path}: route name must be a nonempty string")

    raw_sites = raw.get("sites")
    _require(
        isinstance(raw_sites, list) and len(raw_sites) >= 2,
        f"{path}: sites must be a list of at least two entries",
    )
    sites = []
    for i, entry in enumerate(raw_sites):
        _require(isinstance(entry, dict), f"{path}: sites[{i}] must be an object")
        sname = entry.get("name", f"site{i}")
        pos = entry.get("position_km")
        kind = entry.get("kind")
        _require(isinstance(sname, str) and sname, f"{path}: sites[{i}].name must be a nonempty string")
        _require(
            isinstance(pos, (int, float)) and pos >= 0,
            f"{path}: sites[{i}].position_km must be a nonnegative number",
        )
        _require(
            kind in (SITE_KIND_ENDPOINT, SITE_KIND_ILA),
            f"{path}: sites[{i}].kind must be '{SITE_KIND_ENDPOINT}' or '{SITE_KIND_ILA}'",
        )
        sites.append(Site(sname, float(pos), kind))
    for i in range(1, len(sites)):
        _require(
            sites[i].position_km > sites[i - 1].position_km,
            f"{path}: sites[{i}] position {sites[i].position_km} does not increase "
            f"past {sites[i - 1].position_km}",
        )
    _require(sites[0].kind == SITE_KIND_ENDPOINT, f"{path}: first site must be an endpoint")
    _require(sites[-1].kind == SITE_KIND_ENDPOINT, f"{path}: last site must be an endpoint")
    for i, s in enumerate(sites[1:-1], start=1):
        _require(
            s.kind == SITE_KIND_ILA,
            f"{path}: sites[{i}] is an interior site and must be kind '{SITE_KIND_ILA}'",
        )

    fiber_type = raw.get("fiber_type", "NDSF")
    _require(
        isinstance(fiber_type, str) and fiber_type in table,
        f"{path}: fiber_type {fiber_type!r} not in table {sorted(table)}",
    )
    band_name = raw.get("quantum_band", "O")
    _require(
        isinstance(band_name, str) and band_name in BANDS,
        f"{path}: quantum_band {band_name!r} not one of {sorted(BANDS)}",
    )
    fiber = table[fiber_type]
    band = BANDS[band_name]
    try:
        fiber.attenuation(band)
    except FiberConfigError as e:
        raise ConfigError(f"{path}: {e}") from None

    coexistence = raw.get("coexistence", True)
    _require(isinstance(coexistence, bool), f"{path}: coexistence must be a boolean")

    defaults = raw.get("defaults", {})
    _require(isinstance(defaults, dict), f"{path}: defaults must be an object")
    params = dict(DEFAULT_PARAMS)
    for key, val in defaults.items():
        _require(key in DEFAULT_PARAMS, f"{path}: unknown defaults key {key!r}")
        expect_bool = isinstance(DEFAULT_PARAMS[key], bool)
        if expect_bool:
            _require(isinstance(val, bool), f"{path}: defaults.{key} must be a boolean")
            params[key] = val
        else:
            _require(
                isinstance(val, (int, float)) and not isinstance(val, bool),
                f"{path}: defaults.{key} must be a number",
            )
            params[key] = float(val)

    return RouteConfig(
        name=name,
        sites=tuple(sites),
        fiber=fiber,
        quantum_band=band,
        coexistence=coexistence,
        params=params,
    )


def build_chain(
    route: RouteConfig,
    technology: str = TECH_ENTANGLEMENT,
    param_overrides: dict[str, float | bool] | None = None,
) -> RepeaterChain:
    """Spans from consecutive site gaps, one repeater node per interior hut."""
    if technology not in TECHNOLOGIES:
        raise ConfigError(f"unknown technology {technology!r}")
    params = dict(route.params)
    for key, val in (param_overrides or {}).items():
        if key not in DEFAULT_PARAMS:
            raise ConfigError(f"unknown parameter override {key!r}")
        params[key] = val

    noise = params["coexistence_noise_prob"] if route.coexistence else 0.0
    try:
        spans = tuple(
            FiberSpan(
                length_km=b.position_km - a.position_km,
                fiber=route.fiber,
                quantum_band=route.quantum_band,
                sop_drift_rate=params["sop_drift_rate"],
                sop_recalibration_interval=params["sop_recalibration_interval"],
                dephasing_p=params["dephasing_p"],
                coexistence_noise_prob=noise,
                mux_insertion_loss_db=params["mux_insertion_loss_db"],
            )
            for a, b in zip(route.sites[:-1], route.sites[1:])
        )
        memory = MemorySpec(
            coherence_time=params["memory_coherence_time"],
            write_efficiency=params["memory_write_efficiency"],
            read_efficiency=params["memory_read_efficiency"],
            cryogenic_required=params["memory_cryogenic"],
        )
        nodes = tuple(
            QorsNode(
                memory=memory,
                bsm_success_prob=params["bsm_success_prob"],
                bsm_visibility_penalty=params["bsm_visibility_penalty"],
                detector_efficiency=params["detector_efficiency"],
                position_km=site.position_km,
            )
            for site in route.sites[1:-1]
        )
        cutoff = params["memory_cutoff"] or params["memory_coherence_time"]
        return RepeaterChain(
            spans=spans,
            nodes=nodes,
            attempt_rate=params["attempt_rate"],
            memory_cutoff=cutoff,
        )
    except (StateError, FiberConfigError) as e:
        raise ConfigError(f"route {route.name!r}: {e}") from None


def _config_hash(route: RouteConfig) -> str:
    canon = {
        "name": route.name,
        "sites": [
            {"name": s.name, "position_km": s.position_km, "kind": s.kind}
            for s in route.sites
        ],
        "fiber_type": route.fiber.type_name,
        "attenuation_db_per_km": route.fiber.attenuation_db_per_km,
        "group_index": route.fiber.group_index,
        "quantum_band": route.quantum_band.name,
        "coexistence": route.coexistence,
        "params": route.params,
    }
    blob = json.dumps(canon, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def spans_table(chain: RepeaterChain) -> list[dict]:
    """Per-span summary used by reports and the channel subcommand."""
    rows = []
    n = len(chain.spans)
    target = phi_plus()
    for i, span in enumerate(chain.spans):
        left = chain.nodes[i - 1] if i > 0 else None
        right = chain.nodes[i] if i < n - 1 else None
        attempt = span_entanglement_attempt(
            span,
            detector_efficiency=left.detector_efficiency if left else 1.0,
            memory=right.memory if right else None,
        )
        rows.append(
            {
                "index": i,
                "length_km": float(span.length_km),
                "transmittance": float(attempt.transmittance),
                "fidelity": float(fidelity(attempt.state, target)),
            }
        )
    return rows


def run_plan(
    route: RouteConfig,
    technology: str = "both",
    trials: int = 10000,
    seed: int = 42,
    workers: int = 1,
    param_overrides: dict[str, float | bool] | None = None,
) -> dict | list[dict]:
    """Full feasibility report: verdict, spans, simulation, key rates.

    technology "both" returns [entanglement report, one_way report].
    One-way transport is assessed against its loss budget only; its
    end_to_end and qkd sections are null.
    """
    if technology == "both":
        return [
            run_plan(route, t, trials, seed, workers, param_overrides)
            for t in TECHNOLOGIES
        ]
    if technology not in TECHNOLOGIES:
        raise ConfigError(f"unknown technology {technology!r}")

    chain = build_chain(route, technology, param_overrides)
    params = dict(route.params)
    for key, val in (param_overrides or {}).items():
        params[key] = val

    verdict = assess_chain(
        chain,
        technology,
        one_way_spec=OneWayRepeaterSpec(
            loss_threshold_db=params["one_way_loss_threshold_db"],
            cryogenic_required=bool(params["one_way_cryogenic"]),
        ),
        max_heralding_km=params["max_heralding_km"],
        coexistence=route.coexistence,
    )

    end_to_end = None
    qkd_section = None
    if technology == TECH_ENTANGLEMENT:
        result = simulate_chain_mc(chain, trials=trials, seed=seed, workers=workers)
        metrics = key_metrics_from_result(result)
        end_to_end = {
            "fidelity": result.fidelity,
            "pair_rate_hz": result.pair_rate_hz,
            "latency_s": result.mean_latency_s,
        }
        qkd_section = {
            "qber": metrics.qber,
            "sifted_rate_hz": metrics.sifted_rate_hz,
            "secret_key_rate_hz": metrics.secret_key_rate_hz,
            "secure": metrics.secure,
        }

    report = {
        "schema_version": SCHEMA_VERSION,
        "route": {
            "name": route.name,
            "fiber_type": route.fiber.type_name,
            "quantum_band": route.quantum_band.name,
            "coexistence": route.coexistence,
            "length_km": route.length_km,
            "site_count": len(route.sites),
        },
        "technology": technology,
        "spans": spans_table(chain),
        "end_to_end": end_to_end,
        "qkd": qkd_section,
        "verdict": {
            "feasible": verdict.feasible,
            "violations": [
                {
                    "requirement": v.requirement,
                    "span_index": v.span_index,
                    "detail": v.detail,
                }
                for v in verdict.violations
            ],
        },
        "provenance": {
            "seed": seed,
            "trials": trials,
            "config_hash": _config_hash(route),
            "version": __version__,
        },
    }
    validate_report(report)
    return report


_REPORT_KEYS = {
    "schema_version", "route", "technology", "spans",
    "end_to_end", "qkd", "verdict", "provenance",
}


def validate_report(report: dict) -> None:
    """Structural check of a single-technology report; raises ConfigError."""
    def fail(msg: str):
        raise ConfigError(f"report schema: {msg}")

    if not isinstance(report, dict):
        fail("report must be an object")
    if set(report) != _REPORT_KEYS:
        missing = _REPORT_KEYS - set(report)
        extra = set(report) - _REPORT_KEYS
        fail(f"bad keys: missing {sorted(missing)}, extra {sorted(extra)}")
    if report["schema_version"] != SCHEMA_VERSION:
        fail(f"schema_version must be {SCHEMA_VERSION}")
    if report["technology"] not in TECHNOLOGIES:
        fail(f"technology must be one of {TECHNOLOGIES}")

    route = report["route"]
    for key in ("name", "fiber_type", "quantum_band", "coexistence", "length_km", "site_count"):
        if not isinstance(route, dict) or key not in route:
            fail(f"route.{key} missing")

    spans = report["spans"]
    if not isinstance(spans, list) or not spans:
        fail("spans must be a nonempty list")
    for i, row in enumerate(spans):
        if not isinstance(row, dict) or set(row) != {"index", "length_km", "transmittance", "fidelity"}:
            fail(f"spans[{i}] must have exactly index/length_km/transmittance/fidelity")
        if row["index"] != i:
            fail(f"spans[{i}] index out of order")
        for key in ("length_km", "transmittance", "fidelity"):
            v = row[key]
            if not isinstance(v, (int, float)) or v != v:
                fail(f"spans[{i}].{key} must be a finite number")

    ete, qkd_section = report["end_to_end"], report["qkd"]
    if report["technology"] == TECH_ENTANGLEMENT:
        if not isinstance(ete, dict) or set(ete) != {"fidelity", "pair_rate_hz", "latency_s"}:
            fail("end_to_end must have exactly fidelity/pair_rate_hz/latency_s")
        if not isinstance(qkd_section, dict) or set(qkd_section) != {
            "qber", "sifted_rate_hz", "secret_key_rate_hz", "secure"
        }:
            fail("qkd must have exactly qber/sifted_rate_hz/secret_key_rate_hz/secure")
    else:
        if ete is not None or qkd_section is not None:
            fail("one_way reports carry null end_to_end and qkd")

    verdict = report["verdict"]
    if not isinstance(verdict, dict) or set(verdict) != {"feasible", "violations"}:
        fail("verdict must have exactly feasible/violations")
    if not isinstance(verdict["feasible"], bool):
        fail("verdict.feasible must be a boolean")
    for j, v in enumerate(verdict["violations"]):
        if not isinstance(v, dict) or set(v) != {"requirement", "span_index", "detail"}:
            fail(f"violations[{j}] must have exactly requirement/span_index/detail")
    if verdict["feasible"] and verdict["violations"]:
        fail("feasible verdict cannot carry violations")

    prov = report["provenance"]
    if not isinstance(prov, dict) or set(prov) != {"seed", "trials", "config_hash", "version"}:
        fail("provenance must have exactly seed/trials/config_hash/version")
