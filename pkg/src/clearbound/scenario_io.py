"""Scenario and result files.

Scenarios are JSON documents with a strict schema: unknown fields are
rejected so golden files cannot silently drift. The canonical form is
``json.dumps(..., indent=2, sort_keys=True)`` plus a trailing newline; its
SHA-256 is the scenario digest embedded in result files.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import __version__
from .cost_oracle import QuadratureConfig
from .errors import InputError
from .geometry import AxisAlignedBox, HalfSpace, Hypersphere, World, as_state
from .planner import GeometricGraph, GraphParams, SearchMode, SearchResult

SCENARIO_VERSION = 1
RESULT_VERSION = 1
SEED_OVERRIDE_ENV = "CLEARBOUND_SEED_OVERRIDE"


class ScenarioError(InputError):
    """A scenario failed to parse or validate.

    Attributes:
        field: dotted path of the offending field, if known.
        line: 1-based line number for syntax errors, if known.
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


class SphereRecord(_Strict):
    type: Literal["hypersphere"]
    center: list[float]
    radius: float


class BoxRecord(_Strict):
    type: Literal["box"]
    min: list[float]
    max: list[float]


class HalfSpaceRecord(_Strict):
    type: Literal["halfspace"]
    normal: list[float]
    offset: float


ObstacleRecord = Annotated[Union[SphereRecord, BoxRecord, HalfSpaceRecord],
                           Field(discriminator="type")]


class BoundsRecord(_Strict):
    min: list[float]
    max: list[float]


class GraphRecord(_Strict):
    n_vertices: int
    radius: float
    seed: int = 0


class QuadratureRecord(_Strict):
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 50


class HeuristicRecord(_Strict):
    mode: SearchMode = SearchMode.INFORMED_LAZY
    k_interior: int = 2


def _obstacle(rec):
    if rec.type == "hypersphere":
        return Hypersphere(rec.center, rec.radius)
    if rec.type == "box":
        return AxisAlignedBox(rec.min, rec.max)
    return HalfSpace(rec.normal, rec.offset)


class ScenarioFile(_Strict):
    version: Literal[1] = SCENARIO_VERSION
    dimension: int
    bounds: Optional[BoundsRecord] = None
    bounds_are_obstacles: bool = False
    obstacles: list[ObstacleRecord] = Field(default_factory=list)
    start: list[float]
    goal: list[float]
    graph: GraphRecord
    quadrature: QuadratureRecord = Field(default_factory=QuadratureRecord)
    heuristic: HeuristicRecord = Field(default_factory=HeuristicRecord)

    def world(self) -> World:
        bounds = None
        if self.bounds is not None:
            bounds = AxisAlignedBox(self.bounds.min, self.bounds.max)
        obstacles = tuple(_obstacle(ob) for ob in self.obstacles)
        return World(self.dimension, obstacles, bounds, self.bounds_are_obstacles)

    def graph_params(self, seed: int | None = None) -> GraphParams:
        return GraphParams(self.graph.n_vertices, self.graph.radius,
                           self.graph.seed if seed is None else seed)

    def quadrature_config(self) -> QuadratureConfig:
        q = self.quadrature
        return QuadratureConfig(q.rel_tol, q.abs_tol, q.max_depth)


def _check_semantics(sc: ScenarioFile) -> None:
    # Re-run every geometric invariant, reporting the field that broke it.
    dim = sc.dimension
    if dim < 1:
        raise ScenarioError("dimension must be a positive integer", "dimension")

    def vec(value, name):
        try:
            return as_state(value, dim)
        except InputError as exc:
            raise ScenarioError(str(exc), name) from None

    if sc.bounds is not None:
        vec(sc.bounds.min, "bounds.min")
        vec(sc.bounds.max, "bounds.max")
    for i, ob in enumerate(sc.obstacles):
        for name in ("center", "min", "max", "normal"):
            if hasattr(ob, name):
                vec(getattr(ob, name), f"obstacles.{i}.{name}")
    start = vec(sc.start, "start")
    goal = vec(sc.goal, "goal")
    for i, ob in enumerate(sc.obstacles):
        try:
            _obstacle(ob)
        except InputError as exc:
            raise ScenarioError(str(exc), f"obstacles.{i}") from None
    try:
        world = sc.world()
    except InputError as exc:
        raise ScenarioError(str(exc), "bounds") from None
    if world.clearance_many(start[None])[0] <= 0.0:
        raise ScenarioError("start lies inside or on an obstacle", "start")
    if world.clearance_many(goal[None])[0] <= 0.0:
        raise ScenarioError("goal lies inside or on an obstacle", "goal")
    try:
        sc.graph_params()
    except InputError as exc:
        raise ScenarioError(str(exc), "graph") from None
    if sc.graph.n_vertices and sc.bounds is None:
        raise ScenarioError("sampling vertices requires bounds", "bounds")
    try:
        sc.quadrature_config()
    except InputError as exc:
        raise ScenarioError(str(exc), "quadrature") from None
    if sc.heuristic.k_interior < 0:
        raise ScenarioError("k_interior must be non-negative", "heuristic.k_interior")


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and fully validate scenario JSON text."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object", line=1)
    try:
        sc = ScenarioFile.model_validate_json(text)
    except ValidationError as exc:
        err = exc.errors()[0]
        field = ".".join(str(p) for p in err["loc"]) or None
        raise ScenarioError(err["msg"], field) from None
    _check_semantics(sc)
    return sc


def load_scenario(path: str | os.PathLike) -> ScenarioFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return parse_scenario(text)


def canonical_json(obj: Any) -> str:
    if isinstance(obj, BaseModel):
        obj = obj.model_dump(mode="json")
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def save_scenario(sc: ScenarioFile, path: str | os.PathLike) -> None:
    Path(path).write_text(canonical_json(sc), encoding="utf-8")


def scenario_digest(sc: ScenarioFile) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(sc).encode("utf-8")).hexdigest()


def seed_override() -> int | None:
    """Seed from ``CLEARBOUND_SEED_OVERRIDE``, or ``None`` when unset."""
    raw = os.environ.get(SEED_OVERRIDE_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        seed = int(raw)
    except ValueError:
        raise InputError(f"{SEED_OVERRIDE_ENV} must be an integer, got {raw!r}") from None
    if seed < 0:
        raise InputError(f"{SEED_OVERRIDE_ENV} must be non-negative, got {seed}")
    return seed


def result_record(res: SearchResult, graph: GeometricGraph) -> dict:
    rec = {
        "found": res.found,
        "cost": res.cost if res.found else None,
        "vertex_path": list(res.vertex_path),
        "waypoints": graph.vertices[res.vertex_path].tolist() if res.vertex_path else [],
        "stats": {
            "expansions": res.stats.expansions,
            "exact_edge_evals": res.stats.exact_edge_evals,
            "heuristic_evals": res.stats.heuristic_evals,
            "wall_time": res.stats.wall_time,
        },
    }
    if res.edge_log is not None:
        rec["edge_log"] = [{"u": u, "v": v, "cost": c if math.isfinite(c) else None}
                           for u, v, c in res.edge_log]
    return rec


def make_result_file(sc: ScenarioFile, graph: GeometricGraph,
                     results: list[SearchResult]) -> dict:
    return {
        "version": RESULT_VERSION,
        "tool_version": __version__,
        "scenario_digest": scenario_digest(sc),
        "graph": {
            "seed": graph.params.seed,
            "n_vertices": len(graph.vertices),
            "n_edges": graph.n_edges,
        },
        "results": {res.mode.value: result_record(res, graph) for res in results},
    }


def write_result_file(doc: dict, path: str | os.PathLike) -> None:
    Path(path).write_text(canonical_json(doc), encoding="utf-8")


def read_result_file(path: str | os.PathLike) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read result file {path}: {exc}") from None
    for key in ("version", "tool_version", "scenario_digest", "results"):
        if key not in doc:
            raise InputError(f"result file {path} lacks '{key}'")
    return doc


def strip_wall_time(doc: dict) -> dict:
    """Copy of a result document without the run-dependent timing fields."""
    doc = json.loads(json.dumps(doc))
    for rec in doc.get("results", {}).values():
        rec.get("stats", {}).pop("wall_time", None)
    return doc
