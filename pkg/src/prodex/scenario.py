"""Scenario files: JSON descriptions of spaces, measures, functions, points.

A scenario bundles everything a command needs: the coordinate spaces,
the product measure (head array plus tail rule), the function under
study, named points, and optionally a game section and verification
thresholds.  Numeric literals are read with decimal semantics (0.3
means 3/10 exactly); seeds are 64-bit unsigned integers.

Validation errors carry a location breadcrumb (section and index) so a
malformed weight names the coordinate it belongs to.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from .errors import ProdexError, ScenarioError
from .functions import (
    Cylinder,
    DiscountedSum,
    GeometricWeights,
    ProductIndicator,
    TailFunction,
)
from .games import GameSpec
from .model import (
    ConstantMeasureTail,
    ConstantSymbol,
    CoordinateMeasure,
    CoordinateSpace,
    DescribedPoint,
    LazyPoint,
    PeriodicMeasuresTail,
    PeriodicSymbols,
    PointSpec,
    ProductMeasure,
    SpaceFamily,
    formula_tail,
)

SCHEMA_VERSION = 1

BUILTIN_SCENARIOS = {
    "example-3-4": "example-3-4.json",
    "discounted-uniform": "discounted-uniform.json",
    "cylinder-mix": "cylinder-mix.json",
    "cylinder-threshold": "cylinder-threshold.json",
    "naming-game": "naming-game.json",
    "purify-demo": "purify-demo.json",
    "purify-demo-quad": "purify-demo-quad.json",
}


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    spaces: SpaceFamily
    measure: ProductMeasure
    function: Optional[TailFunction]
    points: Mapping[str, PointSpec]
    game: Optional[GameSpec] = None
    thresholds: Mapping = field(default_factory=dict)
    defaults: Mapping = field(default_factory=dict)
    digest: str = ""
    source: str = ""

    def point(self, name: str) -> PointSpec:
        try:
            return self.points[name]
        except KeyError:
            known = ", ".join(sorted(self.points)) or "(none)"
            raise ScenarioError(
                f"unknown point {name!r}; scenario defines: {known}",
                self.source) from None

    def threshold(self, command: str, key: str,
                  fallback: Optional[float] = None):
        section = self.thresholds.get(command, {})
        value = section.get(key, fallback)
        return None if value is None else Fraction(value)


def _require(mapping, key, location):
    if key not in mapping:
        raise ScenarioError(f"missing required key {key!r}", location)
    return mapping[key]


def _build_spaces(data, loc) -> SpaceFamily:
    head = []
    for pos, entry in enumerate(data.get("head", []), start=1):
        symbols = tuple(_require(entry, "symbols", f"{loc}.head[{pos - 1}]"))
        head.append(CoordinateSpace(pos, symbols))
    tail = _require(data, "tail", loc)
    tail_symbols = tuple(_require(tail, "symbols", f"{loc}.tail"))
    return SpaceFamily(tuple(head), tail_symbols)


def _build_measure_vector(index, weights, spaces, loc) -> CoordinateMeasure:
    space = spaces.space_at(index)
    if len(weights) != space.size:
        raise ScenarioError(
            f"{len(weights)} weights for {space.size} symbols at "
            f"coordinate {index}", loc)
    return CoordinateMeasure.from_weights(index, space.symbols, weights)


def _build_measure_tail(data, spaces, head_len, loc):
    kind = _require(data, "kind", loc)
    probe = head_len + 1
    if kind == "constant":
        weights = _require(data, "weights", loc)
        return ConstantMeasureTail(
            _build_measure_vector(probe, weights, spaces, loc))
    if kind == "periodic":
        templates = []
        for off, weights in enumerate(_require(data, "weights", loc)):
            templates.append(
                _build_measure_vector(probe + off, weights, spaces,
                                      f"{loc}.weights[{off}]").at_index(probe))
        return PeriodicMeasuresTail(tuple(templates))
    if kind == "formula":
        family = _require(data, "family", loc)
        return formula_tail(family, data.get("params", {}))
    raise ScenarioError(f"unknown measure tail kind {kind!r}", loc)


def _build_measure(data, spaces, loc) -> ProductMeasure:
    head = []
    for pos, weights in enumerate(data.get("head", []), start=1):
        head.append(
            _build_measure_vector(pos, weights, spaces, f"{loc}.head[{pos - 1}]"))
    tail = _build_measure_tail(_require(data, "tail", loc), spaces,
                               len(head), f"{loc}.tail")
    return ProductMeasure(spaces, tuple(head), tail)


def _build_symbol_tail(data, loc):
    kind = _require(data, "kind", loc)
    if kind == "constant_symbol":
        return ConstantSymbol(_require(data, "symbol", loc))
    if kind == "periodic_symbols":
        return PeriodicSymbols(tuple(_require(data, "symbols", loc)))
    raise ScenarioError(f"unknown symbol tail kind {kind!r}", loc)


def _build_function(data, spaces, loc) -> TailFunction:
    family = _require(data, "family", loc)
    value_range = data.get("range")
    if family == "cylinder":
        depth = _require(data, "depth", loc)
        entries = []
        for pos, row in enumerate(_require(data, "table", loc)):
            rloc = f"{loc}.table[{pos}]"
            entries.append((tuple(_require(row, "prefix", rloc)),
                            _require(row, "value", rloc)))
        f = Cylinder.from_entries(depth, entries, value_range)
        # every prefix over the declared spaces must be covered
        import itertools
        lists = [spaces.space_at(i).symbols for i in range(1, depth + 1)]
        for combo in itertools.product(*lists):
            if combo not in f.table:
                raise ScenarioError(f"table misses prefix {list(combo)}",
                                    f"{loc}.table")
        return f
    if family == "discounted_sum":
        wspec = _require(data, "weights", loc)
        if _require(wspec, "kind", f"{loc}.weights") != "geometric":
            raise ScenarioError("only geometric weight sequences are supported",
                                f"{loc}.weights")
        weights = GeometricWeights.of(_require(wspec, "coef", f"{loc}.weights"),
                                      _require(wspec, "ratio", f"{loc}.weights"))
        scores = {}
        for pos, pair in enumerate(_require(data, "scores", loc)):
            if len(pair) != 2:
                raise ScenarioError("score entries are [symbol, score] pairs",
                                    f"{loc}.scores[{pos}]")
            scores[pair[0]] = pair[1]
        lo, hi = (None, None) if value_range is None else value_range
        return DiscountedSum(weights, scores,
                             None if lo is None else Fraction(lo),
                             None if hi is None else Fraction(hi))
    if family == "product_indicator":
        targets = _require(data, "targets", loc)
        head = tuple(targets.get("head", []))
        tail = _build_symbol_tail(_require(targets, "tail", f"{loc}.targets"),
                                  f"{loc}.targets.tail")
        return ProductIndicator(spaces, head, tail)
    raise ScenarioError(f"unknown function family {family!r}", loc)


def _build_point(data, measure, loc) -> PointSpec:
    kind = _require(data, "kind", loc)
    if kind == "described":
        head = tuple(data.get("head", []))
        tail = _build_symbol_tail(_require(data, "tail", loc), f"{loc}.tail")
        point = DescribedPoint(head, tail)
        point.validate_against(measure.spaces)
        return point
    if kind == "lazy":
        seed = _require(data, "seed", loc)
        if not isinstance(seed, int) or seed < 0 or seed >= 2**64:
            raise ScenarioError("seed must be a 64-bit unsigned integer", loc)
        return LazyPoint(seed, measure)
    raise ScenarioError(f"unknown point kind {kind!r}", loc)


def _build_game(data, spaces, loc) -> GameSpec:
    actions = tuple(_require(data, "actions", loc))
    rng = _require(data, "range", loc)
    payoffs = {}
    for a in actions:
        key = str(a)
        spec = _require(_require(data, "payoffs", loc), key, f"{loc}.payoffs")
        payoffs[a] = _build_function(spec, spaces, f"{loc}.payoffs.{key}")
    return GameSpec(actions, spaces, payoffs, Fraction(rng[0]), Fraction(rng[1]))


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        data = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            source) from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object", source)
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}", source)
    try:
        spaces = _build_spaces(_require(data, "spaces", source), "spaces")
        measure = _build_measure(_require(data, "measure", source), spaces,
                                 "measure")
        function = None
        if "function" in data:
            function = _build_function(data["function"], spaces, "function")
        points = {}
        for name, spec in data.get("points", {}).items():
            points[name] = _build_point(spec, measure, f"points.{name}")
        game = None
        if "game" in data:
            game = _build_game(data["game"], spaces, "game")
    except ScenarioError:
        raise
    except ProdexError as exc:
        raise ScenarioError(str(exc), source) from None
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Scenario(
        name=data.get("name", source),
        spaces=spaces,
        measure=measure,
        function=function,
        points=points,
        game=game,
        thresholds=data.get("thresholds", {}),
        defaults=data.get("defaults", {}),
        digest=digest,
        source=source,
    )


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario from a file path or a built-in name."""
    if path_or_name in BUILTIN_SCENARIOS:
        ref = resources.files("prodex").joinpath(
            "scenarios", BUILTIN_SCENARIOS[path_or_name])
        return parse_scenario(ref.read_text(encoding="utf-8"), path_or_name)
    path = Path(path_or_name)
    if not path.exists():
        known = ", ".join(sorted(BUILTIN_SCENARIOS))
        raise ScenarioError(
            f"no such file, and not a built-in scenario (built-ins: {known})",
            path_or_name)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))
