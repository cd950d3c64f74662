"""The 16-entry stimulus configuration catalog: the i.i.d. training setup
plus 15 generalization variants.

Every sampling constant lives in ``data/variant_catalog.json`` so a dataset
is reproducible from that file plus a seed. The loader merges per-variant
overrides onto the defaults block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class MainConfig:
    kind: str                       # "polygon" | "curvy"
    edge_count: tuple[int, int]
    radius_max_px: float
    gap_px: tuple[float, float]
    corner_clearance_px: float
    diameter_px: tuple[float, float]
    amplitude_px: tuple[float, float]
    frequency: tuple[int, int]
    dashed: bool
    max_attempts: int


@dataclass(frozen=True)
class FlankerConfig:
    kind: str                       # "lines" | "none" | "curvy_open" | "curvy_dashed_closed"
    count: tuple[int, int]
    segment_length_px: tuple[float, float]
    short_segment_length_px: tuple[float, float] | None
    min_center_distance_px: float
    min_inter_segment_angle_deg: float
    diameter_px: tuple[float, float] | None
    max_attempts_per_flanker: int


@dataclass(frozen=True)
class PlacementConfig:
    mode: str                       # "random" | "center" | "slots"
    margin_px: float
    slots: tuple[tuple[float, float], ...] | None
    slot_max_abs_radius_px: float


@dataclass(frozen=True)
class StyleConfig:
    width_px: float
    color: str                      # "black" | "white" | "black_white_black"
    dashed: bool


@dataclass(frozen=True)
class VariantConfig:
    variant_id: str
    name: str
    main: MainConfig
    flankers: FlankerConfig
    placement: PlacementConfig
    style: StyleConfig
    binarize_threshold: int | None


class CatalogError(ValueError):
    pass


def _merge(defaults: dict, override: dict | None) -> dict:
    merged = dict(defaults)
    if override:
        merged.update(override)
    return merged


def _pair(v) -> tuple:
    return (v[0], v[1])


def _parse_variant(vid: str, raw: dict, defaults: dict, slot_table: dict) -> VariantConfig:
    main = _merge(defaults["main"], raw.get("main"))
    fl = _merge(defaults["flankers"], raw.get("flankers"))
    pl = _merge(defaults["placement"], raw.get("placement"))
    st = _merge(defaults["style"], raw.get("style"))

    slots = pl.get("slots")
    if isinstance(slots, str):
        slots = slot_table[slots]
    return VariantConfig(
        variant_id=vid,
        name=raw.get("name", vid),
        main=MainConfig(
            kind=main["kind"],
            edge_count=_pair(main["edge_count"]),
            radius_max_px=float(main["radius_max_px"]),
            gap_px=_pair(main["gap_px"]),
            corner_clearance_px=float(main["corner_clearance_px"]),
            diameter_px=_pair(main["diameter_px"]),
            amplitude_px=_pair(main["amplitude_px"]),
            frequency=_pair(main["frequency"]),
            dashed=bool(main["dashed"]),
            max_attempts=int(main["max_attempts"]),
        ),
        flankers=FlankerConfig(
            kind=fl["kind"],
            count=_pair(fl["count"]),
            segment_length_px=_pair(fl["segment_length_px"]),
            short_segment_length_px=(
                _pair(fl["short_segment_length_px"]) if fl["short_segment_length_px"] else None
            ),
            min_center_distance_px=float(fl["min_center_distance_px"]),
            min_inter_segment_angle_deg=float(fl["min_inter_segment_angle_deg"]),
            diameter_px=_pair(fl["diameter_px"]) if fl["diameter_px"] else None,
            max_attempts_per_flanker=int(fl["max_attempts_per_flanker"]),
        ),
        placement=PlacementConfig(
            mode=pl["mode"],
            margin_px=float(pl["margin_px"]),
            slots=tuple(tuple(s) for s in slots) if slots else None,
            slot_max_abs_radius_px=float(pl["slot_max_abs_radius_px"]),
        ),
        style=StyleConfig(
            width_px=float(st["width_px"]),
            color=st["color"],
            dashed=bool(st["dashed"]),
        ),
        binarize_threshold=raw.get("binarize_threshold", defaults["binarize_threshold"]),
    )


def load_catalog(path: str | Path | None = None) -> dict[str, VariantConfig]:
    """Parse the variant catalog. ``path=None`` loads the packaged file."""
    if path is None:
        text = resources.files("perceptlab").joinpath("data/variant_catalog.json").read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    if doc.get("schema_version") != 1 or doc.get("catalog") != "perceptlab-variants":
        raise CatalogError("unrecognized variant catalog file")
    defaults = doc["defaults"]
    slot_table = doc.get("slot_positions", {})
    return {
        vid: _parse_variant(vid, raw, defaults, slot_table)
        for vid, raw in doc["variants"].items()
    }


def variant_catalog(path: str | Path | None = None) -> list[VariantConfig]:
    """All 16 configurations: i.i.d. training plus generalization variants 1-15."""
    return list(load_catalog(path).values())


def get_variant(variant_id: str, path: str | Path | None = None) -> VariantConfig:
    catalog = load_catalog(path)
    if variant_id not in catalog:
        raise CatalogError(
            f"unknown variant {variant_id!r}; known: {', '.join(catalog)}"
        )
    return catalog[variant_id]
