"""Pair generation: one (open, closed) stimulus pair per (seed, variant, index).

The two members share every sampled quantity except the main contour's
openness, so they are almost identical images with exactly the same flankers.
"""

from __future__ import annotations

import math

from .geometry import (
    FRAME_PX,
    CurvyParams,
    Flanker,
    GenerationError,
    Polyline,
    StimulusGeometry,
    closed_curvy,
    dash_contour,
    dash_open_contour,
    open_curvy,
    sample_curvy_params,
    sample_flankers,
    sample_polygon_main,
)
from .rng import Rng, derive_seed
from .variants import VariantConfig


def _polygon_mains(rng: Rng, cfg: VariantConfig):
    n = rng.randint(cfg.main.edge_count[0], cfg.main.edge_count[1])
    spec, closed, opened = sample_polygon_main(
        rng,
        n,
        radius_max=cfg.main.radius_max_px,
        gap_range=cfg.main.gap_px,
        min_clearance=cfg.main.corner_clearance_px,
        placement_margin=cfg.placement.margin_px,
        max_attempts=cfg.main.max_attempts,
    )
    return spec, [closed], [opened]


def _curvy_strokes(params: CurvyParams, dashed: bool) -> tuple[list[Polyline], list[Polyline]]:
    if dashed:
        return dash_contour(params), dash_open_contour(params)
    return [closed_curvy(params)], [open_curvy(params)]


def _curvy_mains(rng: Rng, cfg: VariantConfig, center: tuple[float, float], max_abs_radius: float):
    params = sample_curvy_params(
        rng,
        diameter_range=cfg.main.diameter_px,
        amplitude_range=cfg.main.amplitude_px,
        frequency_range=cfg.main.frequency,
        center=center,
        max_abs_radius=max_abs_radius,
        max_attempts=cfg.main.max_attempts,
    )
    closed, opened = _curvy_strokes(params, cfg.main.dashed)
    return params, closed, opened


def _curvy_flanker(rng: Rng, cfg: VariantConfig, kind: str, center: tuple[float, float]) -> Flanker:
    diameter = cfg.flankers.diameter_px or cfg.main.diameter_px
    params = sample_curvy_params(
        rng,
        diameter_range=diameter,
        amplitude_range=cfg.main.amplitude_px,
        frequency_range=cfg.main.frequency,
        center=center,
        max_abs_radius=cfg.placement.slot_max_abs_radius_px,
        max_attempts=cfg.main.max_attempts,
    )
    if kind == "curvy_dashed_closed":
        return Flanker(kind=kind, polylines=dash_contour(params))
    return Flanker(kind=kind, polylines=[open_curvy(params)])


def generate_pair(
    master_seed: int, variant: VariantConfig, index: int
) -> tuple[StimulusGeometry, StimulusGeometry]:
    """Build the open and closed member of pair ``index``.

    Pure in (master_seed, variant, index): repeated calls, in any order or
    thread, return identical geometry.
    """
    seed = derive_seed(master_seed, variant.variant_id, index)
    rng = Rng(seed)
    pair_id = f"{variant.variant_id}-{index:06d}"

    polygon_spec = None
    curvy_params = None

    if variant.main.kind == "polygon":
        polygon_spec, main_closed, main_open = _polygon_mains(rng, variant)
        if variant.flankers.kind == "lines":
            flankers = sample_flankers(
                rng,
                main_open,
                main_closed,
                count_range=variant.flankers.count,
                segment_length_range=variant.flankers.segment_length_px,
                short_segment_length_range=variant.flankers.short_segment_length_px,
                min_center_distance=variant.flankers.min_center_distance_px,
                min_inter_segment_angle_deg=variant.flankers.min_inter_segment_angle_deg,
                max_attempts_per_flanker=variant.flankers.max_attempts_per_flanker,
            )
        elif variant.flankers.kind == "none":
            flankers = []
        else:
            raise GenerationError(
                f"variant {variant.variant_id}: flanker kind {variant.flankers.kind} "
                "not supported with polygon main contours"
            )
    elif variant.main.kind == "curvy":
        placement = variant.placement
        if placement.mode == "slots":
            if not placement.slots:
                raise GenerationError(f"variant {variant.variant_id}: slot placement without slots")
            slots = list(placement.slots)
            main_slot = rng.choice(slots)
            remaining = [s for s in slots if s != main_slot]
            curvy_params, main_closed, main_open = _curvy_mains(
                rng, variant, main_slot, placement.slot_max_abs_radius_px
            )
            if variant.flankers.kind in ("curvy_open", "curvy_dashed_closed"):
                k = rng.randint(variant.flankers.count[0], variant.flankers.count[1])
                k = min(k, len(remaining))
                chosen = rng.sample_without_replacement(remaining, k)
                flankers = [
                    _curvy_flanker(rng, variant, variant.flankers.kind, slot) for slot in chosen
                ]
            else:
                flankers = []
        else:
            center = (FRAME_PX / 2.0, FRAME_PX / 2.0)
            max_abs = min(center) - placement.margin_px
            curvy_params, main_closed, main_open = _curvy_mains(rng, variant, center, max_abs)
            flankers = []
    else:
        raise GenerationError(f"unknown main contour kind {variant.main.kind!r}")

    common = dict(
        main_closed=main_closed,
        main_open=main_open,
        flankers=flankers,
        variant_id=variant.variant_id,
        pair_id=pair_id,
        seed=seed,
        contour_kind=variant.main.kind,
        polygon_spec=polygon_spec,
        curvy_params=curvy_params,
    )
    return (
        StimulusGeometry(member="open", **common),
        StimulusGeometry(member="closed", **common),
    )
