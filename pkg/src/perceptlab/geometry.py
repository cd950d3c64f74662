"""Vector geometry of contour stimuli: polygon and radial-frequency main
contours (closed and open versions) plus flanker lines, sampled under hard
distance constraints.

All coordinates are continuous pixels in the final 256-px frame; the
rasterizer scales them up by its supersampling factor. Generation is a pure
function of the per-stimulus random stream, so a (master_seed, variant,
index) triple always yields the same geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import Rng

FRAME_PX = 256
TWO_PI = 2.0 * math.pi

# Phase removed for the open version of a radial-frequency contour.
OPEN_SEGMENT_PHASE = math.pi / 3.0
# Dashing: 20 masked segments of pi/20 each, evenly distributed.
DASH_COUNT = 20
DASH_SEGMENT_PHASE = math.pi / 20.0
# Vertices per full turn when discretizing a radial-frequency contour.
CURVY_SAMPLES_PER_TURN = 720


class GenerationError(RuntimeError):
    """Rejection sampling ran out of attempts; parameters are over-constrained."""


# ---------------------------------------------------------------------------
# primitive types


@dataclass(frozen=True)
class PointPx:
    x: float
    y: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


class Polyline:
    """Ordered vertex chain. A closed polyline stores its first point again
    as the last point, exactly."""

    __slots__ = ("points", "closed")

    def __init__(self, points: np.ndarray, closed: bool):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("polyline needs at least two 2-D points")
        self.points = pts
        self.closed = bool(closed)

    @classmethod
    def open_chain(cls, points) -> "Polyline":
        return cls(np.asarray(points, dtype=np.float64), closed=False)

    @classmethod
    def closed_loop(cls, points) -> "Polyline":
        """Close the chain by repeating the first vertex at the end."""
        pts = np.asarray(points, dtype=np.float64)
        if not np.array_equal(pts[0], pts[-1]):
            pts = np.vstack([pts, pts[:1]])
        return cls(pts, closed=True)

    def segments(self) -> np.ndarray:
        """(n_edges, 2, 2) array of consecutive vertex pairs."""
        return np.stack([self.points[:-1], self.points[1:]], axis=1)

    def segment_midpoints(self) -> np.ndarray:
        return 0.5 * (self.points[:-1] + self.points[1:])

    def translated(self, dx: float, dy: float) -> "Polyline":
        return Polyline(self.points + np.array([dx, dy]), self.closed)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polyline)
            and self.closed == other.closed
            and np.array_equal(self.points, other.points)
        )

    def __repr__(self) -> str:
        kind = "closed" if self.closed else "open"
        return f"Polyline({kind}, {len(self.points)} pts)"


@dataclass
class PolygonMainSpec:
    """Sampled parameters of a straight-line main contour."""

    n: int
    angles: np.ndarray          # sorted ascending, radians
    radii: np.ndarray           # px, in (0, radius_max]
    gap_angle_index: int        # which angle carries two radii in the open version
    gap_distance: float         # px, radial separation of the two gap points
    gap_radii: tuple[float, float]  # (first drawn, last drawn)
    center: tuple[float, float]     # translation applied after acceptance


@dataclass
class CurvyParams:
    """Radius-modulated circle: r(phi) = A1*sin(f1*(phi+t1)) + A2*sin(f2*(phi+t2)) + r_c."""

    r_c: float
    a1: float
    a2: float
    f1: int
    f2: int
    theta1: float
    theta2: float
    open_phase: float
    dash_phase: float
    center: tuple[float, float]


@dataclass
class Flanker:
    """Distractor element: 1-2 straight segments, or a curvy contour."""

    kind: str                      # "lines" | "curvy_open" | "curvy_dashed_closed"
    polylines: list[Polyline]
    segment_lengths: tuple[float, ...] = ()

    def segment_midpoints(self) -> np.ndarray:
        return np.vstack([p.segment_midpoints() for p in self.polylines])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Flanker)
            and self.kind == other.kind
            and self.segment_lengths == other.segment_lengths
            and len(self.polylines) == len(other.polylines)
            and all(a == b for a, b in zip(self.polylines, other.polylines))
        )


@dataclass
class StimulusGeometry:
    """One stimulus of a generated pair. Both pair members carry both main
    contour versions plus the shared flankers; ``member`` says which main
    contour this stimulus actually displays."""

    main_closed: list[Polyline]    # strokes (several when dashed)
    main_open: list[Polyline]
    flankers: list[Flanker]
    variant_id: str
    pair_id: str
    seed: int
    member: str                    # "open" | "closed"
    contour_kind: str = "polygon"  # "polygon" | "curvy"
    polygon_spec: PolygonMainSpec | None = None
    curvy_params: CurvyParams | None = None

    @property
    def main_strokes(self) -> list[Polyline]:
        return self.main_open if self.member == "open" else self.main_closed

    @property
    def label(self) -> int:
        return 0 if self.member == "open" else 1


# ---------------------------------------------------------------------------
# small geometric helpers


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    proj = a + t * ab
    return float(np.hypot(*(p - proj)))


def _corner_clearance_ok(poly: Polyline, min_clearance: float) -> bool:
    """Every vertex must stay at least ``min_clearance`` away from every edge
    it is not an endpoint of."""
    pts = poly.points[:-1] if poly.closed else poly.points
    segs = poly.segments()
    n_edges = len(segs)
    n_pts = len(pts)
    for i in range(n_pts):
        for j in range(n_edges):
            if poly.closed:
                adjacent = j == i or j == (i - 1) % n_edges
            else:
                adjacent = j == i or j == i - 1
            if adjacent:
                continue
            if point_segment_distance(pts[i], segs[j, 0], segs[j, 1]) < min_clearance:
                return False
    return True


def _bbox(arrays: list[np.ndarray]) -> tuple[float, float, float, float]:
    allpts = np.vstack(arrays)
    return (
        float(allpts[:, 0].min()),
        float(allpts[:, 1].min()),
        float(allpts[:, 0].max()),
        float(allpts[:, 1].max()),
    )


# ---------------------------------------------------------------------------
# polygon main contour


def sample_polygon_main(
    rng: Rng,
    n: int,
    *,
    frame: int = FRAME_PX,
    radius_max: float = 128.0,
    gap_range: tuple[float, float] = (20.0, 50.0),
    min_clearance: float = 10.0,
    placement_margin: float = 3.0,
    max_attempts: int = 1000,
) -> tuple[PolygonMainSpec, Polyline, Polyline]:
    """Sample a main contour with ``n`` edges.

    Returns the accepted spec plus the closed and open polylines, already
    placed at a random in-bounds position. Candidates whose corner points
    come closer than ``min_clearance`` px to a non-adjacent edge (in either
    version) are rejected and resampled.
    """
    if not 3 <= n <= 14:
        raise ValueError(f"edge count {n} outside supported range 3..14")
    for _ in range(max_attempts):
        angles = np.sort(np.array([rng.uniform(0.0, TWO_PI) for _ in range(n)]))
        radii = np.array([rng.uniform_open_low(0.0, radius_max) for _ in range(n)])

        gi = rng.randint(0, n - 1)
        gap = rng.uniform(gap_range[0], gap_range[1])
        # Shift the split midpoint so both gap radii stay inside (0, radius_max].
        mid = min(max(radii[gi], gap / 2.0 + 0.5), radius_max - gap / 2.0)
        r_lo, r_hi = mid - gap / 2.0, mid + gap / 2.0
        gap_radii = (r_lo, r_hi) if rng.coin() else (r_hi, r_lo)

        cos_a, sin_a = np.cos(angles), np.sin(angles)
        pts = np.stack([radii * cos_a, radii * sin_a], axis=1)
        closed = Polyline.closed_loop(pts)

        # Open version: walk the other vertices in angular order, starting
        # and ending on the split angle with its two radii.
        order = [(gi + k) % n for k in range(1, n)]
        open_pts = np.vstack(
            [
                [gap_radii[0] * cos_a[gi], gap_radii[0] * sin_a[gi]],
                pts[order],
                [gap_radii[1] * cos_a[gi], gap_radii[1] * sin_a[gi]],
            ]
        )
        opened = Polyline.open_chain(open_pts)

        if not (_corner_clearance_ok(closed, min_clearance) and _corner_clearance_ok(opened, min_clearance)):
            continue

        minx, miny, maxx, maxy = _bbox([closed.points, opened.points])
        lo_x, hi_x = placement_margin - minx, frame - placement_margin - maxx
        lo_y, hi_y = placement_margin - miny, frame - placement_margin - maxy
        if lo_x > hi_x or lo_y > hi_y:
            continue  # shape too large for the frame at this margin
        dx, dy = rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)

        spec = PolygonMainSpec(
            n=n,
            angles=angles,
            radii=radii,
            gap_angle_index=gi,
            gap_distance=gap,
            gap_radii=gap_radii,
            center=(dx, dy),
        )
        return spec, closed.translated(dx, dy), opened.translated(dx, dy)

    raise GenerationError(
        f"polygon main contour: no candidate with n={n} passed the "
        f"{min_clearance}-px clearance rule in {max_attempts} attempts"
    )


# ---------------------------------------------------------------------------
# radial-frequency ("curvy") main contour


def eval_curvy_radius(params: CurvyParams, phi: float | np.ndarray):
    """Radius of the modulated circle at phase ``phi`` (exact formula)."""
    return (
        params.a1 * np.sin(params.f1 * (phi + params.theta1))
        + params.a2 * np.sin(params.f2 * (phi + params.theta2))
        + params.r_c
    )


def _curvy_points(params: CurvyParams, phases: np.ndarray) -> np.ndarray:
    r = eval_curvy_radius(params, phases)
    cx, cy = params.center
    return np.stack([cx + r * np.cos(phases), cy + r * np.sin(phases)], axis=1)


def closed_curvy(params: CurvyParams, samples_per_turn: int = CURVY_SAMPLES_PER_TURN) -> Polyline:
    phases = TWO_PI * np.arange(samples_per_turn) / samples_per_turn
    return Polyline.closed_loop(_curvy_points(params, phases))


def open_curvy(params: CurvyParams, samples_per_turn: int = CURVY_SAMPLES_PER_TURN) -> Polyline:
    """Arc sweeping exactly 2*pi - pi/3, the removed segment starting at
    ``params.open_phase``."""
    sweep = TWO_PI - OPEN_SEGMENT_PHASE
    n = max(2, round(samples_per_turn * sweep / TWO_PI))
    phases = params.open_phase + OPEN_SEGMENT_PHASE + sweep * np.arange(n + 1) / n
    return Polyline.open_chain(_curvy_points(params, phases))


def _visible_dash_windows(params: CurvyParams) -> list[tuple[float, float]]:
    """Phase windows kept visible by the dash mask, over one full turn
    anchored at ``dash_phase``. Masked and visible segments alternate with
    period 2*pi/20; each masked segment spans pi/20."""
    period = TWO_PI / DASH_COUNT
    out = []
    for k in range(DASH_COUNT):
        start = params.dash_phase + k * period + DASH_SEGMENT_PHASE
        out.append((start, start + period - DASH_SEGMENT_PHASE))
    return out


def _arc_polyline(params: CurvyParams, start: float, end: float,
                  samples_per_turn: int = CURVY_SAMPLES_PER_TURN) -> Polyline:
    n = max(1, round(samples_per_turn * (end - start) / TWO_PI))
    phases = start + (end - start) * np.arange(n + 1) / n
    return Polyline.open_chain(_curvy_points(params, phases))


def dash_contour(params: CurvyParams, samples_per_turn: int = CURVY_SAMPLES_PER_TURN) -> list[Polyline]:
    """Dashed closed contour: the 20 visible arcs of the dash mask."""
    return [
        _arc_polyline(params, s, e, samples_per_turn)
        for s, e in _visible_dash_windows(params)
    ]


def dash_open_contour(params: CurvyParams, samples_per_turn: int = CURVY_SAMPLES_PER_TURN) -> list[Polyline]:
    """Open + dashed: remove the pi/3 segment first, then apply the dash mask."""
    vis_lo = params.open_phase + OPEN_SEGMENT_PHASE
    vis_hi = params.open_phase + TWO_PI
    arcs = []
    # Repeat the dash windows across adjacent turns so the open arc, wherever
    # it starts, is fully covered.
    for s, e in _visible_dash_windows(params):
        for shift in (-TWO_PI, 0.0, TWO_PI):
            lo, hi = max(s + shift, vis_lo), min(e + shift, vis_hi)
            if hi - lo > 1e-12:
                arcs.append(_arc_polyline(params, lo, hi, samples_per_turn))
    return arcs


def sample_curvy_params(
    rng: Rng,
    *,
    diameter_range: tuple[float, float] = (50.0, 100.0),
    amplitude_range: tuple[float, float] = (15.0, 45.0),
    frequency_range: tuple[int, int] = (1, 6),
    center: tuple[float, float] = (FRAME_PX / 2, FRAME_PX / 2),
    max_abs_radius: float | None = None,
    max_attempts: int = 1000,
) -> CurvyParams:
    """Sample modulation parameters, rejecting shapes whose realized radius
    magnitude exceeds ``max_abs_radius`` anywhere on the sample grid (keeps
    the contour inside the frame, or inside its placement slot)."""
    if max_abs_radius is None:
        max_abs_radius = min(center[0], center[1], FRAME_PX - center[0], FRAME_PX - center[1]) - 3.0
    probe = TWO_PI * np.arange(CURVY_SAMPLES_PER_TURN) / CURVY_SAMPLES_PER_TURN
    for _ in range(max_attempts):
        params = CurvyParams(
            r_c=rng.uniform(diameter_range[0], diameter_range[1]) / 2.0,
            a1=rng.uniform(amplitude_range[0], amplitude_range[1]),
            a2=rng.uniform(amplitude_range[0], amplitude_range[1]),
            f1=rng.randint(frequency_range[0], frequency_range[1]),
            f2=rng.randint(frequency_range[0], frequency_range[1]),
            theta1=rng.uniform(0.0, TWO_PI),
            theta2=rng.uniform(0.0, TWO_PI),
            open_phase=rng.uniform(0.0, TWO_PI),
            dash_phase=rng.uniform(0.0, TWO_PI),
            center=center,
        )
        if float(np.abs(eval_curvy_radius(params, probe)).max()) <= max_abs_radius:
            return params
    raise GenerationError(
        f"curvy contour: no parameter draw fit |r| <= {max_abs_radius:.1f} px "
        f"in {max_attempts} attempts (diameter range {diameter_range})"
    )


# ---------------------------------------------------------------------------
# flankers


def _main_line_centers(strokes: list[Polyline]) -> np.ndarray:
    return np.vstack([p.segment_midpoints() for p in strokes])


def _build_line_flanker(n_segments: int, lengths: tuple[float, ...],
                        position: np.ndarray, direction: float, spread: float) -> Flanker:
    if n_segments == 1:
        u = np.array([math.cos(direction), math.sin(direction)])
        half = lengths[0] / 2.0
        poly = Polyline.open_chain([position - half * u, position + half * u])
        return Flanker(kind="lines", polylines=[poly], segment_lengths=lengths)
    # Two segments sharing a joint, separated by at least the configured angle.
    u1 = np.array([math.cos(direction), math.sin(direction)])
    d2 = direction + spread
    u2 = np.array([math.cos(d2), math.sin(d2)])
    polys = [
        Polyline.open_chain([position, position + lengths[0] * u1]),
        Polyline.open_chain([position, position + lengths[1] * u2]),
    ]
    return Flanker(kind="lines", polylines=polys, segment_lengths=lengths)


def sample_flankers(
    rng: Rng,
    main_open: list[Polyline],
    main_closed: list[Polyline],
    *,
    count_range: tuple[int, int] = (10, 25),
    segment_length_range: tuple[float, float] = (32.0, 64.0),
    short_segment_length_range: tuple[float, float] | None = None,
    min_center_distance: float = 10.0,
    min_inter_segment_angle_deg: float = 45.0,
    frame: int = FRAME_PX,
    max_attempts_per_flanker: int = 10_000,
) -> list[Flanker]:
    """Add straight-line flankers one by one.

    Segment midpoints must stay at least ``min_center_distance`` px from the
    midpoints of every line already in the image, counting the edges of BOTH
    main contour versions so the open and closed pair member can share the
    exact same flankers. A failed candidate keeps its size and segment count
    and is retried at a new position.
    """
    count = rng.randint(count_range[0], count_range[1])
    if count == 0:
        return []
    protected = [_main_line_centers(main_open), _main_line_centers(main_closed)]
    flankers: list[Flanker] = []
    min_angle = math.radians(min_inter_segment_angle_deg)

    for _ in range(count):
        n_segments = 2 if rng.coin() else 1
        if n_segments == 2 and short_segment_length_range is not None:
            lengths = (
                rng.uniform(segment_length_range[0], segment_length_range[1]),
                rng.uniform(short_segment_length_range[0], short_segment_length_range[1]),
            )
        elif n_segments == 2:
            length = rng.uniform(segment_length_range[0], segment_length_range[1])
            lengths = (length, length)
        else:
            lengths = (rng.uniform(segment_length_range[0], segment_length_range[1]),)
        direction = rng.uniform(0.0, TWO_PI)
        # Unsigned angle between the two segment directions lands in
        # [min_angle, pi] when the signed offset avoids (-min_angle, min_angle).
        spread = rng.uniform(min_angle, TWO_PI - min_angle) if n_segments == 2 else 0.0

        placed = None
        for _attempt in range(max_attempts_per_flanker):
            position = np.array([rng.uniform(0.0, frame), rng.uniform(0.0, frame)])
            candidate = _build_line_flanker(n_segments, lengths, position, direction, spread)
            centers = candidate.segment_midpoints()
            ok = True
            for block in protected:
                d2 = ((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
                if float(d2.min()) < min_center_distance ** 2:
                    ok = False
                    break
            if ok:
                placed = candidate
                break
        if placed is None:
            raise GenerationError(
                f"flanker placement: {max_attempts_per_flanker} attempts exhausted "
                f"with {len(flankers)} of {count} flankers placed"
            )
        flankers.append(placed)
        protected.append(placed.segment_midpoints())
    return flankers


def validate_geometry(g: StimulusGeometry, *, config=None) -> list[str]:
    """Re-check every generation invariant; returns human-readable violations.

    ``config`` is the VariantConfig the stimulus was generated under; without
    it the training-configuration constraints are assumed.
    """
    from .variants import VariantConfig  # local import to avoid a cycle

    cfg: VariantConfig | None = config
    violations: list[str] = []

    def check(cond: bool, msg: str):
        if not cond:
            violations.append(msg)

    # Closure bookkeeping.
    for poly in g.main_closed + g.main_open + [p for f in g.flankers for p in f.polylines]:
        if poly.closed:
            check(np.array_equal(poly.points[0], poly.points[-1]),
                  "closed polyline: first point != last point")
        check(np.all(np.isfinite(poly.points)), "polyline: non-finite coordinate")
        steps = np.linalg.norm(np.diff(poly.points, axis=0), axis=1)
        check(float(steps.min()) > 0.0, "polyline: consecutive duplicate points")

    # Main contour points inside the frame.
    for poly in g.main_closed + g.main_open:
        pts = poly.points
        inside = (pts >= 0).all() and (pts <= FRAME_PX).all()
        check(bool(inside), "main contour: point outside image bounds")

    if g.contour_kind == "polygon" and g.polygon_spec is not None:
        spec = g.polygon_spec
        check(bool((spec.radii > 0).all() and (spec.radii <= 128.0 + 1e-9).all()),
              "polygon: radius outside (0, 128]")
        gap_lo, gap_hi = (cfg.main.gap_px if cfg else (20.0, 50.0))
        check(gap_lo - 1e-9 <= spec.gap_distance <= gap_hi + 1e-9,
              f"polygon: gap distance {spec.gap_distance:.2f} outside [{gap_lo}, {gap_hi}]")
        opened = g.main_open[0]
        actual_gap = float(np.hypot(*(opened.points[0] - opened.points[-1])))
        check(abs(actual_gap - spec.gap_distance) < 1e-6,
              "polygon: realized gap length != sampled gap distance")
        clearance = cfg.main.corner_clearance_px if cfg else 10.0
        for name, poly in (("closed", g.main_closed[0]), ("open", opened)):
            check(_corner_clearance_ok(poly, clearance),
                  f"polygon ({name}): corner point closer than {clearance} px to a non-adjacent edge")

    if g.contour_kind == "curvy" and g.curvy_params is not None:
        # Discretized vertices must sit exactly on the radius formula.
        for poly in g.main_closed + g.main_open:
            pts = poly.points
            cx, cy = g.curvy_params.center
            rel = pts - np.array([cx, cy])
            phi = np.arctan2(rel[:, 1], rel[:, 0])
            dist = np.hypot(rel[:, 0], rel[:, 1])
            expected = eval_curvy_radius(g.curvy_params, phi)
            # A negative formula radius flips the point through the center;
            # such a point at observed phase phi was generated at phi + pi.
            expected_alt = -eval_curvy_radius(g.curvy_params, phi + math.pi)
            err = np.minimum(np.abs(dist - expected), np.abs(dist - expected_alt))
            check(float(err.max()) < 1e-6, "curvy: vertex off the radius formula")

    # Flanker constraints (straight-line flankers only).
    line_flankers = [f for f in g.flankers if f.kind == "lines"]
    if line_flankers:
        if cfg is not None and cfg.flankers.kind == "lines":
            lo, hi = cfg.flankers.segment_length_px
            short = cfg.flankers.short_segment_length_px
            min_dist = cfg.flankers.min_center_distance_px
            min_angle = cfg.flankers.min_inter_segment_angle_deg
        else:
            lo, hi, short, min_dist, min_angle = 32.0, 64.0, None, 10.0, 45.0
        for fi, f in enumerate(line_flankers):
            for si, poly in enumerate(f.polylines):
                length = float(np.linalg.norm(poly.points[-1] - poly.points[0]))
                if len(f.polylines) == 2 and short is not None and si == 1:
                    check(short[0] - 1e-6 <= length <= short[1] + 1e-6,
                          f"flanker {fi}: short segment length {length:.2f} outside {short}")
                else:
                    check(lo - 1e-6 <= length <= hi + 1e-6,
                          f"flanker {fi}: segment length {length:.2f} outside [{lo}, {hi}]")
            if len(f.polylines) == 2:
                if short is None:
                    l0 = float(np.linalg.norm(f.polylines[0].points[-1] - f.polylines[0].points[0]))
                    l1 = float(np.linalg.norm(f.polylines[1].points[-1] - f.polylines[1].points[0]))
                    check(abs(l0 - l1) < 1e-6, f"flanker {fi}: two-segment lengths differ")
                u1 = f.polylines[0].points[-1] - f.polylines[0].points[0]
                u2 = f.polylines[1].points[-1] - f.polylines[1].points[0]
                cosang = float(u1 @ u2) / (np.linalg.norm(u1) * np.linalg.norm(u2))
                ang = math.degrees(math.acos(min(1.0, max(-1.0, cosang))))
                check(ang >= min_angle - 1e-6,
                      f"flanker {fi}: inter-segment angle {ang:.1f} deg below {min_angle}")
        # Pairwise and flanker-to-main center distances, against both versions.
        blocks = [_main_line_centers(g.main_open), _main_line_centers(g.main_closed)]
        for fi, f in enumerate(line_flankers):
            centers = f.segment_midpoints()
            for block in blocks:
                d2 = ((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
                check(float(d2.min()) >= min_dist ** 2 - 1e-6,
                      f"flanker {fi}: segment center within {min_dist} px of the main contour lines")
            for fj in range(fi + 1, len(line_flankers)):
                other = line_flankers[fj].segment_midpoints()
                d2 = ((other[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
                check(float(d2.min()) >= min_dist ** 2 - 1e-6,
                      f"flankers {fi}/{fj}: segment centers within {min_dist} px")

    return violations
