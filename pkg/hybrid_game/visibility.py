#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""Line of sight between rectangular bodies.

Two bodies see each other when some segment between sampled points on
their boundaries misses every occluder. Intersection tests are done in
the occluder's own frame with closed-set orientation predicates, so a
segment grazing a corner counts as blocked.
"""

import numpy as np
from oslo_log import log as logging
from shapely import geometry as shapely_geometry

from hybrid_game import exception
from hybrid_game import game as game_ops

LOG = logging.getLogger(__name__)

# (p_x, p_y, v, theta) per player
PLAYER_STATE_DIM = 4


def _orientation(p, q, r):
    return ((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) -
            (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))


def _segments_cross(p1, p2, q1, q2):
    d1 = np.sign(_orientation(q1, q2, p1))
    d2 = np.sign(_orientation(q1, q2, p2))
    d3 = np.sign(_orientation(p1, p2, q1))
    d4 = np.sign(_orientation(p1, p2, q2))

    collinear = (d1 == 0) & (d2 == 0)
    straddle = (d1 * d2 <= 0) & (d3 * d4 <= 0) & ~collinear

    lo_p, hi_p = np.minimum(p1, p2), np.maximum(p1, p2)
    lo_q, hi_q = np.minimum(q1, q2), np.maximum(q1, q2)
    boxes = np.all((lo_p <= hi_q) & (lo_q <= hi_p), axis=-1)
    return straddle | (collinear & boxes)


def _to_local(points, rect):
    c, s = np.cos(rect.heading), np.sin(rect.heading)
    d = np.asarray(points, dtype=np.float64) - rect.center
    return np.stack((c * d[..., 0] + s * d[..., 1],
                     -s * d[..., 0] + c * d[..., 1]), axis=-1)


def segments_intersect_rectangle(starts, ends, rect):
    """Vectorized closed segment versus closed rectangle test.

    :param starts: K x 2 segment start points
    :param ends: K x 2 segment end points
    :param rect: `OrientedRectangle`
    :returns: K booleans
    """
    a = _to_local(np.atleast_2d(starts), rect)
    b = _to_local(np.atleast_2d(ends), rect)
    hl, hw = 0.5 * rect.length, 0.5 * rect.width

    # Distance from the rectangle centre to each segment
    d = b - a
    dd = np.einsum('ij,ij->i', d, d)
    with np.errstate(divide='ignore', invalid='ignore'):
        s = np.where(dd > 0, -np.einsum('ij,ij->i', a, d) / dd, 0.0)
    closest = a + np.clip(s, 0.0, 1.0)[:, None] * d
    near = np.hypot(closest[:, 0], closest[:, 1]) <= rect.radius * (
        1.0 + 1e-12)

    hits = np.zeros(len(a), dtype=bool)
    if not near.any():
        return hits
    a, b = a[near], b[near]

    inside = ((np.abs(a[:, 0]) <= hl) & (np.abs(a[:, 1]) <= hw) |
              (np.abs(b[:, 0]) <= hl) & (np.abs(b[:, 1]) <= hw))
    corners = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    crossed = np.zeros(len(a), dtype=bool)
    for k in range(4):
        crossed |= _segments_cross(a, b, corners[k], corners[(k + 1) % 4])
    hits[near] = inside | crossed
    return hits


def segment_intersects_rectangle(a, b, rect):
    """True iff the closed segment [a, b] meets the closed rectangle."""
    return bool(segments_intersect_rectangle([a], [b], rect)[0])


def _edge_fractions(count):
    # Base-2 radical inverse: the first k values equal the uniform
    # spacing for k = 1 and 3, and every prefix contains the shorter ones.
    fractions = []
    index = 1
    while len(fractions) < count:
        value, denominator, n = 0.0, 1.0, index
        while n:
            denominator *= 2.0
            value += (n & 1) / denominator
            n >>= 1
        fractions.append(value)
        index += 1
    return np.array(sorted(fractions))


def boundary_samples(rect, samples_per_edge):
    """Corners plus `samples_per_edge` interior points on each edge."""
    corners = rect.corners()
    points = [corners]
    fractions = _edge_fractions(samples_per_edge)
    if len(fractions):
        for k in range(4):
            start, end = corners[k], corners[(k + 1) % 4]
            points.append(start + fractions[:, None] * (end - start))
    return np.vstack(points)


def pair_visible(rect_i, rect_j, occluders, samples_per_edge=3):
    """True iff some sampled segment between the bodies is unobstructed.

    :param occluders: list of `OrientedRectangle`, excluding both bodies
    """
    if not occluders:
        return True
    p = boundary_samples(rect_i, samples_per_edge)
    q = boundary_samples(rect_j, samples_per_edge)
    starts = np.repeat(p, len(q), axis=0)
    ends = np.tile(q, (len(p), 1))

    blocked = np.zeros(len(starts), dtype=bool)
    for occluder in occluders:
        blocked |= segments_intersect_rectangle(starts, ends, occluder)
        if blocked.all():
            return False
    return True


def posed_bodies(state, geometry):
    """Place every player's body template at its pose in a joint state."""
    bodies = []
    for k, template in enumerate(geometry):
        px, py, _v, theta = state[PLAYER_STATE_DIM * k:
                                  PLAYER_STATE_DIM * (k + 1)]
        bodies.append(template.posed(px, py, theta))
    return bodies


def occlusion_flags(trajectory, geometry, occluders, pairs,
                    samples_per_edge=3):
    """Per-stage flags, true where any interacting pair is blocked."""
    n_players = len(geometry)
    for pair in pairs:
        for player in pair:
            if not 0 <= player < n_players:
                raise exception.UnknownPlayer(player=player,
                                              n_players=n_players)
    for player in occluders.agents:
        if not 0 <= player < n_players:
            raise exception.UnknownPlayer(player=player,
                                          n_players=n_players)

    flags = []
    for t in range(1, trajectory.horizon + 1):
        bodies = posed_bodies(trajectory.state(t), geometry)
        occluded = False
        for i, j in pairs:
            blocking = list(occluders.static) + [
                bodies[k] for k in occluders.agents if k not in (i, j)]
            if not pair_visible(bodies[i], bodies[j], blocking,
                                samples_per_edge):
                occluded = True
                break
        flags.append(occluded)
    return flags


def find_occlusions(trajectory, geometry, occluders, pairs,
                    samples_per_edge=3):
    """Information schedule of a trajectory iterate.

    The flags are also stored in `trajectory.occluded`.

    :raises `exception.UnknownPlayer` for out of range pair entries
    """
    flags = occlusion_flags(trajectory, geometry, occluders, pairs,
                            samples_per_edge)
    trajectory.occluded = flags
    schedule = game_ops.partition_from_flags(flags)
    LOG.debug("Occluded at %d of %d stages: %r",
              sum(flags), len(flags), schedule)
    return schedule


def rectangles_overlap(rect_a, rect_b, tolerance=1e-9):
    """True iff the interiors of two rectangles share positive area."""
    poly_a = shapely_geometry.Polygon(rect_a.corners())
    poly_b = shapely_geometry.Polygon(rect_b.corners())
    return poly_a.intersection(poly_b).area > tolerance
