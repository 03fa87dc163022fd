//! Planar primitives: points, closed rectangles, angular sweeps and quadrants.
//!
//! All arithmetic is plain `f64`. Positions are generated rather than measured,
//! so comparisons are exact unless a caller states a tolerance.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("point {0} coincides with the quadrant center")]
    CoincidentPoint(Point),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Direction of `other` as seen from `self`, in `(-π, π]`.
    pub fn bearing_to(&self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }

    pub fn midpoint(&self, other: Point) -> Point {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    /// Point at `length` along the ray leaving `self` at angle `theta`.
    pub fn offset(&self, theta: f64, length: f64) -> Point {
        Point::new(self.x + length * theta.cos(), self.y + length * theta.sin())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn distance(p: Point, q: Point) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

pub fn distance_squared(p: Point, q: Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    dx * dx + dy * dy
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    /// Builds the rectangle spanned by two opposite corners, in any order.
    pub fn from_corners(a: Point, b: Point) -> Self {
        Self {
            min: Point::new(a.x.min(b.x), a.y.min(b.y)),
            max: Point::new(a.x.max(b.x), a.y.max(b.y)),
        }
    }

    pub fn center(&self) -> Point {
        self.min.midpoint(self.max)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        rect_contains(self, p)
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    /// Closed-set intersection test (touching edges count).
    pub fn intersects(&self, other: &Rect) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }
}

pub fn rect_contains(r: &Rect, p: Point) -> bool {
    r.min.x <= p.x && p.x <= r.max.x && r.min.y <= p.y && p.y <= r.max.y
}

/// Smallest rectangle holding both `p` and `r`.
pub fn bounding_rect(p: Point, r: &Rect) -> Rect {
    Rect {
        min: Point::new(p.x.min(r.min.x), p.y.min(r.min.y)),
        max: Point::new(p.x.max(r.max.x), p.y.max(r.max.y)),
    }
}

/// Counterclockwise sweep from `from_dir` to `to_dir`, in `[0, 2π)`.
pub fn angle_ccw(from_dir: f64, to_dir: f64) -> f64 {
    let sweep = (to_dir - from_dir).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if sweep >= TAU {
        0.0
    } else {
        sweep
    }
}

/// Picks the neighbor reached first when sweeping from `reference` in the
/// given rotational sense. A neighbor lying exactly on the reference ray is
/// reached last (full turn). Ties on angle go to the nearer neighbor, then to
/// the lower index.
fn sweep_first(at: Point, reference: Point, neighbors: &[Point], counterclockwise: bool) -> usize {
    assert!(!neighbors.is_empty(), "angular sweep needs at least one neighbor");
    let start = at.bearing_to(reference);
    let key = |q: Point| {
        let dir = at.bearing_to(q);
        let sweep = if counterclockwise {
            angle_ccw(start, dir)
        } else {
            angle_ccw(dir, start)
        };
        let sweep = if sweep == 0.0 { TAU } else { sweep };
        (sweep, distance_squared(at, q))
    };
    let mut best = 0;
    let mut best_key = key(neighbors[0]);
    for (i, &q) in neighbors.iter().enumerate().skip(1) {
        let k = key(q);
        if k.0 < best_key.0 || (k.0 == best_key.0 && k.1 < best_key.1) {
            best = i;
            best_key = k;
        }
    }
    best
}

/// Right-hand rule: the first neighbor counterclockwise about `at`, starting
/// from the direction of `incoming_from`.
///
/// Callers pass neighbors ordered by node id so that index order doubles as
/// the final tie-break.
pub fn right_hand_next(at: Point, incoming_from: Point, neighbors: &[Point]) -> usize {
    sweep_first(at, incoming_from, neighbors, true)
}

/// Mirror of [`right_hand_next`]: first neighbor clockwise.
pub fn left_hand_next(at: Point, incoming_from: Point, neighbors: &[Point]) -> usize {
    sweep_first(at, incoming_from, neighbors, false)
}

/// One of the four portions a node's radio range is divided into.
///
/// Each quadrant owns the half-open angular interval `(k·π/2, (k+1)·π/2]`,
/// so the positive y axis is NE, the negative x axis NW, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    NE,
    NW,
    SW,
    SE,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::NE, Quadrant::NW, Quadrant::SW, Quadrant::SE];

    fn ordinal(self) -> u8 {
        match self {
            Quadrant::NE => 0,
            Quadrant::NW => 1,
            Quadrant::SW => 2,
            Quadrant::SE => 3,
        }
    }

    /// Angle of the boundary ray reached last when sweeping counterclockwise
    /// through the quadrant.
    pub fn ccw_boundary(self) -> f64 {
        f64::from(self.ordinal() + 1) * FRAC_PI_2
    }

    /// Angle of the boundary ray reached last when sweeping clockwise.
    pub fn cw_boundary(self) -> f64 {
        f64::from(self.ordinal()) * FRAC_PI_2
    }

    /// Bounding box of the quarter disk of `radius` centred at `center`.
    pub fn quarter_disk_bounds(self, center: Point, radius: f64) -> Rect {
        let (sx, sy) = match self {
            Quadrant::NE => (1.0, 1.0),
            Quadrant::NW => (-1.0, 1.0),
            Quadrant::SW => (-1.0, -1.0),
            Quadrant::SE => (1.0, -1.0),
        };
        Rect::from_corners(
            center,
            Point::new(center.x + sx * radius, center.y + sy * radius),
        )
    }
}

pub fn quadrant_of(center: Point, p: Point) -> Result<Quadrant, GeometryError> {
    let dx = p.x - center.x;
    let dy = p.y - center.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(GeometryError::CoincidentPoint(p));
    }
    let q = if dx >= 0.0 && dy > 0.0 {
        Quadrant::NE
    } else if dx < 0.0 && dy >= 0.0 {
        Quadrant::NW
    } else if dx <= 0.0 && dy < 0.0 {
        Quadrant::SW
    } else {
        Quadrant::SE
    };
    Ok(q)
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// True iff the open segments `a1a2` and `b1b2` cross at a single point
/// interior to both. Touching at an endpoint or colinear overlap is not a
/// proper crossing.
pub fn segments_properly_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Crossing point of two properly intersecting segments.
pub fn segment_crossing(a1: Point, a2: Point, b1: Point, b2: Point) -> Option<Point> {
    if !segments_properly_intersect(a1, a2, b1, b2) {
        return None;
    }
    let rx = a2.x - a1.x;
    let ry = a2.y - a1.y;
    let sx = b2.x - b1.x;
    let sy = b2.y - b1.y;
    let denom = rx * sy - ry * sx;
    let t = ((b1.x - a1.x) * sy - (b1.y - a1.y) * sx) / denom;
    Some(Point::new(a1.x + t * rx, a1.y + t * ry))
}

/// Normalises any angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    angle_ccw(0.0, theta)
}
