// Copyright 2026 The sgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Planar primitives: points, rectangles, the two Minkowski metrics used by
//! the grouping predicates, and convex hulls.
//!
//! All containment tests are boundary-inclusive so a point exactly `eps`
//! away from a group member is treated the same by every code path.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

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

    /// Lexicographic order on `(x, y)`. Coordinates are finite so this is total.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Distance function used by the similarity predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Euclidean distance.
    L2,
    /// Maximum (Chebyshev) distance.
    LInf,
}

impl Metric {
    pub fn distance(self, a: Point, b: Point) -> f64 {
        let dx = (a.x - b.x).abs();
        let dy = (a.y - b.y).abs();
        match self {
            Metric::L2 => (dx * dx + dy * dy).sqrt(),
            Metric::LInf => dx.max(dy),
        }
    }

    /// The similarity predicate: `distance(a, b) <= eps`.
    #[inline]
    pub fn similar(self, a: Point, b: Point, eps: f64) -> bool {
        match self {
            Metric::LInf => (a.x - b.x).abs() <= eps && (a.y - b.y).abs() <= eps,
            Metric::L2 => self.distance(a, b) <= eps,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::L2 => "L2",
            Metric::LInf => "LINF",
        }
    }
}

keyword_enum!(Metric, "metric", {
    L2 => ["l2", "ltwo"],
    LInf => ["linf", "lone", "l-inf"],
});

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn distance(a: Point, b: Point, metric: Metric) -> f64 {
    metric.distance(a, b)
}

pub fn similar(a: Point, b: Point, metric: Metric, eps: f64) -> bool {
    metric.similar(a, b, eps)
}

/// Axis-aligned rectangle with `lo <= hi` in both coordinates. A point is
/// stored as the degenerate rectangle `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Point,
    pub hi: Point,
}

impl Rect {
    /// Builds a rectangle from two corners; returns `None` if `lo > hi` in
    /// either coordinate.
    pub fn new(lo: Point, hi: Point) -> Option<Self> {
        (lo.x <= hi.x && lo.y <= hi.y).then_some(Self { lo, hi })
    }

    pub fn from_coords(x0: f64, y0: f64, x1: f64, y1: f64) -> Option<Self> {
        Self::new(Point::new(x0, y0), Point::new(x1, y1))
    }

    pub fn point(p: Point) -> Self {
        Self { lo: p, hi: p }
    }

    /// The `2 * eps` square centered at `p`.
    pub fn around(p: Point, eps: f64) -> Self {
        Self {
            lo: Point::new(p.x - eps, p.y - eps),
            hi: Point::new(p.x + eps, p.y + eps),
        }
    }

    /// A rectangle covering the whole finite plane.
    pub fn everything() -> Self {
        Self {
            lo: Point::new(f64::MIN, f64::MIN),
            hi: Point::new(f64::MAX, f64::MAX),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> f64 {
        self.hi.y - self.lo.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.lo.x <= p.x && p.x <= self.hi.x && self.lo.y <= p.y && p.y <= self.hi.y
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.lo.x <= other.lo.x
            && other.hi.x <= self.hi.x
            && self.lo.y <= other.lo.y
            && other.hi.y <= self.hi.y
    }

    #[inline]
    pub fn intersects(&self, other: &Rect) -> bool {
        // non-short-circuit: one branch instead of four hard-to-predict ones
        (self.lo.x <= other.hi.x)
            & (other.lo.x <= self.hi.x)
            & (self.lo.y <= other.hi.y)
            & (other.lo.y <= self.hi.y)
    }

    /// Intersection of two rectangles, `None` when they are disjoint.
    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        Rect::new(
            Point::new(self.lo.x.max(other.lo.x), self.lo.y.max(other.lo.y)),
            Point::new(self.hi.x.min(other.hi.x), self.hi.y.min(other.hi.y)),
        )
    }

    /// Smallest rectangle covering both.
    /// Smallest rectangle covering both. Coordinates are assumed finite, so
    /// plain comparisons stand in for the NaN-aware `f64::min`/`max`.
    #[inline]
    pub fn union(&self, other: &Rect) -> Rect {
        let lo = |a: f64, b: f64| if b < a { b } else { a };
        let hi = |a: f64, b: f64| if b > a { b } else { a };
        Rect {
            lo: Point::new(lo(self.lo.x, other.lo.x), lo(self.lo.y, other.lo.y)),
            hi: Point::new(hi(self.hi.x, other.hi.x), hi(self.hi.y, other.hi.y)),
        }
    }

    pub fn enlargement(&self, other: &Rect) -> f64 {
        self.union(other).area() - self.area()
    }
}

pub fn rect_contains(r: &Rect, p: Point) -> bool {
    r.contains(p)
}

pub fn rect_intersects(a: &Rect, b: &Rect) -> bool {
    a.intersects(b)
}

/// z-component of `(a - o) x (b - o)`; positive for a counter-clockwise turn.
#[inline]
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex polygon with vertices in counter-clockwise order, starting at the
/// lexicographically least vertex. Collinear points are dropped, so one or two
/// vertices describe a degenerate hull (a point or a segment).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hull {
    vertices: Vec<Point>,
}

impl Hull {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Inside-or-on-boundary test.
    pub fn contains(&self, p: Point) -> bool {
        match self.vertices.as_slice() {
            [] => false,
            [v] => *v == p,
            [a, b] => on_segment(*a, *b, p),
            vs => {
                let n = vs.len();
                (0..n).all(|i| cross(vs[i], vs[(i + 1) % n], p) >= 0.0)
            }
        }
    }

    /// The vertex farthest from `p` in Euclidean distance. Ties go to the
    /// lexicographically smallest vertex.
    pub fn farthest_vertex(&self, p: Point) -> Option<Point> {
        let mut best: Option<(f64, Point)> = None;
        for &v in &self.vertices {
            let dx = v.x - p.x;
            let dy = v.y - p.y;
            let d2 = dx * dx + dy * dy;
            best = match best {
                None => Some((d2, v)),
                Some((bd, bv)) => {
                    if d2 > bd || (d2 == bd && v.lex_cmp(&bv) == Ordering::Less) {
                        Some((d2, v))
                    } else {
                        Some((bd, bv))
                    }
                }
            };
        }
        best.map(|(_, v)| v)
    }
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    cross(a, b, p) == 0.0
        && a.x.min(b.x) <= p.x
        && p.x <= a.x.max(b.x)
        && a.y.min(b.y) <= p.y
        && p.y <= a.y.max(b.y)
}

/// Andrew's monotone chain. Returns an empty hull only for empty input.
pub fn convex_hull(points: &[Point]) -> Hull {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() <= 2 {
        return Hull { vertices: pts };
    }

    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    // lower chain
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // upper chain
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Hull { vertices: hull }
}

pub fn point_in_hull(p: Point, h: &Hull) -> bool {
    h.contains(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(p(0.0, 0.0), p(3.0, 4.0), Metric::L2), 5.0);
        assert_eq!(distance(p(0.0, 0.0), p(3.0, 4.0), Metric::LInf), 4.0);
        for m in [Metric::L2, Metric::LInf] {
            assert_eq!(distance(p(1.0, 1.0), p(1.0, 1.0), m), 0.0);
        }
    }

    #[test]
    fn similar_is_boundary_inclusive() {
        assert!(similar(p(0.0, 0.0), p(3.0, 0.0), Metric::LInf, 3.0));
        assert!(!similar(p(0.0, 0.0), p(3.0, 4.0), Metric::L2, 4.99));
        assert!(similar(p(0.0, 0.0), p(2.0, 2.0), Metric::L2, 3.0));
        assert!(similar(p(0.0, 0.0), p(3.0, 4.0), Metric::L2, 5.0));
    }

    #[test]
    fn rect_tests() {
        let r = Rect::from_coords(0.0, 0.0, 4.0, 4.0).unwrap();
        assert!(r.contains(p(4.0, 4.0)));
        let a = Rect::from_coords(0.0, 0.0, 2.0, 2.0).unwrap();
        let b = Rect::from_coords(2.0, 2.0, 5.0, 5.0).unwrap();
        assert!(a.intersects(&b));
        let c = Rect::from_coords(0.0, 0.0, 1.0, 1.0).unwrap();
        let d = Rect::from_coords(3.0, 3.0, 4.0, 4.0).unwrap();
        assert!(!c.intersects(&d));
        assert!(Rect::from_coords(1.0, 0.0, 0.0, 1.0).is_none());
    }

    fn square() -> Hull {
        convex_hull(&[
            p(0.0, 0.0),
            p(4.0, 0.0),
            p(4.0, 4.0),
            p(0.0, 4.0),
            p(2.0, 2.0),
        ])
    }

    #[test]
    fn hull_examples() {
        assert_eq!(convex_hull(&[p(0.0, 0.0)]).vertices(), &[p(0.0, 0.0)]);
        assert_eq!(
            square().vertices(),
            &[p(0.0, 0.0), p(4.0, 0.0), p(4.0, 4.0), p(0.0, 4.0)]
        );
    }

    #[test]
    fn hull_drops_collinear_and_duplicates() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(2.0, 0.0)]);
        assert_eq!(h.vertices(), &[p(0.0, 0.0), p(2.0, 0.0)]);
        let h = convex_hull(&[
            p(0.0, 0.0),
            p(2.0, 0.0),
            p(4.0, 0.0),
            p(4.0, 4.0),
            p(0.0, 4.0),
        ]);
        assert_eq!(h.len(), 4);
        assert!(h.contains(p(2.0, 0.0)));
    }

    #[test]
    fn point_in_hull_examples() {
        let h = square();
        assert!(point_in_hull(p(2.0, 2.0), &h));
        assert!(!point_in_hull(p(9.0, 9.0), &h));
        assert!(point_in_hull(p(4.0, 2.0), &h));
        assert!(!point_in_hull(p(4.000001, 2.0), &h));
    }

    #[test]
    fn degenerate_hull_containment() {
        let seg = convex_hull(&[p(0.0, 0.0), p(2.0, 2.0)]);
        assert!(seg.contains(p(1.0, 1.0)));
        assert!(!seg.contains(p(3.0, 3.0)));
        assert!(!seg.contains(p(1.0, 0.0)));
        let dot = convex_hull(&[p(1.0, 1.0)]);
        assert!(dot.contains(p(1.0, 1.0)));
        assert!(!dot.contains(p(1.0, 1.5)));
    }

    #[test]
    fn farthest_vertex_tie_break() {
        let h = square();
        assert_eq!(h.farthest_vertex(p(-3.0, 2.0)), Some(p(4.0, 0.0)));
        assert_eq!(h.farthest_vertex(p(0.0, 0.0)), Some(p(4.0, 4.0)));
    }

    /// Brute-force hull: a point is a hull vertex iff it is not inside (or on
    /// the interior of an edge of) any triangle/segment of other points. We use
    /// the half-plane characterisation over all ordered pairs instead.
    fn brute_force_hull_vertices(pts: &[Point]) -> Vec<Point> {
        let mut uniq: Vec<Point> = pts.to_vec();
        uniq.sort_by(|a, b| a.lex_cmp(b));
        uniq.dedup();
        let mut out = Vec::new();
        for &v in &uniq {
            // v is an extreme point iff some directed line through v has all
            // other points strictly on one side or on the line but not beyond v.
            let mut extreme = false;
            for &w in &uniq {
                if w == v {
                    continue;
                }
                let left = uniq.iter().all(|&q| cross(v, w, q) >= 0.0);
                let right = uniq.iter().all(|&q| cross(v, w, q) <= 0.0);
                if left || right {
                    // supporting line through v and w; v is a vertex if it is an
                    // endpoint of the collinear run on that line
                    let on_line: Vec<Point> = uniq
                        .iter()
                        .copied()
                        .filter(|&q| cross(v, w, q) == 0.0)
                        .collect();
                    let min = on_line.iter().min_by(|a, b| a.lex_cmp(b)).unwrap();
                    let max = on_line.iter().max_by(|a, b| a.lex_cmp(b)).unwrap();
                    if *min == v || *max == v {
                        extreme = true;
                        break;
                    }
                }
            }
            if extreme || uniq.len() == 1 {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn hull_matches_brute_force_on_random_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let pts: Vec<Point> = (0..50)
                .map(|_| p(rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            let h = convex_hull(&pts);
            let mut got = h.vertices().to_vec();
            got.sort_by(|a, b| a.lex_cmp(b));
            assert_eq!(got, brute_force_hull_vertices(&pts));
            // convex, CCW, no collinear triples
            let vs = h.vertices();
            for i in 0..vs.len() {
                let c = cross(vs[i], vs[(i + 1) % vs.len()], vs[(i + 2) % vs.len()]);
                assert!(c > 0.0);
            }
            // starts at lexicographic minimum
            assert_eq!(vs[0], got[0]);
        }
    }

    #[test]
    fn hull_on_integer_grid_matches_brute_force() {
        // many collinear and duplicate points
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(1..20);
            let pts: Vec<Point> = (0..n)
                .map(|_| p(rng.random_range(0..4) as f64, rng.random_range(0..4) as f64))
                .collect();
            let mut got = convex_hull(&pts).vertices().to_vec();
            got.sort_by(|a, b| a.lex_cmp(b));
            assert_eq!(got, brute_force_hull_vertices(&pts), "input {pts:?}");
        }
    }

    fn coord() -> impl Strategy<Value = f64> {
        -1000.0f64..1000.0
    }

    fn point() -> impl Strategy<Value = Point> {
        (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn metric_axioms(a in point(), b in point(), c in point()) {
            for m in [Metric::L2, Metric::LInf] {
                let ab = m.distance(a, b);
                prop_assert!(ab >= 0.0);
                prop_assert_eq!(ab, m.distance(b, a));
                prop_assert!(m.distance(a, c) <= ab + m.distance(b, c) + 1e-9);
            }
            prop_assert_eq!(Metric::L2.distance(a, a), 0.0);
        }

        #[test]
        fn linf_l2_sandwich(a in point(), b in point()) {
            let li = Metric::LInf.distance(a, b);
            let l2 = Metric::L2.distance(a, b);
            prop_assert!(li <= l2);
            prop_assert!(l2 <= std::f64::consts::SQRT_2 * li + 1e-9);
        }

        #[test]
        fn hull_is_idempotent_and_contains_vertices(pts in prop::collection::vec(point(), 1..60)) {
            let h = convex_hull(&pts);
            prop_assert_eq!(&convex_hull(h.vertices()), &h);
            for &v in h.vertices() {
                prop_assert!(h.contains(v));
            }
        }
    }
}
