//! Spaces, points, and open regions.
//!
//! Three space kinds are supported: a closed interval with the Euclidean
//! metric, the unit circle with the arc-length metric, and finite products
//! with the metric `d̂ = sqrt(Σ dᵢ²)`.
//!
//! Two conventions keep every comparison exact:
//!
//! * Circle angles are stored as rational fractions of a full turn in
//!   `[0, 1)`, and circle distances are reported in turns (so the arc-length
//!   value is the reported rational times `2π`). Thresholds for circle
//!   spaces must be given in turns as well; the maximal circle distance is
//!   `1/2`.
//! * Product distances are reported **squared** (`d̂²` is rational even when
//!   `d̂` is not), and every threshold test on a product space compares
//!   against `δ²`.

use num_traits::{Signed, Zero};

use crate::error::MapError;
use crate::rational::{frac_mod_one, q, Q};

/// A compact metric space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    Interval { lo: Q, hi: Q },
    Circle,
    Product(Vec<Space>),
}

/// A point of a [`Space`]; the variant must match the space kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Interval(Q),
    Circle(Q),
    Product(Vec<Point>),
}

/// A nonempty open subset of a [`Space`] of the supported shapes: an open
/// subinterval, an open arc (given by start angle and length, in turns),
/// or a product of regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpenRegion {
    Interval { a: Q, b: Q },
    Arc { start: Q, len: Q },
    Product(Vec<OpenRegion>),
}

impl Space {
    pub fn unit_interval() -> Space {
        Space::Interval { lo: q(0, 1), hi: q(1, 1) }
    }

    pub fn interval(lo: Q, hi: Q) -> Result<Space, MapError> {
        if lo >= hi {
            return Err(MapError::Invalid(format!(
                "interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Space::Interval { lo, hi })
    }

    pub fn product(factors: Vec<Space>) -> Result<Space, MapError> {
        if factors.len() < 2 {
            return Err(MapError::Invalid("product needs at least 2 factors".into()));
        }
        Ok(Space::Product(factors))
    }

    pub fn is_product(&self) -> bool {
        matches!(self, Space::Product(_))
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::Interval { lo, hi }, Point::Interval(x)) => x >= lo && x <= hi,
            (Space::Circle, Point::Circle(t)) => !t.is_negative() && t < &q(1, 1),
            (Space::Product(ss), Point::Product(ps)) => {
                ss.len() == ps.len() && ss.iter().zip(ps).all(|(s, p)| s.contains(p))
            }
            _ => false,
        }
    }

    /// Distance under the per-kind contract: Euclidean for intervals, arc
    /// length in turns for the circle, and the **squared** product metric
    /// `d̂²` for products. Compare product values against `δ²`.
    pub fn distance(&self, p: &Point, q_: &Point) -> Result<Q, MapError> {
        match self {
            Space::Interval { .. } | Space::Circle => self.linear_distance(p, q_),
            Space::Product(_) => self.sq_distance(p, q_),
        }
    }

    /// Euclidean / arc-length distance; errors on product spaces where the
    /// metric value is irrational in general.
    pub fn linear_distance(&self, p: &Point, q_: &Point) -> Result<Q, MapError> {
        self.check_pair(p, q_)?;
        match (self, p, q_) {
            (Space::Interval { .. }, Point::Interval(x), Point::Interval(y)) => Ok((x - y).abs()),
            (Space::Circle, Point::Circle(a), Point::Circle(b)) => Ok(circle_distance(a, b)),
            (Space::Product(_), _, _) => Err(MapError::Unsupported(
                "product distances are only available squared".into(),
            )),
            _ => unreachable!(),
        }
    }

    /// `d̂²`, defined for every kind (squares of the linear distances for
    /// interval and circle factors, summed over products, recursively).
    pub fn sq_distance(&self, p: &Point, q_: &Point) -> Result<Q, MapError> {
        self.check_pair(p, q_)?;
        Ok(match (self, p, q_) {
            (Space::Interval { .. }, Point::Interval(x), Point::Interval(y)) => {
                let d = x - y;
                &d * &d
            }
            (Space::Circle, Point::Circle(a), Point::Circle(b)) => {
                let d = circle_distance(a, b);
                &d * &d
            }
            (Space::Product(ss), Point::Product(ps), Point::Product(qs)) => {
                let mut acc = Q::zero();
                for ((s, p), q_) in ss.iter().zip(ps).zip(qs) {
                    acc += s.sq_distance(p, q_)?;
                }
                acc
            }
            _ => unreachable!(),
        })
    }

    /// Max pairwise distance of a finite nonempty point set, under the same
    /// contract as [`Space::distance`] (squared for products).
    pub fn diameter(&self, pts: &[Point]) -> Result<Q, MapError> {
        if pts.is_empty() {
            return Err(MapError::EmptyRegion("diameter of empty set".into()));
        }
        let mut best = Q::zero();
        for (i, p) in pts.iter().enumerate() {
            for q_ in &pts[i + 1..] {
                let d = self.distance(p, q_)?;
                if d > best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    /// `true` when a distance reported by [`Space::distance`] exceeds the
    /// threshold `delta`; squares `delta` first on product spaces.
    pub fn exceeds(&self, dist: &Q, delta: &Q) -> bool {
        if self.is_product() {
            dist > &(delta * delta)
        } else {
            dist > delta
        }
    }

    fn check_pair(&self, p: &Point, q_: &Point) -> Result<(), MapError> {
        if !self.contains(p) || !self.contains(q_) {
            return Err(MapError::KindMismatch(format!(
                "points {p:?}, {q_:?} do not both belong to {self:?}"
            )));
        }
        Ok(())
    }
}

/// Arc-length distance between two angle fractions, in turns: the shorter of
/// the two arcs, always at most `1/2`.
pub fn circle_distance(a: &Q, b: &Q) -> Q {
    let gap = frac_mod_one(&(a - b));
    let other = q(1, 1) - &gap;
    if gap <= other {
        gap
    } else {
        other
    }
}

impl Point {
    /// Circle point from an arbitrary rational angle (reduced mod 1).
    pub fn circle(t: &Q) -> Point {
        Point::Circle(frac_mod_one(t))
    }

    pub fn interval(x: Q) -> Point {
        Point::Interval(x)
    }

    pub fn as_interval(&self) -> Option<&Q> {
        match self {
            Point::Interval(x) => Some(x),
            _ => None,
        }
    }
}

impl OpenRegion {
    pub fn interval(a: Q, b: Q) -> Result<OpenRegion, MapError> {
        if a >= b {
            return Err(MapError::EmptyRegion(format!("({a}, {b})")));
        }
        Ok(OpenRegion::Interval { a, b })
    }

    /// Open arc of the given length in turns, `0 < len <= 1` (`len = 1` is
    /// the full circle minus a point, which is still open and has the full
    /// diameter `1/2`).
    pub fn arc(start: &Q, len: Q) -> Result<OpenRegion, MapError> {
        if len <= Q::zero() || len > q(1, 1) {
            return Err(MapError::EmptyRegion(format!("arc length {len}")));
        }
        Ok(OpenRegion::Arc { start: frac_mod_one(start), len })
    }

    pub fn product(rs: Vec<OpenRegion>) -> Result<OpenRegion, MapError> {
        if rs.len() < 2 {
            return Err(MapError::Invalid("product region needs >= 2 factors".into()));
        }
        Ok(OpenRegion::Product(rs))
    }

    pub fn validate_in(&self, space: &Space) -> Result<(), MapError> {
        match (self, space) {
            (OpenRegion::Interval { a, b }, Space::Interval { lo, hi }) => {
                if a < lo || b > hi {
                    return Err(MapError::KindMismatch(format!(
                        "region ({a}, {b}) escapes [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
            (OpenRegion::Arc { .. }, Space::Circle) => Ok(()),
            (OpenRegion::Product(rs), Space::Product(ss)) if rs.len() == ss.len() => rs
                .iter()
                .zip(ss)
                .try_for_each(|(r, s)| r.validate_in(s)),
            _ => Err(MapError::KindMismatch(format!(
                "region {self:?} does not fit {space:?}"
            ))),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (OpenRegion::Interval { a, b }, Point::Interval(x)) => x > a && x < b,
            (OpenRegion::Arc { start, len }, Point::Circle(t)) => {
                let rel = frac_mod_one(&(t - start));
                rel > Q::zero() && rel < *len
            }
            (OpenRegion::Product(rs), Point::Product(ps)) => {
                rs.len() == ps.len() && rs.iter().zip(ps).all(|(r, p)| r.contains(p))
            }
            _ => false,
        }
    }

    /// Diameter of the region under the distance contract of its space
    /// (squared for products).
    pub fn diameter_contract(&self) -> Q {
        match self {
            OpenRegion::Interval { a, b } => b - a,
            OpenRegion::Arc { len, .. } => arc_diameter(len),
            OpenRegion::Product(rs) => rs.iter().map(|r| r.diameter_sq()).sum(),
        }
    }

    fn diameter_sq(&self) -> Q {
        match self {
            OpenRegion::Product(rs) => rs.iter().map(|r| r.diameter_sq()).sum(),
            _ => {
                let d = self.diameter_contract();
                &d * &d
            }
        }
    }
}

/// Diameter, in turns, of an arc of the given length in turns.
pub fn arc_diameter(len: &Q) -> Q {
    let half = q(1, 2);
    if len < &half {
        len.clone()
    } else {
        half
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, q_int};

    fn ipt(n: i64, d: i64) -> Point {
        Point::Interval(q(n, d))
    }

    #[test]
    fn interval_distance() {
        let s = Space::unit_interval();
        assert_eq!(s.distance(&ipt(1, 5), &ipt(1, 2)).unwrap(), q(3, 10));
    }

    #[test]
    fn product_distance_squared() {
        let s = Space::product(vec![
            Space::interval(q_int(0), q_int(5)).unwrap(),
            Space::interval(q_int(0), q_int(5)).unwrap(),
        ])
        .unwrap();
        let p = Point::Product(vec![ipt(0, 1), ipt(0, 1)]);
        let r = Point::Product(vec![ipt(3, 1), ipt(4, 1)]);
        // d̂ = 5, reported squared
        assert_eq!(s.distance(&p, &r).unwrap(), q_int(25));
        assert!(s.exceeds(&q_int(25), &q(9, 2)));
        assert!(!s.exceeds(&q_int(25), &q_int(5)));
    }

    #[test]
    fn circle_shorter_arc() {
        let s = Space::Circle;
        let a = Point::Circle(q(1, 10));
        let b = Point::Circle(q(9, 10));
        assert_eq!(s.distance(&a, &b).unwrap(), q(1, 5));
        assert_eq!(circle_distance(&q(0, 1), &q(1, 2)), q(1, 2));
    }

    #[test]
    fn circle_distance_capped() {
        for i in 0..40i64 {
            for j in 0..40i64 {
                let d = circle_distance(&q(i, 40), &q(j, 40));
                assert!(d <= q(1, 2));
                let gap = (q(i, 40) - q(j, 40)).abs();
                let expect = if gap <= q(1, 2) { gap.clone() } else { q_int(1) - &gap };
                assert_eq!(d, expect);
            }
        }
    }

    #[test]
    fn diameter_examples() {
        let s = Space::unit_interval();
        assert_eq!(s.diameter(&[ipt(1, 5)]).unwrap(), q_int(0));
        assert_eq!(
            s.diameter(&[ipt(1, 10), ipt(2, 5), ipt(9, 10)]).unwrap(),
            q(4, 5)
        );
        let c = Space::Circle;
        assert_eq!(
            c.diameter(&[Point::Circle(q(0, 1)), Point::Circle(q(1, 2))]).unwrap(),
            q(1, 2)
        );
        assert!(s.diameter(&[]).is_err());
    }

    #[test]
    fn kind_mismatch() {
        let s = Space::unit_interval();
        assert!(s.distance(&ipt(1, 2), &Point::Circle(q(1, 4))).is_err());
        assert!(s.distance(&ipt(1, 2), &ipt(3, 2)).is_err()); // 3/2 outside [0,1]
    }

    #[test]
    fn region_membership() {
        let r = OpenRegion::interval(q(3, 10), q(2, 5)).unwrap();
        assert!(r.contains(&ipt(1, 3)));
        assert!(!r.contains(&ipt(3, 10)));
        let a = OpenRegion::arc(&q(7, 8), q(1, 4)).unwrap();
        assert!(a.contains(&Point::Circle(q(15, 16))));
        assert!(a.contains(&Point::Circle(q(1, 16)))); // wraps
        assert!(!a.contains(&Point::Circle(q(7, 8))));
        assert!(OpenRegion::interval(q(1, 2), q(1, 2)).is_err());
    }

    #[test]
    fn arc_diameter_cap() {
        assert_eq!(arc_diameter(&q(3, 8)), q(3, 8));
        assert_eq!(arc_diameter(&q(7, 8)), q(1, 2));
        assert_eq!(arc_diameter(&q_int(1)), q(1, 2));
    }
}
