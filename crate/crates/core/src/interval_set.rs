//! Exact unions of intervals with open/closed endpoint flags.
//!
//! Images of regions under continuous maps are tracked as `IvSet`s so that
//! diameters, intersections, and endpoint attainment stay exact.

use crate::rational::Q;

/// A single nonempty interval. Degenerate intervals (`lo == hi`) must be
/// closed on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iv {
    pub lo: Q,
    pub hi: Q,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Iv {
    pub fn new(lo: Q, hi: Q, lo_closed: bool, hi_closed: bool) -> Iv {
        assert!(
            lo < hi || (lo == hi && lo_closed && hi_closed),
            "empty interval"
        );
        Iv { lo, hi, lo_closed, hi_closed }
    }

    pub fn open(lo: Q, hi: Q) -> Iv {
        Iv::new(lo, hi, false, false)
    }

    pub fn closed(lo: Q, hi: Q) -> Iv {
        Iv::new(lo, hi, true, true)
    }

    pub fn point(x: Q) -> Iv {
        Iv::new(x.clone(), x, true, true)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Q) -> bool {
        (x > &self.lo || (self.lo_closed && x == &self.lo))
            && (x < &self.hi || (self.hi_closed && x == &self.hi))
    }

    fn touches_or_overlaps(&self, other: &Iv) -> bool {
        // assumes self.lo <= other.lo
        if other.lo < self.hi {
            return true;
        }
        other.lo == self.hi && (self.hi_closed || other.lo_closed)
    }
}

/// A normalized union of disjoint, non-mergeable intervals, sorted by `lo`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IvSet(Vec<Iv>);

impl IvSet {
    pub fn from_parts(mut parts: Vec<Iv>) -> IvSet {
        parts.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Iv> = Vec::with_capacity(parts.len());
        for p in parts {
            match out.last_mut() {
                Some(last) if last.touches_or_overlaps(&p) => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    } else if p.hi == last.hi {
                        last.hi_closed |= p.hi_closed;
                    }
                    if p.lo == last.lo {
                        last.lo_closed |= p.lo_closed;
                    }
                }
                _ => out.push(p),
            }
        }
        IvSet(out)
    }

    pub fn single(iv: Iv) -> IvSet {
        IvSet(vec![iv])
    }

    pub fn parts(&self) -> &[Iv] {
        &self.0
    }

    pub fn inf(&self) -> &Q {
        &self.0.first().expect("nonempty").lo
    }

    pub fn sup(&self) -> &Q {
        &self.0.last().expect("nonempty").hi
    }

    pub fn inf_attained(&self) -> bool {
        self.0.first().expect("nonempty").lo_closed
    }

    pub fn sup_attained(&self) -> bool {
        self.0.last().expect("nonempty").hi_closed
    }

    /// `sup - inf`: the metric diameter of the union as a subset of the line.
    pub fn diameter(&self) -> Q {
        self.sup() - self.inf()
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.0.iter().any(|iv| iv.contains(x))
    }

    /// Does the set meet the open interval `(a, b)`?
    pub fn meets_open(&self, a: &Q, b: &Q) -> bool {
        debug_assert!(a < b);
        self.0.iter().any(|iv| {
            // (a,b) ∩ iv nonempty iff iv.lo < b and iv.hi > a,
            // with degenerate iv needing strict containment
            if iv.is_degenerate() {
                return &iv.lo > a && &iv.lo < b;
            }
            &iv.lo < b && &iv.hi > a
        })
    }

    /// Intersection with a closed interval `[a, b]`, used to clip images to
    /// an enclosing domain.
    pub fn clip_closed(&self, a: &Q, b: &Q) -> Option<IvSet> {
        let mut parts = Vec::new();
        for iv in &self.0 {
            let lo = if &iv.lo < a { a.clone() } else { iv.lo.clone() };
            let lo_closed = if &iv.lo < a { true } else { iv.lo_closed };
            let hi = if &iv.hi > b { b.clone() } else { iv.hi.clone() };
            let hi_closed = if &iv.hi > b { true } else { iv.hi_closed };
            if lo < hi || (lo == hi && lo_closed && hi_closed) {
                parts.push(Iv { lo, hi, lo_closed, hi_closed });
            }
        }
        if parts.is_empty() {
            None
        } else {
            Some(IvSet::from_parts(parts))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, q_int};

    #[test]
    fn merge_touching() {
        let s = IvSet::from_parts(vec![
            Iv::new(q(0, 1), q(1, 2), false, true),
            Iv::new(q(1, 2), q_int(1), false, false),
        ]);
        assert_eq!(s.parts().len(), 1);
        assert_eq!(s.diameter(), q_int(1));
        assert!(!s.inf_attained());
        assert!(!s.sup_attained());
    }

    #[test]
    fn disjoint_stay_split() {
        let s = IvSet::from_parts(vec![
            Iv::open(q(0, 1), q(1, 4)),
            Iv::open(q(1, 2), q_int(1)),
        ]);
        assert_eq!(s.parts().len(), 2);
        assert_eq!(s.diameter(), q_int(1));
        assert!(s.meets_open(&q(1, 8), &q(3, 16)));
        assert!(!s.meets_open(&q(1, 4), &q(1, 2)));
    }

    #[test]
    fn open_point_boundary() {
        // (0, 1/2) and [1/2, 1] merge across the shared endpoint
        let s = IvSet::from_parts(vec![
            Iv::open(q(0, 1), q(1, 2)),
            Iv::closed(q(1, 2), q_int(1)),
        ]);
        assert_eq!(s.parts().len(), 1);
        assert!(s.contains(&q(1, 2)));
        assert!(!s.contains(&q(0, 1)));
    }

    #[test]
    fn degenerate_point() {
        let s = IvSet::single(Iv::point(q(1, 3)));
        assert_eq!(s.diameter(), q_int(0));
        assert!(s.contains(&q(1, 3)));
        assert!(!s.meets_open(&q(1, 3), &q(1, 2)));
        assert!(s.meets_open(&q(0, 1), &q(1, 2)));
    }
}
