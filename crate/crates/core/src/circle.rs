//! Angle-multiplication circle maps.
//!
//! A [`CircleMap`] sends the point at angle fraction `t` (turns) to
//! `c·t mod 1` for a positive rational multiplier `c`. Compositions multiply
//! multipliers exactly; the semantics of iterated images is that of the
//! linear lift `t ↦ c·t` on the real line, projected back to the circle,
//! which is what makes multiplier algebra and arc images exact.

use num_traits::{One, Zero};

use crate::error::MapError;
use crate::rational::{frac_mod_one, q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleMap {
    multiplier: Q,
}

/// An arc tracked on the universal cover: the projection of the open
/// interval `(start, start + len)`. Lengths are deliberately **not** capped
/// at a full turn: a composite of multipliers acts on the cover as one
/// multiplication, and capping an intermediate length would corrupt the
/// image under a later shrinking multiplier. `len >= 1` projects onto the
/// whole circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverArc {
    pub start: Q,
    pub len: Q,
}

impl CircleMap {
    pub fn new(multiplier: Q) -> Result<CircleMap, MapError> {
        if multiplier <= Q::zero() {
            return Err(MapError::Invalid(format!(
                "circle multiplier must be positive, got {multiplier}"
            )));
        }
        Ok(CircleMap { multiplier })
    }

    pub fn identity() -> CircleMap {
        CircleMap { multiplier: Q::one() }
    }

    pub fn multiplier(&self) -> &Q {
        &self.multiplier
    }

    pub fn is_identity(&self) -> bool {
        self.multiplier.is_one()
    }

    /// `t ↦ c·t mod 1` on angle fractions.
    pub fn eval(&self, t: &Q) -> Q {
        frac_mod_one(&(&self.multiplier * t))
    }

    /// `self` applied after `inner`: multipliers multiply exactly.
    pub fn compose_after(&self, inner: &CircleMap) -> CircleMap {
        CircleMap { multiplier: &self.multiplier * &inner.multiplier }
    }

    /// Exact image of a cover arc: both start and length scale by the
    /// multiplier.
    pub fn image(&self, arc: &CoverArc) -> CoverArc {
        CoverArc {
            start: &self.multiplier * &arc.start,
            len: &self.multiplier * &arc.len,
        }
    }
}

impl CoverArc {
    pub fn new(start: Q, len: Q) -> Result<CoverArc, MapError> {
        if len <= Q::zero() {
            return Err(MapError::EmptyRegion(format!("arc length {len}")));
        }
        Ok(CoverArc { start, len })
    }

    /// Diameter in turns: `min(len, 1/2)`.
    pub fn diameter(&self) -> Q {
        let half = q(1, 2);
        if self.len < half {
            self.len.clone()
        } else {
            half
        }
    }

    /// Does the projected arc meet the open arc `(start, start+len)` of the
    /// other? Decided on the cover after reducing starts mod 1.
    pub fn meets(&self, other: &CoverArc) -> bool {
        if self.len >= Q::one() || other.len >= Q::one() {
            return true;
        }
        let a = frac_mod_one(&self.start);
        let b = frac_mod_one(&other.start);
        // shift `other` by -1, 0, +1 turns and test open-interval overlap
        for k in [-1i64, 0, 1] {
            let b0 = &b + q(k, 1);
            let b1 = &b0 + &other.len;
            if b0 < &a + &self.len && b1 > a {
                return true;
            }
        }
        false
    }

    /// A point strictly inside the projected arc, reduced to `[0, 1)`.
    pub fn interior_point(&self) -> Q {
        frac_mod_one(&(&self.start + &self.len / q(2, 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_int;

    #[test]
    fn multipliers_compose() {
        let a = CircleMap::new(q_int(2)).unwrap();
        let b = CircleMap::new(q(3, 2)).unwrap();
        assert_eq!(b.compose_after(&a).multiplier(), &q_int(3));
        assert!(CircleMap::identity().is_identity());
        assert!(CircleMap::new(q_int(0)).is_err());
    }

    #[test]
    fn telescoping_product() {
        // multipliers n/(n-1) for n = 2..5 compose to 5
        let mut acc = CircleMap::identity();
        for n in 2i64..=5 {
            acc = CircleMap::new(q(n, n - 1)).unwrap().compose_after(&acc);
        }
        assert_eq!(acc.multiplier(), &q_int(5));
    }

    #[test]
    fn eval_wraps() {
        let m = CircleMap::new(q(3, 2)).unwrap();
        assert_eq!(m.eval(&q(3, 4)), q(1, 8));
    }

    #[test]
    fn image_scales_and_diameter_caps() {
        let arc = CoverArc::new(q_int(0), q(1, 8)).unwrap();
        let doubled = CircleMap::new(q_int(2)).unwrap().image(&arc);
        assert_eq!(doubled.len, q(1, 4));
        assert_eq!(doubled.diameter(), q(1, 4));
        let full = CircleMap::new(q_int(8)).unwrap().image(&arc);
        assert_eq!(full.len, q_int(1));
        assert_eq!(full.diameter(), q(1, 2));
        let tripled = CircleMap::new(q_int(3)).unwrap().image(&arc);
        assert_eq!(tripled.len, q(3, 8));
        assert_eq!(tripled.diameter(), q(3, 8));
        // lengths past a full turn are kept: a later shrinking multiplier
        // must see the true cover length
        let wide = CircleMap::new(q_int(9)).unwrap().image(&arc);
        assert_eq!(wide.len, q(9, 8));
        assert_eq!(wide.diameter(), q(1, 2));
        let back = CircleMap::new(q(1, 9)).unwrap().image(&wide);
        assert_eq!(back.len, q(1, 8));
    }

    #[test]
    fn arc_overlap_wraps() {
        let a = CoverArc::new(q(7, 8), q(1, 4)).unwrap(); // (7/8, 9/8): wraps past 0
        let b = CoverArc::new(q(1, 16), q(1, 16)).unwrap();
        assert!(a.meets(&b));
        let c = CoverArc::new(q(1, 2), q(1, 8)).unwrap();
        assert!(!a.meets(&c));
        let shifted = CoverArc::new(q(15, 8), q(1, 4)).unwrap(); // same arc, +1 turn
        assert!(shifted.meets(&b));
    }
}
