//! Exact piecewise-linear maps over rational breakpoints.
//!
//! A [`PLMap`] is an affine-by-pieces function on a closed interval, stored
//! as breakpoints `x_0 < … < x_m` spanning the domain together with values
//! `y_0, …, y_m`; continuity is automatic because adjacent pieces share the
//! breakpoint value. Construction normalizes away collinear interior
//! breakpoints, so structural equality (`==`) decides whether two maps are
//! the same function.

use num_traits::{Signed, Zero};

use crate::error::MapError;
use crate::interval_set::{Iv, IvSet};
use crate::rational::Q;

/// Hard cap on breakpoints produced by a composition. Expanding maps double
/// their breakpoint count per composition step, so deep structural
/// compositions must be budgeted by the caller.
pub const MAX_BREAKPOINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLMap {
    xs: Vec<Q>,
    ys: Vec<Q>,
}

impl PLMap {
    /// Builds a map from `(x, y)` pairs. The `x`s must be strictly
    /// increasing; the first and last define the domain.
    pub fn new(points: Vec<(Q, Q)>) -> Result<PLMap, MapError> {
        if points.len() < 2 {
            return Err(MapError::Invalid("need at least 2 breakpoints".into()));
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(MapError::Invalid(format!(
                    "breakpoints not strictly increasing at x = {}",
                    w[1].0
                )));
            }
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(PLMap { xs, ys }.normalized())
    }

    pub fn identity(lo: Q, hi: Q) -> PLMap {
        PLMap::new(vec![(lo.clone(), lo), (hi.clone(), hi)]).expect("lo < hi")
    }

    pub fn constant(lo: Q, hi: Q, c: Q) -> PLMap {
        PLMap::new(vec![(lo, c.clone()), (hi, c)]).expect("lo < hi")
    }

    pub fn domain(&self) -> (&Q, &Q) {
        (self.xs.first().unwrap(), self.xs.last().unwrap())
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.xs.iter().zip(self.ys.iter())
    }

    pub fn piece_count(&self) -> usize {
        self.xs.len() - 1
    }

    /// Exact min and max of the map over its domain (attained at
    /// breakpoints).
    pub fn range(&self) -> (Q, Q) {
        let mut lo = self.ys[0].clone();
        let mut hi = self.ys[0].clone();
        for y in &self.ys[1..] {
            if y < &lo {
                lo = y.clone();
            }
            if y > &hi {
                hi = y.clone();
            }
        }
        (lo, hi)
    }

    /// Removes interior breakpoints that are collinear with their
    /// neighbours; the result evaluates identically.
    fn normalized(self) -> PLMap {
        let mut xs = Vec::with_capacity(self.xs.len());
        let mut ys = Vec::with_capacity(self.ys.len());
        let n = self.xs.len();
        for i in 0..n {
            if i > 0 && i + 1 < n {
                // collinearity is tested against the last kept point, so
                // runs of collinear breakpoints collapse in one pass
                let (px, py) = (xs.last().unwrap(), ys.last().unwrap());
                let lhs = (&self.ys[i] - py) * (&self.xs[i + 1] - &self.xs[i]);
                let rhs = (&self.ys[i + 1] - &self.ys[i]) * (&self.xs[i] - px);
                if lhs == rhs {
                    continue;
                }
            }
            xs.push(self.xs[i].clone());
            ys.push(self.ys[i].clone());
        }
        PLMap { xs, ys }
    }

    fn piece_index(&self, x: &Q) -> Result<usize, MapError> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(MapError::OutsideDomain(
                x.to_string(),
                lo.to_string(),
                hi.to_string(),
            ));
        }
        // last piece whose left endpoint is <= x
        let idx = match self.xs.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Ok(idx.min(self.xs.len() - 2))
    }

    /// Exact affine interpolation on the piece containing `x`.
    pub fn eval(&self, x: &Q) -> Result<Q, MapError> {
        let i = self.piece_index(x)?;
        let (x0, x1) = (&self.xs[i], &self.xs[i + 1]);
        let (y0, y1) = (&self.ys[i], &self.ys[i + 1]);
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Exact composition `g ∘ self` (apply `self` first). Breakpoints of the
    /// result are `self`'s breakpoints plus the preimages of `g`'s
    /// breakpoints under each monotone piece of `self`.
    pub fn compose_after(&self, g: &PLMap) -> Result<PLMap, MapError> {
        let (glo, ghi) = g.domain();
        let (rlo, rhi) = self.range();
        if &rlo < glo || &rhi > ghi {
            return Err(MapError::DomainEscape(format!(
                "inner range [{rlo}, {rhi}] vs outer domain [{glo}, {ghi}]"
            )));
        }
        let mut cuts: Vec<Q> = self.xs.clone();
        for i in 0..self.piece_count() {
            let (x0, x1) = (&self.xs[i], &self.xs[i + 1]);
            let (y0, y1) = (&self.ys[i], &self.ys[i + 1]);
            if y0 == y1 {
                continue;
            }
            let slope = (y1 - y0) / (x1 - x0);
            let (plo, phi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
            for u in &g.xs {
                if u > plo && u < phi {
                    cuts.push(x0 + (u - y0) / &slope);
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        if cuts.len() > MAX_BREAKPOINTS {
            return Err(MapError::ResourceLimit(cuts.len(), MAX_BREAKPOINTS));
        }
        let points = cuts
            .into_iter()
            .map(|x| {
                let y = g.eval(&self.eval(&x)?)?;
                Ok((x, y))
            })
            .collect::<Result<Vec<_>, MapError>>()?;
        PLMap::new(points)
    }

    /// Exact image of the open interval `(a, b)` as an interval with
    /// attainment flags. The closure of the image is `[min, max]` over the
    /// endpoint limits and interior breakpoints; an endpoint of the image is
    /// attained iff some interior point realizes it.
    pub fn image_open(&self, a: &Q, b: &Q) -> Result<IvSet, MapError> {
        if a >= b {
            return Err(MapError::EmptyRegion(format!("({a}, {b})")));
        }
        let (lo, hi) = self.domain();
        if a < lo || b > hi {
            return Err(MapError::OutsideDomain(
                format!("({a}, {b})"),
                lo.to_string(),
                hi.to_string(),
            ));
        }
        // candidates: a, interior breakpoints, b — in x order
        let mut cands: Vec<(Q, bool)> = vec![(a.clone(), false)]; // (x, interior?)
        for x in &self.xs {
            if x > a && x < b {
                cands.push((x.clone(), true));
            }
        }
        cands.push((b.clone(), false));
        let vals: Vec<Q> = cands
            .iter()
            .map(|(x, _)| self.eval(x))
            .collect::<Result<_, _>>()?;
        let mut m = vals[0].clone();
        let mut big = vals[0].clone();
        for v in &vals[1..] {
            if v < &m {
                m = v.clone();
            }
            if v > &big {
                big = v.clone();
            }
        }
        let attained = |target: &Q| -> bool {
            // attained at an interior breakpoint, or on a flat run between
            // consecutive candidates (whose interior lies inside (a,b))
            for (i, (_, interior)) in cands.iter().enumerate() {
                if &vals[i] == target && *interior {
                    return true;
                }
            }
            vals.windows(2).any(|w| &w[0] == target && &w[1] == target)
        };
        if m == big {
            return Ok(IvSet::single(Iv::point(m)));
        }
        let lo_cl = attained(&m);
        let hi_cl = attained(&big);
        Ok(IvSet::single(Iv::new(m, big, lo_cl, hi_cl)))
    }

    /// Exact inverse of a strictly monotone map. The inverse's domain is the
    /// range of `self`.
    pub fn inverse(&self) -> Result<PLMap, MapError> {
        let incr = self.ys.windows(2).all(|w| w[0] < w[1]);
        let decr = self.ys.windows(2).all(|w| w[0] > w[1]);
        if !incr && !decr {
            return Err(MapError::NotInjective);
        }
        let mut pts: Vec<(Q, Q)> = self
            .ys
            .iter()
            .cloned()
            .zip(self.xs.iter().cloned())
            .collect();
        if decr {
            pts.reverse();
        }
        PLMap::new(pts)
    }

    /// Decides `self(domain) == [lo, hi]` exactly from piece extrema.
    pub fn is_surjective_onto(&self, lo: &Q, hi: &Q) -> bool {
        let (rlo, rhi) = self.range();
        &rlo == lo && &rhi == hi
    }

    /// Feeble openness: images of nonempty open sets have nonempty interior.
    /// For a piecewise-linear map this holds iff no piece has slope zero
    /// (a zero-slope piece crushes an open set to a point, and without one,
    /// every open interval maps onto a set containing an open interval).
    pub fn is_feebly_open(&self) -> bool {
        self.ys.windows(2).all(|w| w[0] != w[1])
    }

    /// Exact `sup |self - g|`; the difference is piecewise linear on the
    /// merged breakpoint grid, so the supremum is attained at a grid point.
    pub fn sup_distance(&self, g: &PLMap) -> Result<Q, MapError> {
        if self.domain() != g.domain() {
            return Err(MapError::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain(),
                g.domain()
            )));
        }
        let mut grid: Vec<&Q> = self.xs.iter().chain(g.xs.iter()).collect();
        grid.sort();
        grid.dedup();
        let mut best = Q::zero();
        for x in grid {
            let d = (self.eval(x)? - g.eval(x)?).abs();
            if d > best {
                best = d;
            }
        }
        Ok(best)
    }

    pub fn is_identity(&self) -> bool {
        self.xs == self.ys
    }

    /// Slopes of the pieces, in order.
    pub fn slopes(&self) -> Vec<Q> {
        (0..self.piece_count())
            .map(|i| (&self.ys[i + 1] - &self.ys[i]) / (&self.xs[i + 1] - &self.xs[i]))
            .collect()
    }

    /// Leftmost open subinterval of `within ∩ self⁻¹((t1, t2))`, or `None`
    /// if the preimage misses `within`. Drives witness extraction: walking
    /// image extrema backwards through a composition needs, per stage, one
    /// open rational interval that the stage maps into the target slice.
    pub fn pullback_open(&self, t1: &Q, t2: &Q, within: &IvSet) -> Option<(Q, Q)> {
        debug_assert!(t1 < t2);
        let mut comps: Vec<(Q, Q)> = Vec::new();
        for i in 0..self.piece_count() {
            let (x0, x1) = (&self.xs[i], &self.xs[i + 1]);
            let (y0, y1) = (&self.ys[i], &self.ys[i + 1]);
            if y0 == y1 {
                if y0 > t1 && y0 < t2 {
                    comps.push((x0.clone(), x1.clone()));
                }
                continue;
            }
            let slope = (y1 - y0) / (x1 - x0);
            // x-interval where the affine piece lands in (t1, t2)
            let u = x0 + (t1 - y0) / &slope;
            let v = x0 + (t2 - y0) / &slope;
            let (mut plo, mut phi) = if u < v { (u, v) } else { (v, u) };
            if &plo < x0 {
                plo = x0.clone();
            }
            if &phi > x1 {
                phi = x1.clone();
            }
            if plo < phi {
                comps.push((plo, phi));
            }
        }
        comps.sort_by(|a, b| a.0.cmp(&b.0));
        for (lo, hi) in comps {
            for iv in within.parts() {
                let clo = if lo > iv.lo { lo.clone() } else { iv.lo.clone() };
                let chi = if hi < iv.hi { hi.clone() } else { iv.hi.clone() };
                if clo < chi {
                    // shrink to a strictly interior open interval so open /
                    // closed flags of `within` cannot leak a boundary point
                    let mid = (&clo + &chi) / crate::rational::q_int(2);
                    let lo_in = (&clo + &mid) / crate::rational::q_int(2);
                    let hi_in = (&mid + &chi) / crate::rational::q_int(2);
                    return Some((lo_in, hi_in));
                }
            }
        }
        None
    }
}

/// The tent map `x ↦ min(2x, 2 - 2x)` on `[0, 1]`.
pub fn tent() -> PLMap {
    use crate::rational::{q, q_int};
    PLMap::new(vec![
        (q_int(0), q_int(0)),
        (q(1, 2), q_int(1)),
        (q_int(1), q_int(0)),
    ])
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, q_int};

    #[test]
    fn eval_tent() {
        let t = tent();
        assert_eq!(t.eval(&q(1, 4)).unwrap(), q(1, 2));
        assert_eq!(t.eval(&q(2, 3)).unwrap(), q(2, 3));
        assert!(t.eval(&q(5, 4)).is_err());
    }

    #[test]
    fn compose_tent_tent() {
        let t = tent();
        let tt = t.compose_after(&t).unwrap();
        let expect = PLMap::new(vec![
            (q_int(0), q_int(0)),
            (q(1, 4), q_int(1)),
            (q(1, 2), q_int(0)),
            (q(3, 4), q_int(1)),
            (q_int(1), q_int(0)),
        ])
        .unwrap();
        assert_eq!(tt, expect);
        // pointwise audit on a dense rational grid
        for i in 0..=200 {
            let x = q(i, 200);
            assert_eq!(tt.eval(&x).unwrap(), t.eval(&t.eval(&x).unwrap()).unwrap());
        }
    }

    #[test]
    fn compose_identity_normalizes() {
        let t = tent();
        let id = PLMap::identity(q_int(0), q_int(1));
        assert_eq!(t.compose_after(&id).unwrap(), t);
        assert_eq!(id.compose_after(&t).unwrap(), t);
    }

    #[test]
    fn compose_domain_escape() {
        let f = PLMap::new(vec![(q_int(0), q_int(0)), (q_int(1), q_int(2))]).unwrap();
        let g = PLMap::identity(q_int(0), q_int(1));
        assert!(matches!(
            f.compose_after(&g),
            Err(MapError::DomainEscape(_))
        ));
    }

    #[test]
    fn image_single_increasing_piece() {
        let t = tent();
        let img = t.image_open(&q(3, 10), &q(2, 5)).unwrap();
        assert_eq!(img.parts().len(), 1);
        let iv = &img.parts()[0];
        assert_eq!((&iv.lo, &iv.hi), (&q(3, 5), &q(4, 5)));
        assert!(!iv.lo_closed && !iv.hi_closed);
    }

    #[test]
    fn image_straddles_peak() {
        let t = tent();
        // (0.4, 0.8) -> (0.4, 1]: max attained at the interior breakpoint 1/2
        let img = t.image_open(&q(2, 5), &q(4, 5)).unwrap();
        let iv = &img.parts()[0];
        assert_eq!((&iv.lo, &iv.hi), (&q(2, 5), &q_int(1)));
        assert!(!iv.lo_closed && iv.hi_closed);
        // sampled points of the region land inside the reported image
        for i in 1..50 {
            let x = q(2, 5) + q(i, 125); // strictly inside (0.4, 0.8)
            assert!(x < q(4, 5));
            let y = t.eval(&x).unwrap();
            assert!(img.contains(&y), "f({x}) = {y} escaped the image");
        }
    }

    #[test]
    fn image_constant_piece() {
        let c = PLMap::constant(q_int(0), q_int(1), q(1, 3));
        let img = c.image_open(&q(1, 10), &q(1, 2)).unwrap();
        assert_eq!(img.parts().len(), 1);
        assert!(img.parts()[0].is_degenerate());
        assert_eq!(img.parts()[0].lo, q(1, 3));
        assert_eq!(img.diameter(), q_int(0));
    }

    #[test]
    fn inverse_halving() {
        let f = PLMap::new(vec![(q_int(0), q_int(0)), (q_int(1), q(1, 2))]).unwrap();
        let inv = f.inverse().unwrap();
        assert_eq!(
            inv,
            PLMap::new(vec![(q_int(0), q_int(0)), (q(1, 2), q_int(1))]).unwrap()
        );
        assert_eq!(f.compose_after(&inv).unwrap(), PLMap::identity(q_int(0), q_int(1)));
    }

    #[test]
    fn inverse_reflects_breakpoints() {
        let f = PLMap::new(vec![
            (q_int(0), q_int(0)),
            (q(1, 4), q(1, 2)),
            (q_int(1), q_int(1)),
        ])
        .unwrap();
        let inv = f.inverse().unwrap();
        let expect = PLMap::new(vec![
            (q_int(0), q_int(0)),
            (q(1, 2), q(1, 4)),
            (q_int(1), q_int(1)),
        ])
        .unwrap();
        assert_eq!(inv, expect);
    }

    #[test]
    fn inverse_tent_fails() {
        assert_eq!(tent().inverse(), Err(MapError::NotInjective));
    }

    #[test]
    fn surjectivity() {
        assert!(tent().is_surjective_onto(&q_int(0), &q_int(1)));
        let half = PLMap::new(vec![(q_int(0), q_int(0)), (q_int(1), q(1, 2))]).unwrap();
        assert!(!half.is_surjective_onto(&q_int(0), &q_int(1)));
    }

    #[test]
    fn feeble_openness() {
        assert!(tent().is_feebly_open());
        let flat = PLMap::new(vec![
            (q_int(0), q_int(0)),
            (q(1, 2), q(1, 2)),
            (q_int(1), q(1, 2)),
        ])
        .unwrap();
        assert!(!flat.is_feebly_open());
    }

    #[test]
    fn sup_distance_endpoints() {
        let f = PLMap::identity(q_int(0), q_int(1));
        let g = PLMap::new(vec![(q_int(0), q_int(1)), (q_int(1), q_int(0))]).unwrap();
        assert_eq!(f.sup_distance(&g).unwrap(), q_int(1));
        assert_eq!(f.sup_distance(&f).unwrap(), q_int(0));
        let h = PLMap::identity(q_int(0), q_int(2));
        assert!(f.sup_distance(&h).is_err());
    }

    #[test]
    fn pullback_finds_leftmost() {
        let t = tent();
        let whole = IvSet::single(Iv::closed(q_int(0), q_int(1)));
        // preimage of (1/2, 1) is (1/4, 1/2) ∪ (1/2, 3/4); leftmost wins
        let (lo, hi) = t.pullback_open(&q(1, 2), &q_int(1), &whole).unwrap();
        assert!(lo < hi && lo > q(1, 4) && hi < q(1, 2));
        let y = t.eval(&((lo + hi) / q_int(2))).unwrap();
        assert!(y > q(1, 2) && y < q_int(1));
        assert!(t
            .pullback_open(&q(3, 2), &q_int(2), &whole)
            .is_none());
    }
}
