//! Interval maps with affine and downward-parabola pieces, and chains of
//! such maps standing in for compositions.
//!
//! The quadratic piece `x ↦ α(x - r)(s - x)` evaluates exactly on rationals
//! and has exact interval images (its only critical point, the vertex
//! `(r + s)/2`, is rational). What it does not support is the structural
//! algebra of [`PLMap`]: composing through a quadratic piece raises the
//! degree, so compositions are kept as [`HybridChain`]s — ordered stage
//! lists applied left to right. Pointwise evaluation and region images
//! through a chain remain exact; only "sup distance" style queries fall back
//! to a certified branch-and-bound enclosure with a caller-chosen width.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::{Signed, Zero};

use crate::error::MapError;
use crate::interval_set::{Iv, IvSet};
use crate::plmap::PLMap;
use crate::rational::{pow2_neg, q_int, Q};

/// Default enclosure width for chain comparisons: `2^-40`.
pub fn default_tolerance() -> Q {
    pow2_neg(40)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HPiece {
    /// Affine between the surrounding cut values.
    Affine,
    /// `x ↦ alpha (x - r)(s - x)`; concave for `alpha > 0`.
    Quad { alpha: Q, r: Q, s: Q },
}

/// A single map whose pieces are affine or quadratic. `cuts` has one more
/// entry than `pieces`; `values[i]` is the value at `cuts[i]` and every
/// quadratic piece must agree with its cut values at the ends (checked).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridMap {
    cuts: Vec<Q>,
    values: Vec<Q>,
    pieces: Vec<HPiece>,
}

impl HybridMap {
    pub fn new(cuts: Vec<Q>, values: Vec<Q>, pieces: Vec<HPiece>) -> Result<HybridMap, MapError> {
        if cuts.len() < 2 || cuts.len() != values.len() || pieces.len() + 1 != cuts.len() {
            return Err(MapError::Invalid("hybrid piece/cut arity mismatch".into()));
        }
        for w in cuts.windows(2) {
            if w[0] >= w[1] {
                return Err(MapError::Invalid("cuts not strictly increasing".into()));
            }
        }
        let m = HybridMap { cuts, values, pieces };
        for i in 0..m.pieces.len() {
            if let HPiece::Quad { alpha, r, s } = &m.pieces[i] {
                let at = |x: &Q| alpha * (x - r) * (s - x);
                if at(&m.cuts[i]) != m.values[i] || at(&m.cuts[i + 1]) != m.values[i + 1] {
                    return Err(MapError::Invalid(format!(
                        "quadratic piece {i} disagrees with its cut values"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn from_plmap(f: &PLMap) -> HybridMap {
        let (cuts, values): (Vec<Q>, Vec<Q>) =
            f.breakpoints().map(|(x, y)| (x.clone(), y.clone())).unzip();
        let pieces = vec![HPiece::Affine; cuts.len() - 1];
        HybridMap { cuts, values, pieces }
    }

    /// The map as a [`PLMap`] when every piece is affine.
    pub fn as_plmap(&self) -> Option<PLMap> {
        if self.pieces.iter().all(|p| matches!(p, HPiece::Affine)) {
            let pts = self
                .cuts
                .iter()
                .cloned()
                .zip(self.values.iter().cloned())
                .collect();
            Some(PLMap::new(pts).expect("valid cuts"))
        } else {
            None
        }
    }

    pub fn domain(&self) -> (&Q, &Q) {
        (self.cuts.first().unwrap(), self.cuts.last().unwrap())
    }

    pub fn has_quadratic(&self) -> bool {
        self.pieces.iter().any(|p| matches!(p, HPiece::Quad { .. }))
    }

    pub fn eval(&self, x: &Q) -> Result<Q, MapError> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(MapError::OutsideDomain(
                x.to_string(),
                lo.to_string(),
                hi.to_string(),
            ));
        }
        let i = match self.cuts.binary_search(x) {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        Ok(self.eval_piece(i, x))
    }

    fn eval_piece(&self, i: usize, x: &Q) -> Q {
        match &self.pieces[i] {
            HPiece::Affine => {
                let (x0, x1) = (&self.cuts[i], &self.cuts[i + 1]);
                let (y0, y1) = (&self.values[i], &self.values[i + 1]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
            HPiece::Quad { alpha, r, s } => alpha * (x - r) * (s - x),
        }
    }

    /// Exact image of one interval: per-piece images (monotone affine parts,
    /// quadratic split at the vertex) merged into an interval set.
    pub fn image_iv(&self, iv: &Iv) -> Result<IvSet, MapError> {
        if iv.is_degenerate() {
            let y = self.eval(&iv.lo)?;
            return Ok(IvSet::single(Iv::point(y)));
        }
        let mut parts: Vec<Iv> = Vec::new();
        for i in 0..self.pieces.len() {
            let (p0, p1) = (&self.cuts[i], &self.cuts[i + 1]);
            // overlap of the piece with iv
            let lo = if &iv.lo > p0 { iv.lo.clone() } else { p0.clone() };
            let hi = if &iv.hi < p1 { iv.hi.clone() } else { p1.clone() };
            if lo > hi || (lo == hi && !(iv.contains(&lo))) {
                continue;
            }
            let lo_closed = iv.lo_closed || lo > iv.lo;
            let hi_closed = iv.hi_closed || hi < iv.hi;
            if lo == hi {
                if iv.contains(&lo) {
                    parts.push(Iv::point(self.eval_piece(i, &lo)));
                }
                continue;
            }
            match &self.pieces[i] {
                HPiece::Affine => {
                    let (ylo, yhi) = (self.eval_piece(i, &lo), self.eval_piece(i, &hi));
                    push_monotone_image(&mut parts, ylo, lo_closed, yhi, hi_closed);
                }
                HPiece::Quad { r, s, .. } => {
                    let vertex = (r + s) / q_int(2);
                    let mut split = |a: &Q, ac: bool, b: &Q, bc: bool| {
                        let (ya, yb) = (self.eval_piece(i, a), self.eval_piece(i, b));
                        push_monotone_image(&mut parts, ya, ac, yb, bc);
                    };
                    if vertex > lo && vertex < hi {
                        split(&lo, lo_closed, &vertex, true);
                        split(&vertex, true, &hi, hi_closed);
                    } else {
                        split(&lo, lo_closed, &hi, hi_closed);
                    }
                }
            }
        }
        Ok(IvSet::from_parts(parts))
    }

    /// Exact range over the whole domain.
    pub fn range(&self) -> (Q, Q) {
        let (lo, hi) = self.domain();
        let img = self
            .image_iv(&Iv::closed(lo.clone(), hi.clone()))
            .expect("domain image");
        (img.inf().clone(), img.sup().clone())
    }

    pub fn is_surjective_onto(&self, lo: &Q, hi: &Q) -> bool {
        let (rlo, rhi) = self.range();
        &rlo == lo && &rhi == hi
    }

    /// No piece is locally constant: affine pieces need nonzero slope and a
    /// nondegenerate parabola is never flat on an interval.
    pub fn is_feebly_open(&self) -> bool {
        (0..self.pieces.len()).all(|i| match &self.pieces[i] {
            HPiece::Affine => self.values[i] != self.values[i + 1],
            HPiece::Quad { alpha, .. } => !alpha.is_zero(),
        })
    }

    /// An open rational interval inside `self⁻¹((t1,t2)) ∩ within`, found
    /// per monotone branch; quadratic branches are bisected on exact
    /// evaluations until two good points bracket an interval.
    pub fn pullback_open(&self, t1: &Q, t2: &Q, within: &IvSet) -> Option<(Q, Q)> {
        for i in 0..self.pieces.len() {
            let (p0, p1) = (&self.cuts[i], &self.cuts[i + 1]);
            for win in within.parts() {
                let lo = if &win.lo > p0 { win.lo.clone() } else { p0.clone() };
                let hi = if &win.hi < p1 { win.hi.clone() } else { p1.clone() };
                if lo >= hi {
                    continue;
                }
                match &self.pieces[i] {
                    HPiece::Affine => {
                        let sub = PLMap::new(vec![
                            (lo.clone(), self.eval_piece(i, &lo)),
                            (hi.clone(), self.eval_piece(i, &hi)),
                        ])
                        .ok()?;
                        let seg = IvSet::single(Iv::open(lo, hi));
                        if let Some(w) = sub.pullback_open(t1, t2, &seg) {
                            return Some(w);
                        }
                    }
                    HPiece::Quad { r, s, .. } => {
                        let vertex = (r + s) / q_int(2);
                        let mut branches = vec![];
                        if vertex > lo && vertex < hi {
                            branches.push((lo.clone(), vertex.clone()));
                            branches.push((vertex, hi.clone()));
                        } else {
                            branches.push((lo, hi));
                        }
                        for (a, b) in branches {
                            if let Some(w) = self.bisect_branch(i, &a, &b, t1, t2) {
                                return Some(w);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Monotone-branch bisection: find one point with value in `(t1,t2)`,
    /// then grow an interval towards a second good point. Exact comparisons
    /// throughout; `None` if 96 bisection levels find nothing.
    fn bisect_branch(&self, piece: usize, a: &Q, b: &Q, t1: &Q, t2: &Q) -> Option<(Q, Q)> {
        let inside = |x: &Q| {
            let y = self.eval_piece(piece, x);
            &y > t1 && &y < t2
        };
        let mut lo = a.clone();
        let mut hi = b.clone();
        let mut hit: Option<Q> = None;
        for _ in 0..96 {
            let mid = (&lo + &hi) / q_int(2);
            if inside(&mid) {
                hit = Some(mid);
                break;
            }
            let y = self.eval_piece(piece, &mid);
            let (ya, yb) = (self.eval_piece(piece, a), self.eval_piece(piece, b));
            let increasing = ya < yb;
            // steer towards the target band
            let too_low = &y <= t1;
            if too_low == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
            if lo >= hi {
                return None;
            }
        }
        let x0 = hit?;
        for j in 1..96u32 {
            let step = pow2_neg(j) * (b - a);
            for cand in [&x0 + &step, &x0 - &step] {
                if cand > *a && cand < *b && inside(&cand) {
                    let (w1, w2) = if cand < x0 { (cand, x0.clone()) } else { (x0.clone(), cand) };
                    return Some((w1, w2));
                }
            }
        }
        None
    }
}

fn push_monotone_image(parts: &mut Vec<Iv>, ya: Q, ac: bool, yb: Q, bc: bool) {
    if ya == yb {
        // flat only across a single point of contact; treat as attained point
        parts.push(Iv::point(ya));
        return;
    }
    let (lo, lc, hi, hc) = if ya < yb { (ya, ac, yb, bc) } else { (yb, bc, ya, ac) };
    parts.push(Iv::new(lo, hi, lc, hc));
}

/// A composition kept as a stage list; stage 0 applies first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridChain {
    stages: Vec<HybridMap>,
}

impl HybridChain {
    pub fn single(m: HybridMap) -> HybridChain {
        HybridChain { stages: vec![m] }
    }

    pub fn from_plmap(f: &PLMap) -> HybridChain {
        HybridChain::single(HybridMap::from_plmap(f))
    }

    pub fn stages(&self) -> &[HybridMap] {
        &self.stages
    }

    pub fn domain(&self) -> (&Q, &Q) {
        self.stages[0].domain()
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &HybridChain) -> HybridChain {
        let mut stages = self.stages.clone();
        stages.extend(outer.stages.iter().cloned());
        HybridChain { stages }
    }

    pub fn eval(&self, x: &Q) -> Result<Q, MapError> {
        let mut v = x.clone();
        for s in &self.stages {
            v = s.eval(&v)?;
        }
        Ok(v)
    }

    /// Exact image of an interval set through all stages.
    pub fn image(&self, set: &IvSet) -> Result<IvSet, MapError> {
        let mut cur = set.clone();
        for s in &self.stages {
            let mut parts = Vec::new();
            for iv in cur.parts() {
                parts.extend(s.image_iv(iv)?.parts().iter().cloned());
            }
            cur = IvSet::from_parts(parts);
        }
        Ok(cur)
    }

    /// Exact bounds of the chain over a closed cell, via exact stage images.
    fn bounds_on(&self, lo: &Q, hi: &Q) -> Result<(Q, Q), MapError> {
        let img = self.image(&IvSet::single(Iv::closed(lo.clone(), hi.clone())))?;
        Ok((img.inf().clone(), img.sup().clone()))
    }

    /// Certified enclosure `[lower, upper]` of `sup |self - other|` over the
    /// shared domain, with `upper - lower <= tol`. Branch-and-bound on exact
    /// cell images: the cell bound `max(a_hi - b_lo, b_hi - a_lo)` upper
    /// bounds the difference, midpoint evaluations lower bound it, and cells
    /// whose bound cannot beat the current best are dropped.
    pub fn sup_distance_enclosure(
        &self,
        other: &HybridChain,
        tol: &Q,
    ) -> Result<(Q, Q), MapError> {
        if self.domain() != other.domain() {
            return Err(MapError::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain(),
                other.domain()
            )));
        }
        let (dlo, dhi) = self.domain();
        let cell_upper = |lo: &Q, hi: &Q| -> Result<Q, MapError> {
            let (alo, ahi) = self.bounds_on(lo, hi)?;
            let (blo, bhi) = other.bounds_on(lo, hi)?;
            let u1 = &ahi - &blo;
            let u2 = &bhi - &alo;
            let u = if u1 > u2 { u1 } else { u2 };
            Ok(if u.is_negative() { Q::zero() } else { u })
        };
        let probe = |x: &Q| -> Result<Q, MapError> { Ok((self.eval(x)? - other.eval(x)?).abs()) };

        let mut best_lower = probe(dlo)?.max(probe(dhi)?);
        // pruned cells still bound the sup from above; track the largest
        // bound seen among them
        let mut pruned_cap = best_lower.clone();
        let mut heap: BinaryHeap<(Q, Reverse<usize>, Q, Q)> = BinaryHeap::new();
        let u0 = cell_upper(dlo, dhi)?;
        heap.push((u0, Reverse(0), dlo.clone(), dhi.clone()));
        let mut counter = 1usize;
        while let Some((upper, _, lo, hi)) = heap.pop() {
            if &upper - &best_lower <= *tol {
                // widest remaining cell is already within tolerance
                let cap = upper.max(pruned_cap).max(best_lower.clone());
                return Ok((best_lower, cap));
            }
            let mid = (&lo + &hi) / q_int(2);
            let pm = probe(&mid)?;
            if pm > best_lower {
                best_lower = pm;
            }
            for (a, b) in [(lo, mid.clone()), (mid, hi)] {
                let u = cell_upper(&a, &b)?;
                if &u - &best_lower > *tol {
                    counter += 1;
                    heap.push((u, Reverse(counter), a, b));
                } else if u > pruned_cap {
                    pruned_cap = u;
                }
            }
            if heap.len() > 200_000 {
                return Err(MapError::ResourceLimit(heap.len(), 200_000));
            }
        }
        let cap = pruned_cap.max(best_lower.clone());
        Ok((best_lower, cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    /// Tent on [0,1] continued by the downward parabola 4(x-1)(2-x) on [1,2].
    fn tent_with_bump() -> HybridMap {
        HybridMap::new(
            vec![q_int(0), q(1, 2), q_int(1), q_int(2)],
            vec![q_int(0), q_int(1), q_int(0), q_int(0)],
            vec![
                HPiece::Affine,
                HPiece::Affine,
                HPiece::Quad { alpha: q_int(4), r: q_int(1), s: q_int(2) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn quad_eval() {
        let f = tent_with_bump();
        assert_eq!(f.eval(&q(3, 2)).unwrap(), q_int(1)); // 4 * 1/2 * 1/2
        assert_eq!(f.eval(&q(5, 4)).unwrap(), q(3, 4));
        assert_eq!(f.eval(&q(1, 4)).unwrap(), q(1, 2));
    }

    #[test]
    fn quad_image_has_vertex_max() {
        let f = tent_with_bump();
        let img = f.image_iv(&Iv::open(q(5, 4), q(7, 4))).unwrap();
        // parabola peaks at 3/2 with value 1, attained; endpoints open at 3/4
        assert_eq!(img.sup(), &q_int(1));
        assert!(img.sup_attained());
        assert_eq!(img.inf(), &q(3, 4));
        assert!(!img.inf_attained());
    }

    #[test]
    fn quad_range_and_hypotheses() {
        let f = tent_with_bump();
        assert_eq!(f.range(), (q_int(0), q_int(1)));
        assert!(!f.is_surjective_onto(&q_int(0), &q_int(2)));
        assert!(f.is_feebly_open());
    }

    #[test]
    fn chain_image_exact() {
        let f = tent_with_bump();
        let tail = HybridMap::from_plmap(
            &PLMap::new(vec![
                (q_int(0), q_int(0)),
                (q(1, 2), q_int(1)),
                (q_int(1), q_int(0)),
                (q_int(2), q_int(1)),
            ])
            .unwrap(),
        );
        let chain = HybridChain::single(f).then(&HybridChain::single(tail));
        let img = chain
            .image(&IvSet::single(Iv::open(q(11, 8), q(13, 8))))
            .unwrap();
        // stage 1: parabola over (11/8, 13/8) ∋ vertex -> (15/16, 1]
        // stage 2: tent over (15/16, 1] -> [0, 1/8)
        assert_eq!(img.inf(), &q_int(0));
        assert!(img.inf_attained());
        assert_eq!(img.sup(), &q(1, 8));
        assert!(!img.sup_attained());
    }

    #[test]
    fn sup_enclosure_against_known_values() {
        let quad = HybridChain::single(
            HybridMap::new(
                vec![q_int(1), q_int(2)],
                vec![q_int(0), q_int(0)],
                vec![HPiece::Quad { alpha: q_int(4), r: q_int(1), s: q_int(2) }],
            )
            .unwrap(),
        );
        let tol = pow2_neg(30);

        // interior maximum: sup |4(x-1)(2-x) - 0| = 1 at the vertex x = 3/2,
        // where both endpoint probes see 0
        let zero = HybridChain::from_plmap(&PLMap::constant(q_int(1), q_int(2), q_int(0)));
        let (lo, hi) = quad.sup_distance_enclosure(&zero, &tol).unwrap();
        assert!(&hi - &lo <= tol);
        assert!(lo <= q_int(1) && q_int(1) <= hi);

        // endpoint maximum: sup |4(x-1)(2-x) - (x-1)| = 1 at x = 2
        let line = HybridChain::from_plmap(
            &PLMap::new(vec![(q_int(1), q_int(0)), (q_int(2), q_int(1))]).unwrap(),
        );
        let (lo, hi) = quad.sup_distance_enclosure(&line, &tol).unwrap();
        assert!(&hi - &lo <= tol);
        assert!(lo <= q_int(1) && q_int(1) <= hi);
    }

    #[test]
    fn pullback_through_quadratic() {
        let f = tent_with_bump();
        let whole = IvSet::single(Iv::closed(q_int(1), q_int(2)));
        let (a, b) = f.pullback_open(&q(1, 2), &q(3, 4), &whole).unwrap();
        assert!(a < b);
        let mid = (&a + &b) / q_int(2);
        let y = f.eval(&mid).unwrap();
        assert!(y > q(1, 2) && y < q(3, 4));
    }
}
