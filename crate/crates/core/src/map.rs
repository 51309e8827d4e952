//! One type for every map kind the systems use, plus the exact region-flow
//! machinery behind separation scans.
//!
//! Separation scans never build the composed map `f_1^n` structurally —
//! expanding maps double their breakpoints per composition, so a horizon-64
//! scan would be hopeless. Instead a region is pushed forward one entry at a
//! time as an exact set ([`RegionState`]); diameters read off the state, and
//! witness pairs are recovered by pulling a target slice of the final image
//! back through the stored flow history.
//!
//! Circle semantics: a sequence of angle multiplications composes by
//! multiplying the multipliers, i.e. it acts on the universal cover. Both
//! [`apply_entry_sequence`] and the region flow respect that, so pointwise
//! results always agree with the composite map produced by structural
//! composition (stepwise reduction mod 1 would not).

use num_traits::Zero;

use crate::circle::{CircleMap, CoverArc};
use crate::error::MapError;
use crate::hybrid::{HybridChain, HybridMap};
use crate::interval_set::{Iv, IvSet};
use crate::metric::{OpenRegion, Point, Space};
use crate::plmap::PLMap;
use crate::rational::{frac_mod_one, q, q_int, simplest_dyadic_in, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Map {
    Pl(PLMap),
    Circle(CircleMap),
    Hybrid(HybridChain),
    Product(Vec<Map>),
}

/// Exact image of a region after some number of steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionState {
    Interval(IvSet),
    /// Arc tracked on the universal cover (uncapped length).
    Circle(CoverArc),
    Product(Vec<RegionState>),
}

impl Map {
    pub fn identity_for(space: &Space) -> Map {
        match space {
            Space::Interval { lo, hi } => Map::Pl(PLMap::identity(lo.clone(), hi.clone())),
            Space::Circle => Map::Circle(CircleMap::identity()),
            Space::Product(fs) => Map::Product(fs.iter().map(Map::identity_for).collect()),
        }
    }

    /// Does this map send the space into itself? Exact range check.
    pub fn is_self_map_of(&self, space: &Space) -> bool {
        match (self, space) {
            (Map::Pl(f), Space::Interval { lo, hi }) => {
                let (dlo, dhi) = f.domain();
                let (rlo, rhi) = f.range();
                dlo == lo && dhi == hi && &rlo >= lo && &rhi <= hi
            }
            (Map::Hybrid(c), Space::Interval { lo, hi }) => {
                let (dlo, dhi) = c.domain();
                if dlo != lo || dhi != hi {
                    return false;
                }
                c.image(&IvSet::single(Iv::closed(lo.clone(), hi.clone())))
                    .map(|img| img.inf() >= lo && img.sup() <= hi)
                    .unwrap_or(false)
            }
            (Map::Circle(_), Space::Circle) => true,
            (Map::Product(ms), Space::Product(ss)) => {
                ms.len() == ss.len() && ms.iter().zip(ss).all(|(m, s)| m.is_self_map_of(s))
            }
            _ => false,
        }
    }

    /// Applies the map to one point (a single circle map reduces mod 1; for
    /// sequences use [`apply_entry_sequence`]).
    pub fn apply(&self, p: &Point) -> Result<Point, MapError> {
        match (self, p) {
            (Map::Pl(f), Point::Interval(x)) => Ok(Point::Interval(f.eval(x)?)),
            (Map::Hybrid(c), Point::Interval(x)) => Ok(Point::Interval(c.eval(x)?)),
            (Map::Circle(m), Point::Circle(t)) => Ok(Point::Circle(m.eval(t))),
            (Map::Product(ms), Point::Product(ps)) if ms.len() == ps.len() => Ok(Point::Product(
                ms.iter()
                    .zip(ps)
                    .map(|(m, p)| m.apply(p))
                    .collect::<Result<_, _>>()?,
            )),
            _ => Err(MapError::KindMismatch(format!(
                "cannot apply {self:?} to {p:?}"
            ))),
        }
    }

    /// `outer ∘ self`. Piecewise-linear pairs compose structurally, circle
    /// maps multiply multipliers, products compose factorwise, and anything
    /// involving a quadratic piece becomes a stage chain.
    pub fn then(&self, outer: &Map) -> Result<Map, MapError> {
        Ok(match (self, outer) {
            (Map::Pl(f), Map::Pl(g)) => Map::Pl(f.compose_after(g)?),
            (Map::Circle(a), Map::Circle(b)) => Map::Circle(b.compose_after(a)),
            (Map::Product(fs), Map::Product(gs)) if fs.len() == gs.len() => Map::Product(
                fs.iter()
                    .zip(gs)
                    .map(|(f, g)| f.then(g))
                    .collect::<Result<_, _>>()?,
            ),
            (a, b) => {
                let ca = a.as_chain().ok_or_else(|| {
                    MapError::KindMismatch(format!("cannot compose {a:?} with {b:?}"))
                })?;
                let cb = b.as_chain().ok_or_else(|| {
                    MapError::KindMismatch(format!("cannot compose {a:?} with {b:?}"))
                })?;
                Map::Hybrid(ca.then(&cb))
            }
        })
    }

    fn as_chain(&self) -> Option<HybridChain> {
        match self {
            Map::Pl(f) => Some(HybridChain::from_plmap(f)),
            Map::Hybrid(c) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Map::Pl(f) => f.is_identity(),
            Map::Circle(m) => m.is_identity(),
            Map::Hybrid(c) => c
                .stages()
                .iter()
                .all(|s| s.as_plmap().map(|p| p.is_identity()).unwrap_or(false)),
            Map::Product(ms) => ms.iter().all(Map::is_identity),
        }
    }

    pub fn contains_quadratic(&self) -> bool {
        match self {
            Map::Hybrid(c) => c.stages().iter().any(HybridMap::has_quadratic),
            Map::Product(ms) => ms.iter().any(Map::contains_quadratic),
            _ => false,
        }
    }

    /// Structural equality after normalization. Unavailable (by design) when
    /// a quadratic piece is involved; use [`Map::equivalent_within`] there.
    pub fn structurally_eq(&self, other: &Map) -> Result<bool, MapError> {
        if self.contains_quadratic() || other.contains_quadratic() {
            return Err(MapError::StructuralUnavailable(
                "quadratic-piece maps compare by enclosure, not structure".into(),
            ));
        }
        match (self, other) {
            (Map::Circle(a), Map::Circle(b)) => Ok(a == b),
            (Map::Product(a), Map::Product(b)) => {
                if a.len() != b.len() {
                    return Ok(false);
                }
                for (x, y) in a.iter().zip(b) {
                    if !x.structurally_eq(y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (Map::Pl(_) | Map::Hybrid(_), Map::Pl(_) | Map::Hybrid(_)) => {
                Ok(self.collapse_affine_chain()? == other.collapse_affine_chain()?)
            }
            _ => Ok(false),
        }
    }

    fn collapse_affine_chain(&self) -> Result<PLMap, MapError> {
        match self {
            Map::Pl(f) => Ok(f.clone()),
            Map::Hybrid(c) => {
                let mut acc: Option<PLMap> = None;
                for st in c.stages() {
                    let p = st
                        .as_plmap()
                        .ok_or_else(|| MapError::StructuralUnavailable("quadratic stage".into()))?;
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.compose_after(&p)?,
                    });
                }
                acc.ok_or_else(|| MapError::Invalid("empty chain".into()))
            }
            _ => Err(MapError::KindMismatch("not an interval map".into())),
        }
    }

    /// Structural equality where available; otherwise exact pointwise
    /// equality on a rational grid plus a certified sup-distance bound at
    /// width `tol`.
    pub fn equivalent_within(&self, other: &Map, grid: u32, tol: &Q) -> Result<bool, MapError> {
        match self.structurally_eq(other) {
            Ok(v) => return Ok(v),
            Err(MapError::StructuralUnavailable(_)) => {}
            Err(e) => return Err(e),
        }
        let a = self.as_chain().ok_or_else(|| {
            MapError::Unsupported("pointwise comparison needs interval maps".into())
        })?;
        let b = other.as_chain().ok_or_else(|| {
            MapError::Unsupported("pointwise comparison needs interval maps".into())
        })?;
        if a.domain() != b.domain() {
            return Ok(false);
        }
        let (lo, hi) = a.domain();
        let width = hi - lo;
        for i in 0..=grid {
            let x = lo + &width * q(i as i64, grid as i64);
            if a.eval(&x)? != b.eval(&x)? {
                return Ok(false);
            }
        }
        let (_, upper) = a.sup_distance_enclosure(&b, tol)?;
        Ok(&upper <= tol)
    }

    /// Surjectivity onto the space, decided exactly from piece extrema.
    pub fn is_surjective_on(&self, space: &Space) -> Result<bool, MapError> {
        match (self, space) {
            (Map::Pl(f), Space::Interval { lo, hi }) => Ok(f.is_surjective_onto(lo, hi)),
            (Map::Hybrid(c), Space::Interval { lo, hi }) => {
                let (dlo, dhi) = c.domain();
                let img = c.image(&IvSet::single(Iv::closed(dlo.clone(), dhi.clone())))?;
                Ok(img.inf() == lo && img.sup() == hi)
            }
            (Map::Circle(_), Space::Circle) => Ok(true),
            (Map::Product(ms), Space::Product(ss)) if ms.len() == ss.len() => {
                for (m, s) in ms.iter().zip(ss) {
                    if !m.is_surjective_on(s)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(MapError::KindMismatch("map does not fit space".into())),
        }
    }

    pub fn is_feebly_open(&self) -> bool {
        match self {
            Map::Pl(f) => f.is_feebly_open(),
            Map::Hybrid(c) => c.stages().iter().all(HybridMap::is_feebly_open),
            Map::Circle(_) => true,
            Map::Product(ms) => ms.iter().all(Map::is_feebly_open),
        }
    }

    /// Exact image of a region state.
    pub fn flow(&self, state: &RegionState) -> Result<RegionState, MapError> {
        Ok(match (self, state) {
            (Map::Pl(f), RegionState::Interval(set)) => {
                RegionState::Interval(pl_image_set(f, set)?)
            }
            (Map::Hybrid(c), RegionState::Interval(set)) => RegionState::Interval(c.image(set)?),
            (Map::Circle(m), RegionState::Circle(arc)) => RegionState::Circle(m.image(arc)),
            (Map::Product(ms), RegionState::Product(sts)) if ms.len() == sts.len() => {
                RegionState::Product(
                    ms.iter()
                        .zip(sts)
                        .map(|(m, st)| m.flow(st))
                        .collect::<Result<_, _>>()?,
                )
            }
            _ => {
                return Err(MapError::KindMismatch(format!(
                    "cannot flow {state:?} through {self:?}"
                )))
            }
        })
    }

    /// An open state inside the preimage of `target` under this map,
    /// restricted to `within`. `target` must be a sub-state of the image of
    /// `within`.
    pub fn pullback(&self, target: &RegionState, within: &RegionState) -> Option<RegionState> {
        match (self, target, within) {
            (Map::Pl(f), RegionState::Interval(t), RegionState::Interval(w)) => {
                let (t1, t2) = open_hull(t)?;
                let (a, b) = f.pullback_open(&t1, &t2, w)?;
                Some(RegionState::Interval(IvSet::single(Iv::open(a, b))))
            }
            (Map::Hybrid(c), RegionState::Interval(t), RegionState::Interval(w)) => {
                // prefix images of `within` through the stages, then walk the
                // target back stage by stage
                let mut sets: Vec<IvSet> = Vec::with_capacity(c.stages().len());
                sets.push(w.clone());
                for st in &c.stages()[..c.stages().len() - 1] {
                    let mut parts = Vec::new();
                    for iv in sets.last().unwrap().parts() {
                        parts.extend(st.image_iv(iv).ok()?.parts().iter().cloned());
                    }
                    sets.push(IvSet::from_parts(parts));
                }
                let (mut t1, mut t2) = open_hull(t)?;
                for (i, st) in c.stages().iter().enumerate().rev() {
                    let (a, b) = st.pullback_open(&t1, &t2, &sets[i])?;
                    t1 = a;
                    t2 = b;
                }
                Some(RegionState::Interval(IvSet::single(Iv::open(t1, t2))))
            }
            (Map::Circle(m), RegionState::Circle(t), RegionState::Circle(w)) => {
                let c = m.multiplier();
                let lo_t = &t.start / c;
                let len_t = &t.len / c;
                let hi_t = &lo_t + &len_t;
                let hi_w = &w.start + &w.len;
                let lo = if lo_t > w.start { lo_t } else { w.start.clone() };
                let hi = if hi_t < hi_w { hi_t } else { hi_w };
                if lo >= hi {
                    return None;
                }
                let len = &hi - &lo;
                Some(RegionState::Circle(CoverArc { start: lo, len }))
            }
            (Map::Product(ms), RegionState::Product(ts), RegionState::Product(ws)) => {
                let mut out = Vec::with_capacity(ms.len());
                for ((m, t), w) in ms.iter().zip(ts).zip(ws) {
                    out.push(m.pullback(t, w)?);
                }
                Some(RegionState::Product(out))
            }
            _ => None,
        }
    }
}

/// Applies `entries` in order to a point, folding circle coordinates on the
/// universal cover so the result equals the composite map's value.
pub fn apply_entry_sequence(entries: &[Map], p: &Point) -> Result<Point, MapError> {
    match p {
        Point::Interval(x) => {
            let mut v = x.clone();
            for m in entries {
                v = match m {
                    Map::Pl(f) => f.eval(&v)?,
                    Map::Hybrid(c) => c.eval(&v)?,
                    _ => return Err(MapError::KindMismatch("interval point".into())),
                };
            }
            Ok(Point::Interval(v))
        }
        Point::Circle(t) => {
            let mut mult = q_int(1);
            for m in entries {
                match m {
                    Map::Circle(c) => mult *= c.multiplier(),
                    _ => return Err(MapError::KindMismatch("circle point".into())),
                }
            }
            Ok(Point::Circle(frac_mod_one(&(mult * t))))
        }
        Point::Product(ps) => {
            let arity = ps.len();
            let mut coords = Vec::with_capacity(arity);
            for i in 0..arity {
                let factor_entries: Vec<Map> = entries
                    .iter()
                    .map(|m| match m {
                        Map::Product(ms) if ms.len() == arity => Ok(ms[i].clone()),
                        _ => Err(MapError::KindMismatch("product point".into())),
                    })
                    .collect::<Result<_, _>>()?;
                coords.push(apply_entry_sequence(&factor_entries, &ps[i])?);
            }
            Ok(Point::Product(coords))
        }
    }
}

fn pl_image_set(f: &PLMap, set: &IvSet) -> Result<IvSet, MapError> {
    let mut parts = Vec::new();
    for iv in set.parts() {
        if iv.is_degenerate() {
            parts.push(Iv::point(f.eval(&iv.lo)?));
            continue;
        }
        let img = f.image_open(&iv.lo, &iv.hi)?;
        for p in img.parts() {
            let mut p = p.clone();
            for (end, closed) in [(&iv.lo, iv.lo_closed), (&iv.hi, iv.hi_closed)] {
                if closed {
                    let y = f.eval(end)?;
                    if y == p.lo {
                        p.lo_closed = true;
                    } else if y == p.hi {
                        p.hi_closed = true;
                    } else if y < p.lo || y > p.hi {
                        parts.push(Iv::point(y));
                    }
                }
            }
            parts.push(p);
        }
    }
    Ok(IvSet::from_parts(parts))
}

fn open_hull(set: &IvSet) -> Option<(Q, Q)> {
    let (a, b) = (set.inf().clone(), set.sup().clone());
    if a < b {
        Some((a, b))
    } else {
        None
    }
}

impl RegionState {
    pub fn from_region(r: &OpenRegion) -> RegionState {
        match r {
            OpenRegion::Interval { a, b } => {
                RegionState::Interval(IvSet::single(Iv::open(a.clone(), b.clone())))
            }
            OpenRegion::Arc { start, len } => RegionState::Circle(CoverArc {
                start: start.clone(),
                len: len.clone(),
            }),
            OpenRegion::Product(rs) => {
                RegionState::Product(rs.iter().map(RegionState::from_region).collect())
            }
        }
    }

    /// Diameter under the space contract: linear for interval and circle
    /// states, squared (`d̂²`) for products.
    pub fn diameter_contract(&self) -> Q {
        match self {
            RegionState::Interval(set) => set.diameter(),
            RegionState::Circle(arc) => arc.diameter(),
            RegionState::Product(sts) => sts.iter().map(RegionState::diameter_sq).sum(),
        }
    }

    pub fn diameter_sq(&self) -> Q {
        match self {
            RegionState::Product(sts) => sts.iter().map(RegionState::diameter_sq).sum(),
            _ => {
                let d = self.diameter_contract();
                &d * &d
            }
        }
    }

    /// Separation test under the contract (`δ` squared against product
    /// states).
    pub fn separates(&self, delta: &Q) -> bool {
        match self {
            RegionState::Product(_) => self.diameter_contract() > delta * delta,
            _ => &self.diameter_contract() > delta,
        }
    }

    /// Does the state meet the open region (as subsets of the space)?
    pub fn meets(&self, r: &OpenRegion) -> bool {
        match (self, r) {
            (RegionState::Interval(set), OpenRegion::Interval { a, b }) => set.meets_open(a, b),
            (RegionState::Circle(arc), OpenRegion::Arc { start, len }) => arc.meets(&CoverArc {
                start: start.clone(),
                len: len.clone(),
            }),
            (RegionState::Product(sts), OpenRegion::Product(rs)) if sts.len() == rs.len() => {
                sts.iter().zip(rs).all(|(s, r)| s.meets(r))
            }
            _ => false,
        }
    }

    /// A canonical point strictly inside the state.
    pub fn interior_point(&self) -> Option<Point> {
        match self {
            RegionState::Interval(set) => set
                .parts()
                .iter()
                .find(|iv| !iv.is_degenerate())
                .map(|iv| Point::Interval(simplest_dyadic_in(&iv.lo, &iv.hi))),
            RegionState::Circle(arc) => Some(Point::Circle(arc.interior_point())),
            RegionState::Product(sts) => Some(Point::Product(
                sts.iter()
                    .map(RegionState::interior_point)
                    .collect::<Option<Vec<_>>>()?,
            )),
        }
    }
}

/// A separated pair in the source region, with the achieved distance in
/// contract units.
#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub u: Point,
    pub v: Point,
    pub achieved: Q,
}

/// Finds `u, v` in the source region (state 0) whose images after all
/// `entries` are separated by more than `target` (contract units: linear for
/// interval and circle spaces, compared squared on products). Requires the
/// final state to separate at `target`: `states[n].separates(target)`.
pub fn witness_pair(
    space: &Space,
    entries: &[Map],
    states: &[RegionState],
    target: &Q,
) -> Result<WitnessPair, MapError> {
    let n = entries.len();
    assert_eq!(states.len(), n + 1, "need states 0..=n");
    let (u, v) = witness_points(space, entries, states, target)?;
    let fu = apply_entry_sequence(entries, &u)?;
    let fv = apply_entry_sequence(entries, &v)?;
    let achieved = space.distance(&fu, &fv)?;
    if !space.exceeds(&achieved, target) {
        return Err(MapError::WitnessSearch(n as u64));
    }
    Ok(WitnessPair { u, v, achieved })
}

fn witness_points(
    space: &Space,
    entries: &[Map],
    states: &[RegionState],
    target: &Q,
) -> Result<(Point, Point), MapError> {
    let last = states.last().unwrap();
    match (space, last) {
        (Space::Interval { .. }, RegionState::Interval(set)) => {
            let diam = set.diameter();
            if &diam <= target {
                return Err(MapError::WitnessSearch(entries.len() as u64));
            }
            let eps = (&diam - target) / q_int(4);
            let (m, big) = (set.inf().clone(), set.sup().clone());
            let lo_slice = RegionState::Interval(IvSet::single(Iv::open(m.clone(), &m + &eps)));
            let hi_slice = RegionState::Interval(IvSet::single(Iv::open(&big - &eps, big)));
            let u = pull_to_source(entries, states, lo_slice)?;
            let v = pull_to_source(entries, states, hi_slice)?;
            Ok((u, v))
        }
        (Space::Circle, RegionState::Circle(arc)) => {
            let src = match &states[0] {
                RegionState::Circle(src) => src.clone(),
                _ => return Err(MapError::KindMismatch("circle flow".into())),
            };
            let total_mult = &arc.len / &src.len;
            let half = q(1, 2);
            // cover gap g must satisfy min(g, 1-g) > target and g strictly
            // below the image length (the source arc is open)
            let g = if arc.len > half {
                half
            } else {
                (&arc.len + target) / q_int(2)
            };
            let sep = &g / &total_mult;
            if sep >= src.len {
                return Err(MapError::WitnessSearch(entries.len() as u64));
            }
            let margin = (&src.len - &sep) / q_int(2);
            let u = &src.start + &margin;
            let v = &u + &sep;
            Ok((
                Point::Circle(frac_mod_one(&u)),
                Point::Circle(frac_mod_one(&v)),
            ))
        }
        (Space::Product(ss), RegionState::Product(sts)) if ss.len() == sts.len() => {
            let sq: Vec<Q> = sts.iter().map(RegionState::diameter_sq).collect();
            let total: Q = sq.iter().cloned().sum();
            let t2 = target * target;
            if total <= t2 {
                return Err(MapError::WitnessSearch(entries.len() as u64));
            }
            // per-factor targets t_i with t_i² strictly between
            // scale·d_i² and d_i², where scale = (t² + total)/(2 total);
            // then Σ achieved² > Σ scale·d_i² = (t² + total)/2 > t²
            let scale = (&t2 + &total) / (q_int(2) * &total);
            let factor_entries = split_product_entries(entries)?;
            let factor_states = split_product_states(states)?;
            let mut us = Vec::new();
            let mut vs = Vec::new();
            for i in 0..sts.len() {
                if sq[i].is_zero() {
                    let src = factor_states[i][0]
                        .interior_point()
                        .ok_or(MapError::WitnessSearch(0))?;
                    us.push(src.clone());
                    vs.push(src);
                    continue;
                }
                let lo_sq = &sq[i] * &scale;
                let t_i = rational_with_square_between(&lo_sq, &sq[i])?;
                let pair = witness_pair(&ss[i], &factor_entries[i], &factor_states[i], &t_i)?;
                us.push(pair.u);
                vs.push(pair.v);
            }
            Ok((Point::Product(us), Point::Product(vs)))
        }
        _ => Err(MapError::KindMismatch(
            "flow state does not match space".into(),
        )),
    }
}

fn pull_to_source(
    entries: &[Map],
    states: &[RegionState],
    mut target: RegionState,
) -> Result<Point, MapError> {
    for (i, m) in entries.iter().enumerate().rev() {
        target = m
            .pullback(&target, &states[i])
            .ok_or(MapError::WitnessSearch(i as u64 + 1))?;
    }
    target.interior_point().ok_or(MapError::WitnessSearch(0))
}

fn split_product_entries(entries: &[Map]) -> Result<Vec<Vec<Map>>, MapError> {
    let arity = match entries.first() {
        Some(Map::Product(ms)) => ms.len(),
        _ => {
            return Err(MapError::KindMismatch(
                "product flow needs product maps".into(),
            ))
        }
    };
    let mut out = vec![Vec::with_capacity(entries.len()); arity];
    for e in entries {
        match e {
            Map::Product(ms) if ms.len() == arity => {
                for (i, m) in ms.iter().enumerate() {
                    out[i].push(m.clone());
                }
            }
            _ => return Err(MapError::KindMismatch("ragged product entries".into())),
        }
    }
    Ok(out)
}

fn split_product_states(states: &[RegionState]) -> Result<Vec<Vec<RegionState>>, MapError> {
    let arity = match states.first() {
        Some(RegionState::Product(sts)) => sts.len(),
        _ => {
            return Err(MapError::KindMismatch(
                "product flow needs product states".into(),
            ))
        }
    };
    let mut out = vec![Vec::with_capacity(states.len()); arity];
    for s in states {
        match s {
            RegionState::Product(sts) if sts.len() == arity => {
                for (i, st) in sts.iter().enumerate() {
                    out[i].push(st.clone());
                }
            }
            _ => return Err(MapError::KindMismatch("ragged product states".into())),
        }
    }
    Ok(out)
}

/// A rational `t >= 0` with `lo_sq < t² < hi_sq`, by bisection on exact
/// squares (the band `(√lo_sq, √hi_sq)` has positive width, so bisection
/// lands inside it).
fn rational_with_square_between(lo_sq: &Q, hi_sq: &Q) -> Result<Q, MapError> {
    debug_assert!(lo_sq < hi_sq);
    let mut lo = Q::zero();
    let mut hi = {
        let one = q_int(1);
        if hi_sq >= &one {
            hi_sq.clone()
        } else {
            one
        }
    };
    for _ in 0..20_000 {
        let mid = (&lo + &hi) / q_int(2);
        let m2 = &mid * &mid;
        if &m2 <= lo_sq {
            lo = mid;
        } else if &m2 >= hi_sq {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Err(MapError::WitnessSearch(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::tent;

    fn unit() -> Space {
        Space::unit_interval()
    }

    #[test]
    fn flow_tent_region() {
        let t = Map::Pl(tent());
        let mut st = RegionState::from_region(&OpenRegion::interval(q(3, 10), q(2, 5)).unwrap());
        let expect = [q(1, 5), q(2, 5), q(3, 5), q_int(1)];
        for e in &expect {
            st = t.flow(&st).unwrap();
            assert_eq!(&st.diameter_contract(), e);
        }
        assert!(st.separates(&q(1, 2)));
    }

    #[test]
    fn witness_recovery_interval() {
        let space = unit();
        let t = Map::Pl(tent());
        let entries = vec![t.clone(), t.clone(), t.clone()];
        let r = OpenRegion::interval(q(3, 10), q(2, 5)).unwrap();
        let mut states = vec![RegionState::from_region(&r)];
        for e in &entries {
            states.push(e.flow(states.last().unwrap()).unwrap());
        }
        let w = witness_pair(&space, &entries, &states, &q(1, 2)).unwrap();
        assert!(w.achieved > q(1, 2));
        assert!(r.contains(&w.u) && r.contains(&w.v));
    }

    #[test]
    fn witness_recovery_circle() {
        let space = Space::Circle;
        let m = Map::Circle(CircleMap::new(q_int(3)).unwrap());
        let entries = vec![m.clone()];
        let src = OpenRegion::arc(&q_int(0), q(1, 8)).unwrap();
        let mut states = vec![RegionState::from_region(&src)];
        states.push(m.flow(&states[0]).unwrap());
        let w = witness_pair(&space, &entries, &states, &q(1, 4)).unwrap();
        assert!(w.achieved > q(1, 4));
        assert!(src.contains(&w.u) && src.contains(&w.v));
    }

    #[test]
    fn witness_recovery_product() {
        let space = Space::product(vec![unit(), unit()]).unwrap();
        let m = Map::Product(vec![Map::Pl(tent()), Map::Pl(tent())]);
        let entries = vec![m.clone(), m.clone(), m.clone(), m.clone()];
        let src = OpenRegion::product(vec![
            OpenRegion::interval(q(3, 10), q(2, 5)).unwrap(),
            OpenRegion::interval(q(1, 10), q(1, 5)).unwrap(),
        ])
        .unwrap();
        let mut states = vec![RegionState::from_region(&src)];
        for e in &entries {
            states.push(e.flow(states.last().unwrap()).unwrap());
        }
        // after 4 steps both factors cover [0,1]: d̂² = 2 > 1 = δ²
        let w = witness_pair(&space, &entries, &states, &q_int(1)).unwrap();
        assert!(w.achieved > q_int(1)); // squared contract
        assert!(src.contains(&w.u) && src.contains(&w.v));
    }

    #[test]
    fn cover_semantics_for_sequences() {
        // multiplier 9 then 1/9 is the identity as a composite, even though
        // stepwise mod-1 evaluation would disagree after the wrap
        let expand = Map::Circle(CircleMap::new(q_int(9)).unwrap());
        let shrink = Map::Circle(CircleMap::new(q(1, 9)).unwrap());
        let p = Point::Circle(q(3, 5));
        let out = apply_entry_sequence(&[expand, shrink], &p).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn compose_rules() {
        let t = Map::Pl(tent());
        let c = Map::Circle(CircleMap::new(q_int(2)).unwrap());
        assert!(t.then(&c).is_err());
        assert!(matches!(t.then(&t).unwrap(), Map::Pl(_)));
        match c.then(&c).unwrap() {
            Map::Circle(m) => assert_eq!(m.multiplier(), &q_int(4)),
            _ => panic!(),
        }
    }

    #[test]
    fn self_map_checks() {
        let t = Map::Pl(tent());
        assert!(t.is_self_map_of(&unit()));
        let escape =
            Map::Pl(PLMap::new(vec![(q_int(0), q_int(0)), (q_int(1), q_int(2))]).unwrap());
        assert!(!escape.is_self_map_of(&unit()));
    }
}
