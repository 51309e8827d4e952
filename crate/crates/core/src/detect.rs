//! Separation-time sets and the finite-horizon sensitivity deciders.
//!
//! The separation-time set `N(V, δ)` of a system collects the times `n` at
//! which some pair of points of the open set `V` has been moved more than
//! `δ` apart. Sensitivity, cofinite sensitivity, multi-sensitivity with
//! respect to a vector, and their stronger variants are all statements about
//! such sets quantified over *all* open sets and *all* times, which no
//! finite computation can decide. The deciders here therefore work at an
//! explicit horizon `H` over an explicit, reproducible family of regions
//! (the *battery*), and return three-valued verdicts:
//!
//! * `Witnessed` — every scanned tuple of regions has a common separation
//!   time `<= H`; the certificate carries re-checkable point pairs.
//! * `RefutedAtHorizon` — some scanned tuple has no common separation time
//!   `<= H`; the failing tuple is recorded.
//! * `Inconclusive` — a resource guard stopped the scan.
//!
//! The default battery covers the space with dyadic cells at resolution `b`
//! and, when `δ` is smaller than a cell, adds one `δ/2`-sized probe region
//! per cell. The probes matter: properties of the form "there is a `δ` that
//! works for every open set" fail on sets smaller than `δ` whenever the
//! dynamics never expands them, and a battery without sub-`δ` regions could
//! not see that.

use rayon::prelude::*;

use crate::error::MapError;
use crate::map::{witness_pair, Map, RegionState, WitnessPair};
use crate::metric::{OpenRegion, Point, Space};
use crate::nds::{ConvergenceReport, NDSystem, PeriodicityEvidence};
use crate::rational::{pow2_neg, q_int, Q};

pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;

/// Iterate-exponent vector `(v_1, …, v_r)`, all entries positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterateVector(Vec<u64>);

impl IterateVector {
    pub fn new(v: Vec<u64>) -> Result<IterateVector, MapError> {
        if v.is_empty() || v.iter().any(|&x| x == 0) {
            return Err(MapError::Invalid(
                "iterate vector needs positive entries".into(),
            ));
        }
        Ok(IterateVector(v))
    }

    /// `(1, 2, …, n)`.
    pub fn ramp(n: u64) -> IterateVector {
        IterateVector((1..=n).collect())
    }

    /// `(1, …, 1)` of the given arity.
    pub fn ones(arity: usize) -> IterateVector {
        IterateVector(vec![1; arity])
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn max_entry(&self) -> u64 {
        *self.0.iter().max().unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Witnessed,
    RefutedAtHorizon,
    Inconclusive,
}

/// Backend note for a scan. Every map kind shipped here computes images
/// exactly (quadratic pieces included), so scans report `Exact`; the
/// `Enclosure` variant is reserved for backends that can only bound
/// diameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Exact,
    Enclosure,
}

/// A finite-horizon separation-time set with one re-checkable witness pair
/// per member. Exact backends are complete below the horizon: a time absent
/// from `members` has image diameter at most `δ`.
#[derive(Debug, Clone)]
pub struct NSet {
    pub system: String,
    pub region: OpenRegion,
    pub delta: Q,
    pub horizon: u64,
    pub resolution: Resolution,
    pub members: Vec<NSetMember>,
}

#[derive(Debug, Clone)]
pub struct NSetMember {
    pub n: u64,
    pub witness: WitnessPair,
}

impl NSet {
    pub fn member_times(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.n).collect()
    }
}

/// Exact separation-time set of `region` under the system, up to `horizon`.
/// Membership is decided from exact image diameters; each member carries a
/// witness pair that re-validates by exact evaluation.
pub fn n_set(
    s: &NDSystem,
    region: &OpenRegion,
    delta: &Q,
    horizon: u64,
) -> Result<NSet, MapError> {
    region.validate_in(s.space())?;
    require_positive(delta)?;
    let entries = s.entries_up_to(horizon);
    let mut states = Vec::with_capacity(horizon as usize + 1);
    states.push(RegionState::from_region(region));
    for e in &entries {
        states.push(e.flow(states.last().unwrap())?);
    }
    let mut members = Vec::new();
    for n in 1..=horizon as usize {
        if states[n].separates(delta) {
            let witness = witness_pair(s.space(), &entries[..n], &states[..=n], delta)?;
            members.push(NSetMember { n: n as u64, witness });
        }
    }
    Ok(NSet {
        system: s.id().to_string(),
        region: region.clone(),
        delta: delta.clone(),
        horizon,
        resolution: Resolution::Exact,
        members,
    })
}

/// Exact image diameters (contract units) of `region` at steps `1..=steps`.
pub fn diam_sequence(s: &NDSystem, region: &OpenRegion, steps: u64) -> Result<Vec<Q>, MapError> {
    region.validate_in(s.space())?;
    let mut state = RegionState::from_region(region);
    let mut out = Vec::with_capacity(steps as usize);
    for i in 1..=steps {
        state = s.entry(i).flow(&state)?;
        out.push(state.diameter_contract());
    }
    Ok(out)
}

fn mask_from_diams(space: &Space, diams: &[Q], delta: &Q) -> BitMask {
    let mut m = BitMask::zeros(diams.len());
    for (i, d) in diams.iter().enumerate() {
        if space.exceeds(d, delta) {
            m.set(i);
        }
    }
    m
}

#[derive(Debug, Clone)]
struct BitMask {
    chunks: Vec<u64>,
    len: usize,
}

impl BitMask {
    fn zeros(len: usize) -> BitMask {
        BitMask { chunks: vec![0; len.div_ceil(64)], len }
    }

    fn set(&mut self, i: usize) {
        self.chunks[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.chunks[i / 64] >> (i % 64) & 1 == 1
    }

    /// First index set in the AND of all masks, if any.
    fn first_common(masks: &[&BitMask]) -> Option<usize> {
        let len = masks[0].len;
        for c in 0..len.div_ceil(64) {
            let mut acc = !0u64;
            for m in masks {
                acc &= m.chunks[c];
            }
            if acc != 0 {
                let idx = c * 64 + acc.trailing_zeros() as usize;
                if idx < len {
                    return Some(idx);
                }
            }
        }
        None
    }
}

/// The reproducible region family a battery-quantified decider scans.
#[derive(Debug, Clone)]
pub struct Battery {
    pub regions: Vec<OpenRegion>,
    pub resolution: u32,
    pub probe_len: Option<Q>,
    pub window: Option<OpenRegion>,
}

impl Battery {
    /// Explicit region list (no generation).
    pub fn explicit(regions: Vec<OpenRegion>) -> Battery {
        Battery { regions, resolution: 0, probe_len: None, window: None }
    }
}

/// Dyadic battery at resolution `b` over the space (or a window inside it),
/// with `δ/2`-sized probe regions added when the cells are wider than `δ/2`.
pub fn default_battery(
    space: &Space,
    b: u32,
    delta: &Q,
    window: Option<&OpenRegion>,
) -> Result<Battery, MapError> {
    require_positive(delta)?;
    if let Some(w) = window {
        w.validate_in(space)?;
    }
    let regions = battery_regions(space, b, delta, window)?;
    let probe_len = regions_probe_len(space, b, delta, window)?;
    Ok(Battery { regions, resolution: b, probe_len, window: window.cloned() })
}

fn battery_regions(
    space: &Space,
    b: u32,
    delta: &Q,
    window: Option<&OpenRegion>,
) -> Result<Vec<OpenRegion>, MapError> {
    match space {
        Space::Interval { lo, hi } => {
            let (wlo, whi) = match window {
                Some(OpenRegion::Interval { a, b }) => (a.clone(), b.clone()),
                None => (lo.clone(), hi.clone()),
                Some(r) => {
                    return Err(MapError::KindMismatch(format!(
                        "window {r:?} does not fit interval space"
                    )))
                }
            };
            let width = &whi - &wlo;
            let cells = 1u64 << b;
            let cell_w = &width / q_int(cells as i64);
            let probe = probe_width(&width, b, delta);
            let mut out = Vec::new();
            for i in 0..cells {
                let a = &wlo + &cell_w * q_int(i as i64);
                let b_ = &a + &cell_w;
                out.push(OpenRegion::Interval { a: a.clone(), b: b_ });
                if let Some(p) = &probe {
                    out.push(OpenRegion::Interval { a: a.clone(), b: &a + p });
                }
            }
            Ok(out)
        }
        Space::Circle => {
            let (wstart, wlen) = match window {
                Some(OpenRegion::Arc { start, len }) => (start.clone(), len.clone()),
                None => (q_int(0), q_int(1)),
                Some(r) => {
                    return Err(MapError::KindMismatch(format!(
                        "window {r:?} does not fit circle space"
                    )))
                }
            };
            let cells = 1u64 << b;
            let cell_w = &wlen / q_int(cells as i64);
            let probe = probe_width(&wlen, b, delta);
            let mut out = Vec::new();
            for i in 0..cells {
                let start = &wstart + &cell_w * q_int(i as i64);
                out.push(OpenRegion::arc(&start, cell_w.clone())?);
                if let Some(p) = &probe {
                    out.push(OpenRegion::arc(&start, p.clone())?);
                }
            }
            Ok(out)
        }
        Space::Product(factors) => {
            // resolution capped per factor to keep tuple scans tractable
            let fb = b.min(3);
            let windows: Vec<Option<&OpenRegion>> = match window {
                Some(OpenRegion::Product(ws)) if ws.len() == factors.len() => {
                    ws.iter().map(Some).collect()
                }
                None => vec![None; factors.len()],
                Some(r) => {
                    return Err(MapError::KindMismatch(format!(
                        "window {r:?} does not fit product space"
                    )))
                }
            };
            let mut per_factor = Vec::new();
            for (f, w) in factors.iter().zip(windows) {
                per_factor.push(battery_regions(f, fb, delta, w)?);
            }
            let mut out: Vec<Vec<OpenRegion>> = vec![Vec::new()];
            for frs in &per_factor {
                let mut next = Vec::with_capacity(out.len() * frs.len());
                for prefix in &out {
                    for r in frs {
                        let mut p = prefix.clone();
                        p.push(r.clone());
                        next.push(p);
                    }
                }
                out = next;
            }
            Ok(out.into_iter().map(OpenRegion::Product).collect())
        }
    }
}

fn regions_probe_len(
    space: &Space,
    b: u32,
    delta: &Q,
    window: Option<&OpenRegion>,
) -> Result<Option<Q>, MapError> {
    Ok(match space {
        Space::Interval { lo, hi } => {
            let width = match window {
                Some(OpenRegion::Interval { a, b }) => b - a,
                _ => hi - lo,
            };
            probe_width(&width, b, delta)
        }
        Space::Circle => {
            let width = match window {
                Some(OpenRegion::Arc { len, .. }) => len.clone(),
                _ => q_int(1),
            };
            probe_width(&width, b, delta)
        }
        Space::Product(_) => probe_width(&q_int(1), b.min(3), delta),
    })
}

/// Largest `width/2^j <= δ/2` with `j > b`, or `None` when the base cells
/// are already that small. Capped at `j = 40`.
fn probe_width(width: &Q, b: u32, delta: &Q) -> Option<Q> {
    let half_delta = delta / q_int(2);
    let base = width * pow2_neg(b);
    if base <= half_delta {
        return None;
    }
    for j in b + 1..=40 {
        let w = width * pow2_neg(j);
        if w <= half_delta {
            return Some(w);
        }
    }
    Some(width * pow2_neg(40))
}

/// What a sensitivity certificate claims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyTag {
    Sensitive,
    CofiniteSensitive { tail: u64 },
    MultiSensitive { arity: usize },
    VectorMulti,
    NSensitive { n: u64 },
    StrongMulti,
}

#[derive(Debug, Clone)]
pub struct BatteryDescriptor {
    pub resolution: u32,
    pub probe_len: Option<Q>,
    pub window: Option<OpenRegion>,
    pub region_count: usize,
    pub explicit_regions: Option<Vec<OpenRegion>>,
}

impl BatteryDescriptor {
    fn of(b: &Battery) -> BatteryDescriptor {
        BatteryDescriptor {
            resolution: b.resolution,
            probe_len: b.probe_len.clone(),
            window: b.window.clone(),
            region_count: b.regions.len(),
            explicit_regions: if b.resolution == 0 {
                Some(b.regions.clone())
            } else {
                None
            },
        }
    }
}

/// Re-checkable record for one vector: the hardest scanned tuple, its common
/// separation time, and one witness pair per slot.
#[derive(Debug, Clone)]
pub struct VectorWitness {
    pub vector: Vec<u64>,
    pub regions: Vec<OpenRegion>,
    pub common_n: u64,
    pub pairs: Vec<SlotWitness>,
}

#[derive(Debug, Clone)]
pub struct SlotWitness {
    pub iterate: u64,
    pub base_step: u64,
    pub u: Point,
    pub v: Point,
    pub achieved: Q,
}

/// The tuple that had no common separation time below the horizon.
#[derive(Debug, Clone)]
pub struct RefutedTuple {
    pub vector: Vec<u64>,
    pub regions: Vec<OpenRegion>,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub schema_version: u32,
    pub system: String,
    pub property: PropertyTag,
    pub verdict: Verdict,
    pub delta: Q,
    pub horizon: u64,
    pub battery: BatteryDescriptor,
    pub vectors: Vec<Vec<u64>>,
    pub witnesses: Vec<VectorWitness>,
    pub refuted: Option<RefutedTuple>,
    pub notes: Vec<String>,
}

fn require_positive(delta: &Q) -> Result<(), MapError> {
    if delta <= &Q::from_integer(0.into()) {
        return Err(MapError::Invalid(format!(
            "threshold must be positive, got {delta}"
        )));
    }
    Ok(())
}

/// Per-region exact diameter sequences up to `steps`, computed in parallel
/// and collected in battery order.
fn battery_diams(
    s: &NDSystem,
    regions: &[OpenRegion],
    steps: u64,
) -> Result<Vec<Vec<Q>>, MapError> {
    regions
        .par_iter()
        .map(|r| diam_sequence(s, r, steps))
        .collect()
}

enum TupleMode {
    /// The battery IS the tuple (explicit regions, one per slot).
    Single,
    /// Quantify over every assignment battery^arity.
    AllAssignments,
}

enum ScanOutcome {
    Witnessed(VectorWitness),
    Refuted(RefutedTuple),
}

/// Core scan: common separation times of iterate systems across region
/// assignments of a battery, for one vector.
fn scan_vector(
    s: &NDSystem,
    v: &IterateVector,
    battery: &Battery,
    delta: &Q,
    horizon: u64,
    tuples: TupleMode,
) -> Result<ScanOutcome, MapError> {
    let steps = v.max_entry() * horizon;
    let diams = battery_diams(s, &battery.regions, steps)?;
    // slot i, region r: member n <=> base step v_i · n separates
    let arity = v.arity();
    let mut masks: Vec<Vec<BitMask>> = Vec::with_capacity(arity);
    for vi in v.entries() {
        let mut per_region = Vec::with_capacity(diams.len());
        for d in &diams {
            let sub: Vec<Q> = (1..=horizon)
                .map(|n| d[(vi * n - 1) as usize].clone())
                .collect();
            per_region.push(mask_from_diams(s.space(), &sub, delta));
        }
        masks.push(per_region);
    }
    let region_count = battery.regions.len();
    let mut hardest: Option<(Vec<usize>, u64)> = None;
    let mut check_tuple = |assignment: &[usize],
                           hardest: &mut Option<(Vec<usize>, u64)>|
     -> Option<Vec<usize>> {
        let slot_masks: Vec<&BitMask> = assignment
            .iter()
            .enumerate()
            .map(|(slot, &ri)| &masks[slot][ri])
            .collect();
        match BitMask::first_common(&slot_masks) {
            Some(idx) => {
                let n = idx as u64 + 1;
                if hardest.as_ref().map(|(_, best)| n > *best).unwrap_or(true) {
                    *hardest = Some((assignment.to_vec(), n));
                }
                None
            }
            None => Some(assignment.to_vec()),
        }
    };
    let failing = match tuples {
        TupleMode::Single => {
            let assignment: Vec<usize> = (0..arity).collect();
            check_tuple(&assignment, &mut hardest)
        }
        TupleMode::AllAssignments => {
            let mut assignment = vec![0usize; arity];
            'outer: loop {
                if let Some(fail) = check_tuple(&assignment, &mut hardest) {
                    break 'outer Some(fail);
                }
                let mut pos = arity;
                loop {
                    if pos == 0 {
                        break 'outer None;
                    }
                    pos -= 1;
                    assignment[pos] += 1;
                    if assignment[pos] < region_count {
                        break;
                    }
                    assignment[pos] = 0;
                }
            }
        }
    };
    Ok(match failing {
        Some(assignment) => ScanOutcome::Refuted(RefutedTuple {
            vector: v.entries().to_vec(),
            regions: assignment
                .iter()
                .map(|&ri| battery.regions[ri].clone())
                .collect(),
        }),
        None => {
            let (assignment, common_n) = hardest.expect("witnessed scan has a hardest tuple");
            let mut pairs = Vec::with_capacity(arity);
            for (slot, &ri) in assignment.iter().enumerate() {
                let vi = v.entries()[slot];
                let base_step = vi * common_n;
                let region = &battery.regions[ri];
                let entries = s.entries_up_to(base_step);
                let mut states = vec![RegionState::from_region(region)];
                for e in &entries {
                    states.push(e.flow(states.last().unwrap())?);
                }
                let w = witness_pair(s.space(), &entries, &states, delta)?;
                pairs.push(SlotWitness {
                    iterate: vi,
                    base_step,
                    u: w.u,
                    v: w.v,
                    achieved: w.achieved,
                });
            }
            ScanOutcome::Witnessed(VectorWitness {
                vector: v.entries().to_vec(),
                regions: assignment
                    .iter()
                    .map(|&ri| battery.regions[ri].clone())
                    .collect(),
                common_n,
                pairs,
            })
        }
    })
}

fn certificate(
    s: &NDSystem,
    property: PropertyTag,
    delta: &Q,
    horizon: u64,
    battery: &Battery,
    vectors: Vec<Vec<u64>>,
    outcomes: Vec<ScanOutcome>,
) -> Certificate {
    let mut witnesses = Vec::new();
    let mut refuted = None;
    for o in outcomes {
        match o {
            ScanOutcome::Witnessed(w) => witnesses.push(w),
            ScanOutcome::Refuted(r) => {
                if refuted.is_none() {
                    refuted = Some(r);
                }
            }
        }
    }
    let verdict = if refuted.is_some() {
        Verdict::RefutedAtHorizon
    } else {
        Verdict::Witnessed
    };
    Certificate {
        schema_version: CERTIFICATE_SCHEMA_VERSION,
        system: s.id().to_string(),
        property,
        verdict,
        delta: delta.clone(),
        horizon,
        battery: BatteryDescriptor::of(battery),
        vectors,
        witnesses,
        refuted,
        notes: Vec::new(),
    }
}

/// Multi-sensitivity with respect to one vector, on explicit regions (one
/// per slot). The verdict speaks only about these regions.
pub fn vector_multi_sensitivity(
    s: &NDSystem,
    v: &IterateVector,
    regions: &[OpenRegion],
    delta: &Q,
    horizon: u64,
) -> Result<Certificate, MapError> {
    if regions.len() != v.arity() {
        return Err(MapError::Invalid(format!(
            "vector arity {} needs {} regions, got {}",
            v.arity(),
            v.arity(),
            regions.len()
        )));
    }
    for r in regions {
        r.validate_in(s.space())?;
    }
    require_positive(delta)?;
    let battery = Battery::explicit(regions.to_vec());
    let outcome = scan_vector(s, v, &battery, delta, horizon, TupleMode::Single)?;
    let mut cert = certificate(
        s,
        PropertyTag::VectorMulti,
        delta,
        horizon,
        &battery,
        vec![v.entries().to_vec()],
        vec![outcome],
    );
    cert.notes
        .push("explicit regions: verdict is not battery-quantified".into());
    Ok(cert)
}

/// Multi-sensitivity with respect to one vector, quantified over every
/// region assignment of the battery.
pub fn vector_multi_over_battery(
    s: &NDSystem,
    v: &IterateVector,
    battery: &Battery,
    delta: &Q,
    horizon: u64,
) -> Result<Certificate, MapError> {
    require_positive(delta)?;
    let outcome = scan_vector(s, v, battery, delta, horizon, TupleMode::AllAssignments)?;
    Ok(certificate(
        s,
        PropertyTag::VectorMulti,
        delta,
        horizon,
        battery,
        vec![v.entries().to_vec()],
        vec![outcome],
    ))
}

/// Sensitivity: vector `(1)` over the battery.
pub fn sensitivity(
    s: &NDSystem,
    battery: &Battery,
    delta: &Q,
    horizon: u64,
) -> Result<Certificate, MapError> {
    let outcome = scan_vector(
        s,
        &IterateVector::ones(1),
        battery,
        delta,
        horizon,
        TupleMode::AllAssignments,
    )?;
    Ok(certificate(
        s,
        PropertyTag::Sensitive,
        delta,
        horizon,
        battery,
        vec![vec![1]],
        vec![outcome],
    ))
}

/// Plain multi-sensitivity of the given arity: vector `(1, …, 1)`.
pub fn multi_sensitivity(
    s: &NDSystem,
    arity: usize,
    battery: &Battery,
    delta: &Q,
    horizon: u64,
) -> Result<Certificate, MapError> {
    let v = IterateVector::ones(arity.max(1));
    let outcome = scan_vector(s, &v, battery, delta, horizon, TupleMode::AllAssignments)?;
    Ok(certificate(
        s,
        PropertyTag::MultiSensitive { arity: v.arity() },
        delta,
        horizon,
        battery,
        vec![v.entries().to_vec()],
        vec![outcome],
    ))
}

/// Sensitivity w.r.t. the ramp vector `(1, 2, …, n)` over the battery.
pub fn n_sensitivity(
    s: &NDSystem,
    n: u64,
    battery: &Battery,
    delta: &Q,
    horizon: u64,
) -> Result<Certificate, MapError> {
    assert!(n >= 1);
    let v = IterateVector::ramp(n);
    let outcome = scan_vector(s, &v, battery, delta, horizon, TupleMode::AllAssignments)?;
    Ok(certificate(
        s,
        PropertyTag::NSensitive { n },
        delta,
        horizon,
        battery,
        vec![v.entries().to_vec()],
        vec![outcome],
    ))
}

/// Strong multi-sensitivity over an explicit finite vector family (the
/// universal quantifier over all vectors is approximated by the family; the
/// certificate records which vectors were checked).
pub fn strong_multi_sensitivity(
    s: &NDSystem,
    family: &[IterateVector],
    battery: &Battery,
    delta: &Q,
    horizon: u64,
) -> Result<Certificate, MapError> {
    if family.is_empty() {
        return Err(MapError::Invalid("empty vector family".into()));
    }
    let mut outcomes = Vec::new();
    for v in family {
        let o = scan_vector(s, v, battery, delta, horizon, TupleMode::AllAssignments)?;
        let failed = matches!(o, ScanOutcome::Refuted(_));
        outcomes.push(o);
        if failed {
            break;
        }
    }
    let mut cert = certificate(
        s,
        PropertyTag::StrongMulti,
        delta,
        horizon,
        battery,
        family.iter().map(|v| v.entries().to_vec()).collect(),
        outcomes,
    );
    cert.notes.push(format!(
        "vector family of size {} stands in for the universal quantifier",
        family.len()
    ));
    Ok(cert)
}

/// Cofinite sensitivity evidence: every battery region's separation set must
/// contain the full tail `{H-T+1, …, H}`. Cofiniteness itself is not
/// decidable at a finite horizon; a witnessed verdict is tail evidence only.
pub fn cofinite_sensitivity(
    s: &NDSystem,
    battery: &Battery,
    delta: &Q,
    horizon: u64,
    tail: u64,
) -> Result<Certificate, MapError> {
    if tail == 0 || tail > horizon {
        return Err(MapError::Invalid(format!(
            "tail {tail} must lie in 1..={horizon}"
        )));
    }
    require_positive(delta)?;
    let diams = battery_diams(s, &battery.regions, horizon)?;
    let mut refuted = None;
    let mut witnesses = Vec::new();
    for (ri, d) in diams.iter().enumerate() {
        let mask = mask_from_diams(s.space(), d, delta);
        let tail_ok = (horizon - tail..horizon).all(|i| mask.get(i as usize));
        if !tail_ok {
            refuted = Some(RefutedTuple {
                vector: vec![1],
                regions: vec![battery.regions[ri].clone()],
            });
            break;
        }
        if witnesses.len() < 8 {
            let region = &battery.regions[ri];
            let entries = s.entries_up_to(horizon);
            let mut states = vec![RegionState::from_region(region)];
            for e in &entries {
                states.push(e.flow(states.last().unwrap())?);
            }
            let w = witness_pair(s.space(), &entries, &states, delta)?;
            witnesses.push(VectorWitness {
                vector: vec![1],
                regions: vec![region.clone()],
                common_n: horizon,
                pairs: vec![SlotWitness {
                    iterate: 1,
                    base_step: horizon,
                    u: w.u,
                    v: w.v,
                    achieved: w.achieved,
                }],
            });
        }
    }
    let verdict = if refuted.is_some() {
        Verdict::RefutedAtHorizon
    } else {
        Verdict::Witnessed
    };
    let mut cert = Certificate {
        schema_version: CERTIFICATE_SCHEMA_VERSION,
        system: s.id().to_string(),
        property: PropertyTag::CofiniteSensitive { tail },
        verdict,
        delta: delta.clone(),
        horizon,
        battery: BatteryDescriptor::of(battery),
        vectors: vec![vec![1]],
        witnesses,
        refuted,
        notes: vec![
            "tail membership is evidence; cofiniteness is undecidable at a finite horizon"
                .into(),
        ],
    };
    if cert.witnesses.len() == 8 && cert.battery.region_count > 8 {
        cert.notes
            .push("witness list truncated to the first 8 regions".into());
    }
    Ok(cert)
}

/// Sweeps `δ` over the dyadic grid `1/2, 1/4, …, 2^-levels` and reports each
/// verdict plus the largest witnessed threshold.
pub fn delta_sweep<F>(levels: u32, mut run: F) -> Result<DeltaSweep, MapError>
where
    F: FnMut(&Q) -> Result<Certificate, MapError>,
{
    let mut rows = Vec::new();
    let mut largest = None;
    for j in 1..=levels {
        let delta = pow2_neg(j);
        let cert = run(&delta)?;
        if cert.verdict == Verdict::Witnessed && largest.is_none() {
            largest = Some(delta.clone());
        }
        rows.push((delta, cert.verdict));
    }
    Ok(DeltaSweep { rows, largest_witnessed: largest })
}

#[derive(Debug, Clone)]
pub struct DeltaSweep {
    pub rows: Vec<(Q, Verdict)>,
    pub largest_witnessed: Option<Q>,
}

/// Transfer check between a periodic system and its collapsed autonomous
/// map `g = f_k ∘ … ∘ f_1`, both directions, on exact separation sets.
///
/// Direction A: every common time `n` of the collapsed system (vector `v`,
/// regions `U`) must reappear as common time of the original system at base
/// steps `k·n·v_i` (the composite identity `g^{n v_i} = f_1^{k n v_i}`).
/// Direction B: the expanded vector `(v_1, 2v_1, …, kv_1, v_2, …)` over the
/// regions repeated `k` times must only produce times the collapsed system
/// also has.
#[derive(Debug, Clone)]
pub struct BridgeReport {
    pub period: u64,
    pub vector: Vec<u64>,
    pub delta: Q,
    pub collapsed_horizon: u64,
    pub collapsed_common: Vec<u64>,
    pub expanded_common: Vec<u64>,
    pub failures: Vec<String>,
}

pub fn periodic_bridge_check(
    s: &NDSystem,
    v: &IterateVector,
    regions: &[OpenRegion],
    delta: &Q,
    horizon: u64,
) -> Result<BridgeReport, MapError> {
    let k = s.period().ok_or(MapError::NotPeriodic)?;
    if regions.len() != v.arity() {
        return Err(MapError::Invalid("one region per vector slot".into()));
    }
    require_positive(delta)?;
    let hg = (horizon / k).max(1);
    let g = s.periodic_collapse()?;
    let g_sys = NDSystem::constant(format!("{}-collapsed", s.id()), s.space().clone(), g)?;

    let mut failures = Vec::new();

    let max_v = v.max_entry();
    let g_diams: Vec<Vec<Q>> = regions
        .iter()
        .map(|r| diam_sequence(&g_sys, r, max_v * hg))
        .collect::<Result<_, _>>()?;
    let collapsed_common: Vec<u64> = (1..=hg)
        .filter(|n| {
            v.entries()
                .iter()
                .zip(&g_diams)
                .all(|(vi, d)| s.space().exceeds(&d[(vi * n - 1) as usize], delta))
        })
        .collect();

    let s_diams: Vec<Vec<Q>> = regions
        .iter()
        .map(|r| diam_sequence(s, r, k * max_v * hg))
        .collect::<Result<_, _>>()?;

    // direction A: n common for g => base steps k·n·v_i all separate
    for n in &collapsed_common {
        for (i, vi) in v.entries().iter().enumerate() {
            let step = k * n * vi;
            if !s.space().exceeds(&s_diams[i][(step - 1) as usize], delta) {
                failures.push(format!(
                    "collapsed time {n} did not transfer: slot {i} at base step {step}"
                ));
            }
        }
    }

    // direction B: expanded vector over duplicated regions
    let mut expanded = Vec::new();
    let mut expanded_region_idx = Vec::new();
    for (j, vj) in v.entries().iter().enumerate() {
        for i in 1..=k {
            expanded.push(i * vj);
            expanded_region_idx.push(j);
        }
    }
    let expanded_common: Vec<u64> = (1..=hg)
        .filter(|n| {
            expanded
                .iter()
                .zip(&expanded_region_idx)
                .all(|(vi, &j)| s.space().exceeds(&s_diams[j][(vi * n - 1) as usize], delta))
        })
        .collect();
    for n in &expanded_common {
        if !collapsed_common.contains(n) {
            failures.push(format!(
                "expanded-vector time {n} has no collapsed counterpart"
            ));
        }
    }

    Ok(BridgeReport {
        period: k,
        vector: v.entries().to_vec(),
        delta: delta.clone(),
        collapsed_horizon: hg,
        collapsed_common,
        expanded_common,
        failures,
    })
}

/// Inclusion check for product systems: the common separation times of each
/// factor (under its own vector) must be contained in the common separation
/// times of the product system on the product regions, with the same `δ`
/// (squared on the product side).
#[derive(Debug, Clone)]
pub struct InclusionReport {
    pub f_common: Vec<u64>,
    pub g_common: Vec<u64>,
    pub product_common: Vec<u64>,
    pub holds: bool,
    pub missing: Vec<u64>,
}

#[allow(clippy::too_many_arguments)]
pub fn product_nset_inclusion_check(
    s: &NDSystem,
    t: &NDSystem,
    v: &IterateVector,
    v_prime: &IterateVector,
    regions_u: &[OpenRegion],
    regions_u_prime: &[OpenRegion],
    delta: &Q,
    horizon: u64,
) -> Result<InclusionReport, MapError> {
    if v.arity() != v_prime.arity()
        || regions_u.len() != v.arity()
        || regions_u_prime.len() != v.arity()
    {
        return Err(MapError::Invalid("arities must match".into()));
    }
    require_positive(delta)?;
    let r = v.arity();
    let f_diams: Vec<Vec<Q>> = regions_u
        .iter()
        .map(|reg| diam_sequence(s, reg, v.max_entry() * horizon))
        .collect::<Result<_, _>>()?;
    let g_diams: Vec<Vec<Q>> = regions_u_prime
        .iter()
        .map(|reg| diam_sequence(t, reg, v_prime.max_entry() * horizon))
        .collect::<Result<_, _>>()?;

    let common = |diams: &[Vec<Q>], vec: &IterateVector, space: &Space| -> Vec<u64> {
        (1..=horizon)
            .filter(|n| {
                vec.entries()
                    .iter()
                    .zip(diams)
                    .all(|(vi, d)| space.exceeds(&d[(vi * n - 1) as usize], delta))
            })
            .collect()
    };
    let f_common = common(&f_diams, v, s.space());
    let g_common = common(&g_diams, v_prime, t.space());

    // product membership at time n: the squared factor diameters at steps
    // v_i·n and v'_i·n sum to more than δ², for every slot i
    let delta_sq = delta * delta;
    let product_common: Vec<u64> = (1..=horizon)
        .filter(|n| {
            (0..r).all(|i| {
                let df = &f_diams[i][(v.entries()[i] * n - 1) as usize];
                let dg = &g_diams[i][(v_prime.entries()[i] * n - 1) as usize];
                df * df + dg * dg > delta_sq
            })
        })
        .collect();

    let mut missing = Vec::new();
    for n in f_common.iter().chain(g_common.iter()) {
        if !product_common.contains(n) && !missing.contains(n) {
            missing.push(*n);
        }
    }
    Ok(InclusionReport {
        holds: missing.is_empty(),
        f_common,
        g_common,
        product_common,
        missing,
    })
}

/// Smallest common transit time and all transit times up to the horizon:
/// `k` qualifies when `f_1^{ik}(U_i)` meets `V_i` for every pair `i`
/// (1-based `i`).
#[derive(Debug, Clone)]
pub struct TransitivityReport {
    pub first: Option<u64>,
    pub hits: Vec<u64>,
    pub horizon: u64,
}

impl TransitivityReport {
    pub fn count(&self) -> usize {
        self.hits.len()
    }
}

pub fn multi_transitivity_witness(
    s: &NDSystem,
    pairs: &[(OpenRegion, OpenRegion)],
    horizon: u64,
) -> Result<TransitivityReport, MapError> {
    if pairs.is_empty() {
        return Err(MapError::Invalid("need at least one region pair".into()));
    }
    let mut histories = Vec::with_capacity(pairs.len());
    for (i, (u, v)) in pairs.iter().enumerate() {
        u.validate_in(s.space())?;
        v.validate_in(s.space())?;
        let steps = (i as u64 + 1) * horizon;
        let mut states = vec![RegionState::from_region(u)];
        for step in 1..=steps {
            states.push(s.entry(step).flow(states.last().unwrap())?);
        }
        histories.push(states);
    }
    let mut hits = Vec::new();
    for k in 1..=horizon {
        let ok = pairs
            .iter()
            .enumerate()
            .all(|(i, (_, v))| histories[i][((i as u64 + 1) * k) as usize].meets(v));
        if ok {
            hits.push(k);
        }
    }
    Ok(TransitivityReport { first: hits.first().copied(), hits, horizon })
}

/// Aggregated hypothesis screen for comparing a uniformly convergent system
/// with its limit map: per-entry surjectivity and feeble openness over a
/// prefix, plus the convergence table.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub checked_entries: u64,
    pub surjective_ok: bool,
    pub first_nonsurjective: Option<u64>,
    pub feebly_open_ok: bool,
    pub first_not_feebly_open: Option<u64>,
    pub convergence: ConvergenceReport,
    /// Entry runs far enough out coincide with the limit exactly (row max
    /// zero from `convergence.exact_from` onwards).
    pub convergence_exact_tail: bool,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.surjective_ok && self.feebly_open_ok && self.convergence_exact_tail
    }
}

pub fn limit_hypothesis_report(
    s: &NDSystem,
    limit: &Map,
    n_max: u64,
    k_max: u64,
) -> Result<HypothesisReport, MapError> {
    let mut first_nonsurjective = None;
    let mut first_not_feebly_open = None;
    for i in 1..=n_max {
        let e = s.entry(i);
        if first_nonsurjective.is_none() && !e.is_surjective_on(s.space())? {
            first_nonsurjective = Some(i);
        }
        if first_not_feebly_open.is_none() && !e.is_feebly_open() {
            first_not_feebly_open = Some(i);
        }
    }
    let convergence = s.convergence_report(limit, n_max, k_max)?;
    let convergence_exact_tail = convergence.exact_from.is_some();
    Ok(HypothesisReport {
        checked_entries: n_max,
        surjective_ok: first_nonsurjective.is_none(),
        first_nonsurjective,
        feebly_open_ok: first_not_feebly_open.is_none(),
        first_not_feebly_open,
        convergence,
        convergence_exact_tail,
    })
}

/// Scans a rational grid for periodic points (finite-horizon evidence).
/// Density of the periodic-point set is an assumption this survey can
/// support but never prove.
pub fn periodic_point_survey(
    s: &NDSystem,
    denominators: &[u64],
    max_period: u64,
    m_max: u64,
) -> Result<Vec<PeriodicityEvidence>, MapError> {
    let mut hits = Vec::new();
    for &den in denominators {
        for num in 0..den {
            let x = match s.space() {
                Space::Interval { lo, hi } => {
                    let t = crate::rational::q(num as i64, den as i64);
                    Point::Interval(lo + (hi - lo) * t)
                }
                Space::Circle => Point::Circle(crate::rational::q(num as i64, den as i64)),
                Space::Product(_) => {
                    return Err(MapError::Unsupported(
                        "periodic survey on scalar spaces only".into(),
                    ))
                }
            };
            for period in 1..=max_period {
                let ev = s.is_periodic_point(&x, period, m_max)?;
                if ev.holds {
                    hits.push(ev);
                    break;
                }
            }
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nds::{constant_pl_system, Rule};
    use crate::plmap::{tent, PLMap};
    use crate::rational::q;
    use std::sync::Arc;

    fn tent_sys() -> NDSystem {
        constant_pl_system("tent", tent()).unwrap()
    }

    fn identity_sys() -> NDSystem {
        constant_pl_system("identity", PLMap::identity(q_int(0), q_int(1))).unwrap()
    }

    fn alternating_circle() -> NDSystem {
        NDSystem::new(
            "circle-blocks",
            Space::Circle,
            Rule::Formula(Arc::new(|i| {
                let n = ((i + 1) / 2) as i64;
                let mult = if i % 2 == 1 { q_int(n) } else { q(1, n) };
                Map::Circle(crate::circle::CircleMap::new(mult).unwrap())
            })),
        )
        .unwrap()
    }

    #[test]
    fn tent_nset_three_to_ten() {
        let s = tent_sys();
        let r = OpenRegion::interval(q(3, 10), q(2, 5)).unwrap();
        let ns = n_set(&s, &r, &q(1, 2), 10).unwrap();
        assert_eq!(ns.member_times(), (3..=10).collect::<Vec<_>>());
        for m in &ns.members {
            assert!(m.witness.achieved > q(1, 2));
            assert!(r.contains(&m.witness.u) && r.contains(&m.witness.v));
        }
    }

    #[test]
    fn identity_nset_empty_for_large_delta() {
        let s = identity_sys();
        let r = OpenRegion::interval(q(3, 10), q(2, 5)).unwrap();
        let ns = n_set(&s, &r, &q(1, 2), 10).unwrap();
        assert!(ns.members.is_empty());
        // but every time qualifies when delta is below the region diameter
        let ns2 = n_set(&s, &r, &q(1, 20), 10).unwrap();
        assert_eq!(ns2.member_times(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn circle_blocks_nset_odd_steps() {
        let s = alternating_circle();
        let r = OpenRegion::arc(&q_int(0), q(1, 8)).unwrap();
        let ns = n_set(&s, &r, &q(1, 4), 12).unwrap();
        assert_eq!(ns.member_times(), vec![5, 7, 9, 11]);
        for m in &ns.members {
            assert!(m.witness.achieved > q(1, 4));
        }
    }

    #[test]
    fn vector_multi_explicit_tent() {
        let s = tent_sys();
        let v = IterateVector::new(vec![1, 2]).unwrap();
        let regions = vec![
            OpenRegion::interval(q(3, 10), q(2, 5)).unwrap(),
            OpenRegion::interval(q(1, 10), q(1, 5)).unwrap(),
        ];
        let cert = vector_multi_sensitivity(&s, &v, &regions, &q(1, 2), 10).unwrap();
        assert_eq!(cert.verdict, Verdict::Witnessed);
        let w = &cert.witnesses[0];
        assert_eq!(w.common_n, 3);
        for p in &w.pairs {
            assert!(p.achieved > q(1, 2));
        }
        // arity mismatch is a config error
        assert!(vector_multi_sensitivity(&s, &v, &regions[..1], &q(1, 2), 10).is_err());
    }

    #[test]
    fn circle_even_iterate_refuted_every_delta() {
        let s = alternating_circle();
        for j in 1..=8 {
            let delta = pow2_neg(j);
            let battery = default_battery(&Space::Circle, 5, &delta, None).unwrap();
            let cert = n_sensitivity(&s, 2, &battery, &delta, 24).unwrap();
            assert_eq!(cert.verdict, Verdict::RefutedAtHorizon, "delta = {delta}");
            assert!(cert.refuted.is_some());
        }
    }

    #[test]
    fn circle_blocks_multi_sensitive_but_not_ramp2() {
        let s = alternating_circle();
        let delta = q(1, 8);
        let battery = default_battery(&Space::Circle, 4, &delta, None).unwrap();
        let multi = multi_sensitivity(&s, 2, &battery, &delta, 24).unwrap();
        assert_eq!(multi.verdict, Verdict::Witnessed);
        let ramp = n_sensitivity(&s, 2, &battery, &delta, 24).unwrap();
        assert_eq!(ramp.verdict, Verdict::RefutedAtHorizon);
    }

    #[test]
    fn tent_n_sensitive_battery() {
        let s = tent_sys();
        let delta = q(2, 5);
        let battery = default_battery(s.space(), 4, &delta, None).unwrap();
        let cert = n_sensitivity(&s, 3, &battery, &delta, 32).unwrap();
        assert_eq!(cert.verdict, Verdict::Witnessed);
        let c1 = sensitivity(&s, &battery, &delta, 32).unwrap();
        assert_eq!(c1.verdict, Verdict::Witnessed);
    }

    #[test]
    fn strong_multi_family_tent() {
        let s = tent_sys();
        let delta = q(2, 5);
        let battery = default_battery(s.space(), 3, &delta, None).unwrap();
        let family = vec![
            IterateVector::new(vec![1]).unwrap(),
            IterateVector::new(vec![2, 3]).unwrap(),
            IterateVector::new(vec![1, 1, 4]).unwrap(),
        ];
        let cert = strong_multi_sensitivity(&s, &family, &battery, &delta, 64).unwrap();
        assert_eq!(cert.verdict, Verdict::Witnessed);
        assert_eq!(cert.witnesses.len(), 3);
    }

    #[test]
    fn cofinite_tent_witnessed_identity_refuted() {
        let s = tent_sys();
        let delta = q(1, 2);
        let battery = default_battery(s.space(), 3, &delta, None).unwrap();
        let cert = cofinite_sensitivity(&s, &battery, &delta, 32, 16).unwrap();
        assert_eq!(cert.verdict, Verdict::Witnessed);
        let id = identity_sys();
        let cert2 = cofinite_sensitivity(&id, &battery, &delta, 32, 16).unwrap();
        assert_eq!(cert2.verdict, Verdict::RefutedAtHorizon);
        // circle blocks: even steps never separate, so tails always fail
        let h = alternating_circle();
        let hb = default_battery(&Space::Circle, 3, &q(1, 8), None).unwrap();
        let cert3 = cofinite_sensitivity(&h, &hb, &q(1, 8), 24, 8).unwrap();
        assert_eq!(cert3.verdict, Verdict::RefutedAtHorizon);
    }

    #[test]
    fn bridge_check_two_periodic_tent() {
        let p = NDSystem::new(
            "tent-2p",
            Space::unit_interval(),
            Rule::Periodic(vec![Map::Pl(tent()), Map::Pl(tent())]),
        )
        .unwrap();
        let v = IterateVector::new(vec![1, 2]).unwrap();
        let regions = vec![
            OpenRegion::interval(q(1, 8), q(1, 4)).unwrap(),
            OpenRegion::interval(q(1, 2), q(5, 8)).unwrap(),
        ];
        let rep = periodic_bridge_check(&p, &v, &regions, &q(1, 4), 32).unwrap();
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert!(!rep.collapsed_common.is_empty());
    }

    #[test]
    fn product_inclusion_tent_pair() {
        let s = tent_sys();
        let t = tent_sys();
        let v = IterateVector::new(vec![1, 2]).unwrap();
        let regions: Vec<OpenRegion> = vec![
            OpenRegion::interval(q(3, 10), q(2, 5)).unwrap(),
            OpenRegion::interval(q(1, 10), q(1, 5)).unwrap(),
        ];
        let rep =
            product_nset_inclusion_check(&s, &t, &v, &v, &regions, &regions, &q(1, 2), 24)
                .unwrap();
        assert!(rep.holds, "missing: {:?}", rep.missing);
        assert!(!rep.f_common.is_empty());
    }

    #[test]
    fn product_inclusion_identity_factor() {
        // one sensitive factor suffices for the product intersection
        let s = tent_sys();
        let t = identity_sys();
        let v = IterateVector::new(vec![1]).unwrap();
        let u = vec![OpenRegion::interval(q(3, 10), q(2, 5)).unwrap()];
        let rep = product_nset_inclusion_check(&s, &t, &v, &v, &u, &u, &q(1, 2), 16).unwrap();
        assert!(rep.holds);
        assert!(rep.g_common.is_empty());
        for n in &rep.f_common {
            assert!(rep.product_common.contains(n));
        }
    }

    #[test]
    fn transitivity_tent_pairs() {
        let s = tent_sys();
        let pairs = vec![
            (
                OpenRegion::interval(q(1, 10), q(1, 5)).unwrap(),
                OpenRegion::interval(q(4, 5), q(9, 10)).unwrap(),
            ),
            (
                OpenRegion::interval(q(2, 5), q(1, 2)).unwrap(),
                OpenRegion::interval(q_int(0), q(1, 10)).unwrap(),
            ),
        ];
        let rep = multi_transitivity_witness(&s, &pairs, 64).unwrap();
        assert_eq!(rep.first, Some(3));
        assert!(rep.count() >= 20);
        // disjoint pair on the identity system: refuted at every horizon
        let id = identity_sys();
        let rep2 = multi_transitivity_witness(
            &id,
            &[(
                OpenRegion::interval(q(1, 10), q(1, 5)).unwrap(),
                OpenRegion::interval(q(4, 5), q(9, 10)).unwrap(),
            )],
            32,
        )
        .unwrap();
        assert_eq!(rep2.first, None);
        // same region on the identity: k = 1
        let rep3 = multi_transitivity_witness(
            &id,
            &[(
                OpenRegion::interval(q(1, 10), q(1, 5)).unwrap(),
                OpenRegion::interval(q(1, 10), q(1, 5)).unwrap(),
            )],
            8,
        )
        .unwrap();
        assert_eq!(rep3.first, Some(1));
    }

    #[test]
    fn hypothesis_report_tent() {
        let s = tent_sys();
        let rep = limit_hypothesis_report(&s, &Map::Pl(tent()), 6, 6).unwrap();
        assert!(rep.all_pass());
    }

    #[test]
    fn monotonicity_in_delta_and_region() {
        let s = tent_sys();
        let small = OpenRegion::interval(q(3, 10), q(7, 20)).unwrap();
        let big = OpenRegion::interval(q(3, 10), q(2, 5)).unwrap();
        let m_small = n_set(&s, &small, &q(1, 2), 12).unwrap().member_times();
        let m_big = n_set(&s, &big, &q(1, 2), 12).unwrap().member_times();
        for n in &m_small {
            assert!(m_big.contains(n), "region monotonicity at {n}");
        }
        let m_hi = n_set(&s, &big, &q(3, 4), 12).unwrap().member_times();
        for n in &m_hi {
            assert!(m_big.contains(n), "delta monotonicity at {n}");
        }
    }

    #[test]
    fn iterate_reindexing() {
        let s = tent_sys();
        let r = OpenRegion::interval(q(3, 10), q(2, 5)).unwrap();
        for k in 1..=3u64 {
            let it = s.kth_iterate(k).unwrap();
            let it_members = n_set(&it, &r, &q(1, 2), 6).unwrap().member_times();
            let base_diams = diam_sequence(&s, &r, 6 * k).unwrap();
            let expect: Vec<u64> = (1..=6)
                .filter(|n| base_diams[(k * n - 1) as usize] > q(1, 2))
                .collect();
            assert_eq!(it_members, expect, "k = {k}");
        }
    }

    #[test]
    fn battery_has_probes_only_when_needed() {
        let space = Space::unit_interval();
        let coarse = default_battery(&space, 3, &q(1, 2), None).unwrap();
        assert!(coarse.probe_len.is_none());
        assert_eq!(coarse.regions.len(), 8);
        let fine = default_battery(&space, 3, &q(1, 100), None).unwrap();
        assert!(fine.probe_len.is_some());
        assert_eq!(fine.regions.len(), 16);
        let p = fine.probe_len.unwrap();
        assert!(p <= q(1, 200));
    }

    #[test]
    fn windowed_battery_stays_inside() {
        let space = Space::unit_interval();
        let w = OpenRegion::interval(q_int(0), q(1, 2)).unwrap();
        let b = default_battery(&space, 3, &q(1, 4), Some(&w)).unwrap();
        for r in &b.regions {
            match r {
                OpenRegion::Interval { a, b } => {
                    assert!(a >= &q_int(0) && b <= &q(1, 2));
                }
                _ => panic!(),
            }
        }
    }

    #[test]
    fn delta_sweep_tent() {
        let s = tent_sys();
        let sweep = delta_sweep(6, |delta| {
            let battery = default_battery(s.space(), 3, delta, None)?;
            sensitivity(&s, &battery, delta, 32)
        })
        .unwrap();
        assert_eq!(sweep.largest_witnessed, Some(q(1, 2)));
    }

    #[test]
    fn periodic_survey_finds_tent_points() {
        let s = tent_sys();
        let hits = periodic_point_survey(&s, &[3, 5], 2, 6).unwrap();
        // 2/3 is fixed; 2/5 <-> 4/5 have period 2
        assert!(hits.iter().any(|h| h.point == Point::Interval(q(2, 3))));
        assert!(hits.iter().any(|h| h.point == Point::Interval(q(2, 5))));
    }
}
