//! Non-autonomous systems: an indexed sequence of self-maps of one space,
//! with partial compositions `f_i^n`, iterate systems, periodic collapse,
//! products, orbits, and convergence reports.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::Zero;

use crate::error::MapError;
use crate::hybrid::default_tolerance;
use crate::map::{apply_entry_sequence, Map};
use crate::metric::{Point, Space};
use crate::plmap::PLMap;
use crate::rational::Q;

/// How the entry sequence is specified.
#[derive(Clone)]
pub enum Rule {
    /// `rule(j + k) = rule(j)`: the block repeats forever.
    Periodic(Vec<Map>),
    /// Finitely many leading entries, then a constant tail.
    EventuallyConstant { head: Vec<Map>, tail: Map },
    /// Arbitrary index formula (1-based).
    Formula(Arc<dyn Fn(u64) -> Map + Send + Sync>),
}

impl Rule {
    fn entry(&self, i: u64) -> Map {
        assert!(i >= 1, "entries are 1-based");
        match self {
            Rule::Periodic(block) => block[((i - 1) as usize) % block.len()].clone(),
            Rule::EventuallyConstant { head, tail } => head
                .get((i - 1) as usize)
                .cloned()
                .unwrap_or_else(|| tail.clone()),
            Rule::Formula(f) => f(i),
        }
    }

    fn kind_tag(&self) -> &'static str {
        match self {
            Rule::Periodic(_) => "periodic",
            Rule::EventuallyConstant { .. } => "explicit",
            Rule::Formula(_) => "formula",
        }
    }
}

struct Inner {
    id: String,
    space: Space,
    rule: Rule,
    /// Memoized prefix compositions `f_1^n` at power-of-two `n`.
    prefix_cache: Mutex<HashMap<u64, Map>>,
}

/// A non-autonomous system; cheap to clone (shared interior).
#[derive(Clone)]
pub struct NDSystem {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for NDSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NDSystem")
            .field("id", &self.inner.id)
            .field("space", &self.inner.space)
            .field("kind", &self.inner.rule.kind_tag())
            .finish()
    }
}

/// An orbit segment `[x, f_1(x), f_1²(x), …, f_1ⁿ(x)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub base: Point,
    pub points: Vec<Point>,
}

/// One entry of a convergence table: a certified range that collapses to a
/// point for exact computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistBound {
    pub lower: Q,
    pub upper: Q,
}

impl DistBound {
    pub fn exact(v: Q) -> DistBound {
        DistBound { lower: v.clone(), upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_zero()
    }
}

/// Sup-distance table `D(f_n^k, f^k)` for `n <= n_max`, `k <= k_max`, plus
/// per-row maxima.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Smallest `n` in range from which every row max is exactly zero, when
    /// such an index exists.
    pub exact_from: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: u64,
    pub entries: Vec<DistBound>,
    pub row_max: DistBound,
}

/// Evidence record for a finite-horizon periodic-point check.
#[derive(Debug, Clone)]
pub struct PeriodicityEvidence {
    pub point: Point,
    pub candidate_period: u64,
    pub horizon: u64,
    pub holds: bool,
    pub first_failure: Option<u64>,
}

impl NDSystem {
    pub fn new(id: impl Into<String>, space: Space, rule: Rule) -> Result<NDSystem, MapError> {
        let sys = NDSystem {
            inner: Arc::new(Inner {
                id: id.into(),
                space,
                rule,
                prefix_cache: Mutex::new(HashMap::new()),
            }),
        };
        // stored entries are validated exactly; formula rules are spot
        // checked on a prefix
        match &sys.inner.rule {
            Rule::Periodic(block) => {
                for m in block {
                    sys.check_entry(m)?;
                }
            }
            Rule::EventuallyConstant { head, tail } => {
                for m in head {
                    sys.check_entry(m)?;
                }
                sys.check_entry(tail)?;
            }
            Rule::Formula(_) => {
                for i in 1..=4 {
                    let m = sys.inner.rule.entry(i);
                    sys.check_entry(&m)?;
                }
            }
        }
        Ok(sys)
    }

    fn check_entry(&self, m: &Map) -> Result<(), MapError> {
        if !m.is_self_map_of(&self.inner.space) {
            return Err(MapError::KindMismatch(format!(
                "entry is not a self-map of {:?}",
                self.inner.space
            )));
        }
        Ok(())
    }

    /// Constant (autonomous) system.
    pub fn constant(id: impl Into<String>, space: Space, f: Map) -> Result<NDSystem, MapError> {
        NDSystem::new(id, space, Rule::Periodic(vec![f]))
    }

    pub fn id(&self) -> &str {
        &self.inner.id
    }

    pub fn space(&self) -> &Space {
        &self.inner.space
    }

    pub fn kind_tag(&self) -> &'static str {
        self.inner.rule.kind_tag()
    }

    /// Period of the rule, if it is declared periodic.
    pub fn period(&self) -> Option<u64> {
        match &self.inner.rule {
            Rule::Periodic(block) => Some(block.len() as u64),
            _ => None,
        }
    }

    /// The `i`-th entry map, 1-based.
    pub fn entry(&self, i: u64) -> Map {
        self.inner.rule.entry(i)
    }

    /// Structural partial composition `f_i^n = f_{i+n-1} ∘ … ∘ f_i`
    /// (`n = 0` is the identity). Prefix compositions (`i = 1`) are memoized
    /// at power-of-two lengths and extended entry by entry from the largest
    /// cached prefix; everything else composes directly. Subject to the
    /// breakpoint budget of [`crate::plmap::MAX_BREAKPOINTS`].
    pub fn partial_composition(&self, i: u64, n: u64) -> Result<Map, MapError> {
        assert!(i >= 1);
        if n == 0 {
            return Ok(Map::identity_for(&self.inner.space));
        }
        if i == 1 {
            return self.prefix_composition(n);
        }
        let mut acc = self.entry(i);
        for j in i + 1..i + n {
            acc = acc.then(&self.entry(j))?;
        }
        Ok(acc)
    }

    fn prefix_composition(&self, n: u64) -> Result<Map, MapError> {
        let mut base: Option<(u64, Map)> = None;
        {
            let cache = self.inner.prefix_cache.lock().unwrap();
            let mut p = 1u64;
            loop {
                if p > n {
                    break;
                }
                if let Some(m) = cache.get(&p) {
                    base = Some((p, m.clone()));
                }
                match p.checked_mul(2) {
                    Some(next) => p = next,
                    None => break,
                }
            }
        }
        let (mut at, mut acc) = match base {
            Some((p, m)) => (p, m),
            None => (1, self.entry(1)),
        };
        while at < n {
            at += 1;
            acc = acc.then(&self.entry(at))?;
            if at.is_power_of_two() {
                self.inner
                    .prefix_cache
                    .lock()
                    .unwrap()
                    .entry(at)
                    .or_insert_with(|| acc.clone());
            }
        }
        Ok(acc)
    }

    /// Entry maps `f_1, …, f_n` as a vector (for pointwise sequencing).
    pub fn entries_up_to(&self, n: u64) -> Vec<Map> {
        (1..=n).map(|i| self.entry(i)).collect()
    }

    /// The `k`-th iterate system: entry `n` is `f_{k(n-1)+1}^k`, so its
    /// `n`-step prefix composition equals `f_1^{kn}`.
    pub fn kth_iterate(&self, k: u64) -> Result<NDSystem, MapError> {
        assert!(k >= 1);
        if k == 1 {
            return Ok(self.clone());
        }
        let base = self.clone();
        NDSystem::new(
            format!("{}^[{}]", self.id(), k),
            self.inner.space.clone(),
            Rule::Formula(Arc::new(move |n| {
                base.partial_composition(k * (n - 1) + 1, k)
                    .expect("iterate entry composition")
            })),
        )
    }

    /// For a `k`-periodic system, the collapsed autonomous map
    /// `g = f_k ∘ … ∘ f_1`.
    pub fn periodic_collapse(&self) -> Result<Map, MapError> {
        let k = self.period().ok_or(MapError::NotPeriodic)?;
        self.partial_composition(1, k)
    }

    /// The product system: entry `n` is `rule_s(n) × rule_t(n)` on the
    /// product space.
    pub fn product(&self, other: &NDSystem) -> Result<NDSystem, MapError> {
        let space = Space::product(vec![self.inner.space.clone(), other.inner.space.clone()])?;
        let a = self.clone();
        let b = other.clone();
        NDSystem::new(
            format!("{}x{}", self.id(), other.id()),
            space,
            Rule::Formula(Arc::new(move |n| {
                Map::Product(vec![a.entry(n), b.entry(n)])
            })),
        )
    }

    /// Orbit segment of length `n` (so `n + 1` points). Pointwise and exact;
    /// point `m` equals the composite `f_1^m` applied to `x` (circle
    /// coordinates fold on the cover so composite and pointwise semantics
    /// agree).
    pub fn orbit(&self, x: &Point, n: u64) -> Result<Orbit, MapError> {
        if !self.inner.space.contains(x) {
            return Err(MapError::KindMismatch(format!("{x:?} not in space")));
        }
        let mut points = Vec::with_capacity(n as usize + 1);
        points.push(x.clone());
        let entries = self.entries_up_to(n);
        for m in 1..=n as usize {
            points.push(apply_entry_sequence(&entries[..m], x)?);
        }
        Ok(Orbit { base: x.clone(), points })
    }

    /// Finite-horizon periodic-point check: `f_1^{mN}(x) == x` exactly for
    /// every `1 <= m <= m_max`. Necessary evidence for periodicity, not a
    /// proof over all of ℕ.
    pub fn is_periodic_point(
        &self,
        x: &Point,
        n_candidate: u64,
        m_max: u64,
    ) -> Result<PeriodicityEvidence, MapError> {
        assert!(n_candidate >= 1);
        if !self.inner.space.contains(x) {
            return Err(MapError::KindMismatch(format!("{x:?} not in space")));
        }
        let entries = self.entries_up_to(n_candidate * m_max);
        let mut first_failure = None;
        for m in 1..=m_max {
            let y = apply_entry_sequence(&entries[..(n_candidate * m) as usize], x)?;
            if &y != x {
                first_failure = Some(m);
                break;
            }
        }
        Ok(PeriodicityEvidence {
            point: x.clone(),
            candidate_period: n_candidate,
            horizon: m_max,
            holds: first_failure.is_none(),
            first_failure,
        })
    }

    /// Table of sup-distances `D(f_n^k, f^k)` for `n <= n_max`,
    /// `k <= k_max`, against powers of a limit map. `f_n^k` is the
    /// structural composition of `k` entries starting at index `n`. Entries
    /// whose composing run equals the limit map structurally short-circuit
    /// to zero; quadratic-piece compositions report a certified enclosure at
    /// the default tolerance instead of an exact value.
    pub fn convergence_report(
        &self,
        limit: &Map,
        n_max: u64,
        k_max: u64,
    ) -> Result<ConvergenceReport, MapError> {
        let mut rows = Vec::new();
        let mut powers: Vec<Map> = vec![limit.clone()];
        let mut power = |k: u64, powers: &mut Vec<Map>| -> Result<Map, MapError> {
            while powers.len() < k as usize {
                let next = powers.last().unwrap().then(limit)?;
                powers.push(next);
            }
            Ok(powers[k as usize - 1].clone())
        };
        for n in 1..=n_max {
            let mut entries_row = Vec::new();
            for k in 1..=k_max {
                let mut run_equals_limit = true;
                for j in n..n + k {
                    match self.entry(j).structurally_eq(limit) {
                        Ok(true) => {}
                        Ok(false) => {
                            run_equals_limit = false;
                            break;
                        }
                        Err(MapError::StructuralUnavailable(_)) => {
                            run_equals_limit = false;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if run_equals_limit {
                    entries_row.push(DistBound::exact(Q::zero()));
                    continue;
                }
                let fnk = self.partial_composition(n, k)?;
                let fk = power(k, &mut powers)?;
                entries_row.push(sup_distance_bound(&fnk, &fk)?);
            }
            let row_max = entries_row
                .iter()
                .cloned()
                .reduce(|a, b| DistBound {
                    lower: a.lower.max(b.lower),
                    upper: a.upper.max(b.upper),
                })
                .expect("k_max >= 1");
            rows.push(ConvergenceRow { n, entries: entries_row, row_max });
        }
        let mut exact_from = None;
        for row in rows.iter().rev() {
            if row.row_max.is_zero() {
                exact_from = Some(row.n);
            } else {
                break;
            }
        }
        Ok(ConvergenceReport { rows, exact_from })
    }
}

fn sup_distance_bound(a: &Map, b: &Map) -> Result<DistBound, MapError> {
    match (a, b) {
        (Map::Pl(f), Map::Pl(g)) => Ok(DistBound::exact(f.sup_distance(g)?)),
        (
            Map::Pl(_) | Map::Hybrid(_),
            Map::Pl(_) | Map::Hybrid(_),
        ) => {
            let chain = |m: &Map| match m {
                Map::Pl(f) => crate::hybrid::HybridChain::from_plmap(f),
                Map::Hybrid(c) => c.clone(),
                _ => unreachable!(),
            };
            let tol = default_tolerance();
            let (lower, upper) = chain(a).sup_distance_enclosure(&chain(b), &tol)?;
            Ok(DistBound { lower, upper })
        }
        _ => Err(MapError::Unsupported(
            "sup distance is defined for interval maps".into(),
        )),
    }
}

/// Builds a constant system from a PL self-map of its own domain.
pub fn constant_pl_system(id: &str, f: PLMap) -> Result<NDSystem, MapError> {
    let (lo, hi) = f.domain();
    let space = Space::Interval { lo: lo.clone(), hi: hi.clone() };
    NDSystem::constant(id, space, Map::Pl(f))
}
