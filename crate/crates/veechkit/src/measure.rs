use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use rayon::prelude::*;

use crate::diagram::RauzyClass;
use crate::error::{Error, Result};
use crate::path::Path;
use crate::perm::Kind;

/// A strictly positive rational weight vector over the alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    q: Vec<BigRational>,
}

impl WeightVector {
    pub fn new(q: Vec<BigRational>) -> Result<Self> {
        if q.is_empty() || !q.iter().all(|x| x.is_positive()) {
            return Err(Error::OutOfRange("weights must be strictly positive".into()));
        }
        Ok(WeightVector { q })
    }

    pub fn uniform(d: usize) -> Self {
        WeightVector {
            q: vec![BigRational::one(); d],
        }
    }

    pub fn from_ints(q: &[i64]) -> Result<Self> {
        Self::new(q.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.q
    }

    /// Clear denominators and common factors.  Every measure computed here
    /// is invariant under scaling `q`, so enumeration always runs on this
    /// primitive integer form.
    pub fn scaled_integer(&self) -> Vec<BigInt> {
        let lcm = self
            .q
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut ints: Vec<BigInt> = self
            .q
            .iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if gcd > BigInt::one() {
            for x in &mut ints {
                *x = &*x / &gcd;
            }
        }
        ints
    }

    /// The same, narrowed to `u64` when it fits.
    pub fn scaled_u64(&self) -> Result<Vec<u64>> {
        use num::ToPrimitive;
        self.scaled_integer()
            .iter()
            .map(|x| {
                x.to_u64()
                    .ok_or_else(|| Error::OutOfRange("weight vector too large for enumeration".into()))
            })
            .collect()
    }
}

/// Exact `(N, M, m)` statistics of a weight vector over a letter subset:
/// product, max, min.
pub fn weight_stats(
    q: &WeightVector,
    subset: &[usize],
) -> Result<(BigRational, BigRational, BigRational)> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut n = BigRational::one();
    let mut max: Option<BigRational> = None;
    let mut min: Option<BigRational> = None;
    for &i in subset {
        let v = &q.as_slice()[i];
        n *= v;
        if max.as_ref().map_or(true, |m| v > m) {
            max = Some(v.clone());
        }
        if min.as_ref().map_or(true, |m| v < m) {
            min = Some(v.clone());
        }
    }
    Ok((n, max.unwrap(), min.unwrap()))
}

/// `Leb(Λ_q) = 1 / (d! N(q))`.
pub fn leb_lambda(q: &WeightVector) -> BigRational {
    let d = q.len();
    let mut fact = BigInt::one();
    for k in 2..=d {
        fact *= BigInt::from(k);
    }
    let (n, _, _) = weight_stats(q, &(0..d).collect::<Vec<_>>()).expect("non-empty");
    BigRational::from_integer(fact).recip() / n
}

/// Exact relative cylinder measure `N(q) / N(B_γ q)`.
pub fn cylinder_measure(path: &Path, q: &WeightVector) -> Result<BigRational> {
    use crate::cocycle::CocycleMatrix;
    let m = CocycleMatrix::path_matrix(path)?;
    let image = m.apply_rational(q.as_slice());
    let mut num = BigRational::one();
    let mut den = BigRational::one();
    for (a, b) in q.as_slice().iter().zip(&image) {
        num *= a;
        den *= b;
    }
    Ok(num / den)
}

/// Per-node verdict for the measure enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Count this cylinder into the family and stop.
    Emit,
    /// This branch can never satisfy the event.
    Prune,
    /// Keep walking down both arrows.
    Descend,
    /// Keep walking, but only along the allowed arrows; the blocked
    /// subtrees are outside the ambient family, not budget losses.
    DescendFiltered { top: bool, bottom: bool },
}

/// Node view handed to deciders: current weights are `B_γ q` for the path
/// `γ` walked so far.
pub struct EnumNode<'a> {
    pub depth: usize,
    pub vertex: usize,
    pub weights: &'a [u64],
}

/// Budget for the enumeration walk.
#[derive(Debug, Clone, Copy)]
pub struct EnumBudget {
    pub max_depth: usize,
    pub max_nodes: u64,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            max_depth: 4096,
            max_nodes: u64::MAX,
        }
    }
}

impl EnumBudget {
    pub fn depth(max_depth: usize) -> Self {
        EnumBudget {
            max_depth,
            ..Default::default()
        }
    }
}

/// Outcome of a family-measure enumeration.  `measure` sums the emitted
/// minimal cylinders; when the walk was cut by the budget (or by integer
/// overflow) the unresolved frontier mass is accounted in `open_mass`, so
/// the true measure lies in `[measure, measure + open_mass]` exactly.
#[derive(Debug, Clone)]
pub struct FamilyMeasure {
    pub measure: BigRational,
    pub open_mass: BigRational,
    pub emitted: u64,
    pub nodes: u64,
    pub exhausted: bool,
}

impl FamilyMeasure {
    pub fn upper(&self) -> BigRational {
        &self.measure + &self.open_mass
    }

    fn merge(mut self, other: FamilyMeasure) -> FamilyMeasure {
        self.measure += other.measure;
        self.open_mass += other.open_mass;
        self.emitted += other.emitted;
        self.nodes += other.nodes;
        self.exhausted &= other.exhausted;
        self
    }
}

fn cylinder_mass(q0: &[u64], weights: &[u64]) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&a, &b) in q0.iter().zip(weights) {
        num *= BigInt::from(a);
        den *= BigInt::from(b);
    }
    BigRational::new(num, den)
}

struct Walk<'a, F> {
    class: &'a RauzyClass,
    q0: &'a [u64],
    budget: EnumBudget,
    decide: &'a F,
    out: FamilyMeasure,
}

impl<'a, F: Fn(&EnumNode) -> Decision> Walk<'a, F> {
    fn go(&mut self, vertex: usize, weights: &mut Vec<u64>, depth: usize) {
        self.out.nodes += 1;
        let decision = (self.decide)(&EnumNode {
            depth,
            vertex,
            weights,
        });
        let (top, bottom) = match decision {
            Decision::Emit => {
                self.out.measure += cylinder_mass(self.q0, weights);
                self.out.emitted += 1;
                return;
            }
            Decision::Prune => return,
            Decision::Descend => (true, true),
            Decision::DescendFiltered { top, bottom } => (top, bottom),
        };
        if depth >= self.budget.max_depth || self.out.nodes >= self.budget.max_nodes {
            self.out.open_mass += cylinder_mass(self.q0, weights);
            self.out.exhausted = false;
            return;
        }
        for (kind, allowed) in [(Kind::Top, top), (Kind::Bottom, bottom)] {
            if !allowed {
                continue;
            }
            let arrow = self.class.arrow(vertex, kind);
            let (w, l) = (arrow.winner as usize, arrow.loser as usize);
            match weights[l].checked_add(weights[w]) {
                Some(next) => {
                    let saved = weights[l];
                    weights[l] = next;
                    self.go(arrow.end, weights, depth + 1);
                    weights[l] = saved;
                }
                None => {
                    // overflow: account the child cylinder as unresolved
                    let saved = weights[l];
                    // mass of the child cylinder needs the true (big) value
                    let mut den = BigInt::one();
                    for (i, &x) in weights.iter().enumerate() {
                        if i == l {
                            den *= BigInt::from(saved) + BigInt::from(weights[w]);
                        } else {
                            den *= BigInt::from(x);
                        }
                    }
                    let mut num = BigInt::one();
                    for &a in self.q0 {
                        num *= BigInt::from(a);
                    }
                    self.out.open_mass += BigRational::new(num, den);
                    self.out.exhausted = false;
                }
            }
        }
    }
}

/// Run the enumeration from `start` with `u64` weights.
pub fn enumerate_measure<F>(
    class: &RauzyClass,
    start: usize,
    q0: &[u64],
    budget: EnumBudget,
    decide: F,
) -> FamilyMeasure
where
    F: Fn(&EnumNode) -> Decision,
{
    let mut walk = Walk {
        class,
        q0,
        budget,
        decide: &decide,
        out: FamilyMeasure {
            measure: BigRational::zero(),
            open_mass: BigRational::zero(),
            emitted: 0,
            nodes: 0,
            exhausted: true,
        },
    };
    let mut weights = q0.to_vec();
    walk.go(start, &mut weights, 0);
    walk.out
}

/// Parallel variant: the walk splits at `split_depth` and the subtrees run
/// on the thread pool.  Exact rational sums merge associatively, so the
/// result does not depend on the number of threads.
pub fn enumerate_measure_par<F>(
    class: &RauzyClass,
    start: usize,
    q0: &[u64],
    budget: EnumBudget,
    split_depth: usize,
    decide: F,
) -> FamilyMeasure
where
    F: Fn(&EnumNode) -> Decision + Sync,
{
    // collect the frontier at split_depth, honoring verdicts above it
    struct Frontier {
        vertex: usize,
        weights: Vec<u64>,
    }
    let mut frontier: Vec<Frontier> = Vec::new();
    let mut top = FamilyMeasure {
        measure: BigRational::zero(),
        open_mass: BigRational::zero(),
        emitted: 0,
        nodes: 0,
        exhausted: true,
    };
    {
        let mut weights = q0.to_vec();
        fn collect<F: Fn(&EnumNode) -> Decision>(
            class: &RauzyClass,
            q0: &[u64],
            decide: &F,
            vertex: usize,
            weights: &mut Vec<u64>,
            depth: usize,
            split: usize,
            out: &mut FamilyMeasure,
            frontier: &mut Vec<Frontier>,
        ) {
            if depth == split {
                frontier.push(Frontier {
                    vertex,
                    weights: weights.clone(),
                });
                return;
            }
            out.nodes += 1;
            let decision = decide(&EnumNode { depth, vertex, weights });
            let (t, b) = match decision {
                Decision::Emit => {
                    out.measure += cylinder_mass(q0, weights);
                    out.emitted += 1;
                    return;
                }
                Decision::Prune => return,
                Decision::Descend => (true, true),
                Decision::DescendFiltered { top, bottom } => (top, bottom),
            };
            for (kind, allowed) in [(Kind::Top, t), (Kind::Bottom, b)] {
                if !allowed {
                    continue;
                }
                let arrow = class.arrow(vertex, kind);
                let (w, l) = (arrow.winner as usize, arrow.loser as usize);
                let saved = weights[l];
                weights[l] = weights[l].checked_add(weights[w]).expect("split region overflow");
                collect(class, q0, decide, arrow.end, weights, depth + 1, split, out, frontier);
                weights[l] = saved;
            }
        }
        collect(
            class,
            q0,
            &decide,
            start,
            &mut weights,
            0,
            split_depth,
            &mut top,
            &mut frontier,
        );
    }
    let subtotals: Vec<FamilyMeasure> = frontier
        .par_iter()
        .map(|f| {
            let decide = &decide;
            let offset = split_depth;
            let sub = enumerate_measure(class, f.vertex, &f.weights, budget, |node| {
                decide(&EnumNode {
                    depth: node.depth + offset,
                    vertex: node.vertex,
                    weights: node.weights,
                })
            });
            // masses computed relative to f.weights must be rescaled to q0
            let scale = cylinder_mass(q0, &f.weights);
            FamilyMeasure {
                measure: sub.measure * &scale,
                open_mass: sub.open_mass * &scale,
                ..sub
            }
        })
        .collect();
    subtotals.into_iter().fold(top, FamilyMeasure::merge)
}

/// An event over enumeration nodes with emit-at-first-satisfaction
/// semantics.  With `monotone` set, debug builds spot-check that satisfied
/// nodes stay satisfied one arrow deeper.
pub struct EventSpec<'a> {
    pub predicate: Box<dyn Fn(&EnumNode) -> bool + Sync + 'a>,
    pub monotone: bool,
}

impl<'a> EventSpec<'a> {
    pub fn new<F: Fn(&EnumNode) -> bool + Sync + 'a>(monotone: bool, f: F) -> Self {
        EventSpec {
            predicate: Box::new(f),
            monotone,
        }
    }
}

/// Measure of the family of minimal paths satisfying the event: the sum of
/// cylinder measures over the paths where the event first holds.
pub fn family_measure(
    class: &RauzyClass,
    start: usize,
    q: &WeightVector,
    event: &EventSpec,
    budget: EnumBudget,
) -> Result<FamilyMeasure> {
    let q0 = q.scaled_u64()?;
    Ok(enumerate_measure(class, start, &q0, budget, |node| {
        if (event.predicate)(node) {
            #[cfg(debug_assertions)]
            if event.monotone {
                spot_check_monotone(class, node, &event.predicate);
            }
            Decision::Emit
        } else {
            Decision::Descend
        }
    }))
}

#[cfg(debug_assertions)]
fn spot_check_monotone(
    class: &RauzyClass,
    node: &EnumNode,
    pred: &(dyn Fn(&EnumNode) -> bool + Sync),
) {
    // sample sparsely to keep debug runs usable
    if node.depth % 5 != 0 {
        return;
    }
    for kind in [Kind::Top, Kind::Bottom] {
        let arrow = class.arrow(node.vertex, kind);
        let mut w = node.weights.to_vec();
        if let Some(next) = w[arrow.loser as usize].checked_add(w[arrow.winner as usize]) {
            w[arrow.loser as usize] = next;
            assert!(
                pred(&EnumNode {
                    depth: node.depth + 1,
                    vertex: arrow.end,
                    weights: &w,
                }),
                "event flagged monotone but fails one arrow deeper"
            );
        }
    }
}

/// Kerckhoff's winner-avoiding distortion family: minimal paths never won
/// by `alpha` along which the `alpha` weight exceeds `T q_alpha`.  The
/// emitted/open decomposition brackets the exact measure; `pass` certifies
/// `measure < 1/T` from the safe side.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub result: FamilyMeasure,
    pub bound: BigRational,
    pub pass: bool,
}

pub fn kerckhoff_measure(
    class: &RauzyClass,
    start: usize,
    q: &WeightVector,
    alpha: usize,
    t: &BigRational,
    budget: EnumBudget,
) -> Result<BoundCheck> {
    if !(t > &BigRational::one()) {
        return Err(Error::OutOfRange("T must exceed 1".into()));
    }
    let q0 = q.scaled_u64()?;
    let t_num = t.numer().clone();
    let t_den = t.denom().clone();
    let threshold_num = &t_num * BigInt::from(q0[alpha]);
    let result = enumerate_measure(class, start, &q0, budget, |node| {
        // (B q)_alpha > T q_alpha  <=>  den * (Bq)_alpha > num * q_alpha
        if BigInt::from(node.weights[alpha]) * &t_den > threshold_num {
            return Decision::Emit;
        }
        let top = class.arrow(node.vertex, Kind::Top).winner as usize != alpha;
        let bottom = class.arrow(node.vertex, Kind::Bottom).winner as usize != alpha;
        Decision::DescendFiltered { top, bottom }
    });
    let bound = t.recip();
    let pass = result.upper() < bound;
    Ok(BoundCheck { result, bound, pass })
}

/// The two-sided weight-distortion family: minimal paths along which the
/// overall maximum weight exceeds `2^M M(q)` while the maximum over the
/// subset stays below `2^{M-m} M(q)`.  Branches where the subset maximum
/// reaches its ceiling are pruned exactly, since weights never decrease.
pub fn distortion_measure(
    class: &RauzyClass,
    start: usize,
    q: &WeightVector,
    subset: &[usize],
    m_small: u32,
    m_big: u32,
    budget: EnumBudget,
) -> Result<FamilyMeasure> {
    if subset.is_empty() || subset.len() >= q.len() {
        return Err(Error::EmptySubset);
    }
    if m_small > m_big {
        return Err(Error::OutOfRange("need 0 <= m <= M".into()));
    }
    let q0 = q.scaled_u64()?;
    let mq = *q0.iter().max().unwrap() as u128;
    let big = mq << m_big;
    let ceiling = mq << (m_big - m_small);
    let in_subset: Vec<bool> = (0..q.len()).map(|i| subset.contains(&i)).collect();
    let decide = move |node: &EnumNode| {
        let mut max_all: u128 = 0;
        let mut max_sub: u128 = 0;
        for (i, &w) in node.weights.iter().enumerate() {
            let w = w as u128;
            max_all = max_all.max(w);
            if in_subset[i] {
                max_sub = max_sub.max(w);
            }
        }
        if max_sub >= ceiling {
            Decision::Prune
        } else if max_all > big {
            Decision::Emit
        } else {
            Decision::Descend
        }
    };
    Ok(enumerate_measure_par(
        class,
        start,
        &q0,
        budget,
        10.min(budget.max_depth),
        decide,
    ))
}

/// The balanced-distortion family: minimal paths along which the maximum
/// weight stays below `C min(m(B q), M(q))`; certifies `measure > 1/C`.
pub fn simple_distortion_check(
    class: &RauzyClass,
    start: usize,
    q: &WeightVector,
    c: &BigRational,
    budget: EnumBudget,
) -> Result<BoundCheck> {
    if !(c > &BigRational::one()) {
        return Err(Error::OutOfRange("C must exceed 1".into()));
    }
    let q0 = q.scaled_u64()?;
    let mq = *q0.iter().max().unwrap();
    let c_num = c.numer().clone();
    let c_den = c.denom().clone();
    let result = enumerate_measure(class, start, &q0, budget, |node| {
        let max_all = *node.weights.iter().max().unwrap();
        let min_all = *node.weights.iter().min().unwrap();
        let lhs = BigInt::from(max_all) * &c_den;
        // once M(Bq) >= C M(q) the event is unreachable: M never decreases
        if lhs >= &c_num * BigInt::from(mq) {
            return Decision::Prune;
        }
        if lhs < &c_num * BigInt::from(min_all.min(mq)) {
            return Decision::Emit;
        }
        Decision::Descend
    });
    let bound = c.recip();
    let pass = result.measure > bound;
    Ok(BoundCheck { result, bound, pass })
}
