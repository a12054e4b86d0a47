//! Bounded model and countermodel search with exhaustive guarantees at small
//! bounds, plus verification of explicit models and proof-net edges.
//!
//! Candidates are enumerated in one canonical order: accessibility rows
//! (world-major), then the existence table, then one positivity digit per
//! world, every component an ascending integer under the bit layouts of
//! `KripkeModel`. Staged constraint checks and dependency collapse skip only
//! regions that provably contain no satisfying model, and symmetry breaking
//! skips only candidates with an isomorphic predecessor in the order, so the
//! first model found is the same under every configuration.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::semantics::eval::Node;
use crate::semantics::{Assignment, Bounds, Compiled, EvalError, KripkeModel};
use crate::syntax::{Formula, Frame, Theory};

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub bounds: Bounds,
    pub frame: Frame,
    /// Sequential lexicographic enumeration. Parallel runs return the same
    /// verdict and witness; this flag only forces a single worker.
    pub deterministic: bool,
    pub symmetry_breaking: bool,
    /// Staged constraint checks and dependency collapse. Disabled, the
    /// enumerator visits every raw candidate.
    pub prune: bool,
    pub candidate_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchConfig {
    pub fn new(bounds: Bounds, frame: Frame) -> SearchConfig {
        SearchConfig {
            bounds,
            frame,
            deterministic: true,
            symmetry_breaking: false,
            prune: true,
            candidate_limit: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    ModelFound(KripkeModel),
    ExhaustedAtBounds,
    BoundExceeded(String),
    TimedOut,
}

#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct SearchStats {
    pub examined: u64,
    pub pruned: u64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

#[derive(Debug, Clone)]
pub enum ValidityOutcome {
    ValidAtBounds,
    Countermodel(KripkeModel),
    BoundExceeded(String),
    TimedOut,
}

#[derive(Debug, Clone)]
pub struct ValidityResult {
    pub outcome: ValidityOutcome,
    pub stats: SearchStats,
}

/// Truth of one formula on one model, per world and globally.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FormulaCheck {
    pub name: String,
    pub per_world: Vec<bool>,
    pub global: bool,
}

/// One proof-net edge: the conclusion is checked as a bounded consequence of
/// the theory's axioms plus the named premises.
#[derive(Debug, Clone)]
pub struct ProofEdge {
    pub name: String,
    pub premises: Vec<String>,
    pub conclusion: Formula,
}

fn malformed<T>(msg: String) -> Result<T, EvalError> {
    Err(EvalError::Malformed { msg })
}

/// Searches for a model satisfying every constraint globally. Constraints
/// must be fully expanded and closed.
pub fn find_model(constraints: &[Formula], cfg: &SearchConfig) -> Result<SearchResult, EvalError> {
    let compiled: Vec<Compiled> =
        constraints.iter().map(Compiled::new).collect::<Result<_, _>>()?;
    for c in &compiled {
        if let Some(name) = c.free_names().first() {
            return malformed(format!("free variable `{}` in a search constraint", name));
        }
    }
    // Validate the bounds by building the all-empty model once.
    let n = cfg.bounds.worlds;
    let m_ent = cfg.bounds.entities;
    KripkeModel::new(n, m_ent, vec![0; n], 0, vec![vec![]; n])
        .map_err(|e| EvalError::Malformed { msg: e.to_string() })?;

    let searcher = Searcher::new(&compiled, cfg);
    Ok(searcher.run())
}

/// Bounded refutation: valid iff exhaustive search finds no model of the
/// axioms plus the negated conjecture. The verdict speaks only up to the
/// configured bounds.
pub fn check_bounded_validity(
    axioms: &[Formula],
    conjecture: &Formula,
    cfg: &SearchConfig,
) -> Result<ValidityResult, EvalError> {
    let mut constraints = axioms.to_vec();
    constraints.push(Formula::not(conjecture.clone().ensure_global()));
    let result = find_model(&constraints, cfg)?;
    let outcome = match result.outcome {
        SearchOutcome::ModelFound(m) => ValidityOutcome::Countermodel(m),
        SearchOutcome::ExhaustedAtBounds => ValidityOutcome::ValidAtBounds,
        SearchOutcome::BoundExceeded(w) => ValidityOutcome::BoundExceeded(w),
        SearchOutcome::TimedOut => ValidityOutcome::TimedOut,
    };
    Ok(ValidityResult { outcome, stats: result.stats })
}

/// Evaluates each named formula on the model, reporting per-world and global
/// truth. Formulas must be fully expanded and closed.
pub fn verify_model(
    m: &KripkeModel,
    formulas: &[(String, Formula)],
) -> Result<Vec<FormulaCheck>, EvalError> {
    let empty = Assignment::new();
    formulas
        .iter()
        .map(|(name, f)| {
            let mask = Compiled::new(f)?.truth(m, &empty)?;
            let per_world = (0..m.worlds()).map(|w| mask >> w & 1 == 1).collect();
            Ok(FormulaCheck { name: name.clone(), per_world, global: mask == m.world_mask() })
        })
        .collect()
}

/// Checks each edge as bounded entailment: theory axioms plus the named
/// premises plus the negated conclusion must be unsatisfiable at the bounds.
/// Premises resolve to axioms or to conclusions of earlier edges.
pub fn verify_proof_net(
    t: &Theory,
    edges: &[ProofEdge],
    cfg: &SearchConfig,
) -> Result<Vec<(String, ValidityResult)>, EvalError> {
    let mut known: Vec<(&str, &Formula)> =
        t.axioms.iter().map(|(n, f)| (n.as_str(), f)).collect();
    let mut out = Vec::with_capacity(edges.len());
    for edge in edges {
        let mut constraints: Vec<Formula> = t.axioms.iter().map(|(_, f)| f.clone()).collect();
        for premise in &edge.premises {
            match known.iter().find(|(n, _)| n == premise) {
                Some((_, f)) => constraints.push((*f).clone()),
                None => {
                    return malformed(format!(
                        "edge `{}`: unknown premise `{}`",
                        edge.name, premise
                    ))
                }
            }
        }
        constraints.push(Formula::not(edge.conclusion.clone().ensure_global()));
        let result = find_model(&constraints, cfg)?;
        let outcome = match result.outcome {
            SearchOutcome::ModelFound(m) => ValidityOutcome::Countermodel(m),
            SearchOutcome::ExhaustedAtBounds => ValidityOutcome::ValidAtBounds,
            SearchOutcome::BoundExceeded(w) => ValidityOutcome::BoundExceeded(w),
            SearchOutcome::TimedOut => ValidityOutcome::TimedOut,
        };
        out.push((edge.name.clone(), ValidityResult { outcome, stats: result.stats }));
        known.push((edge.name.as_str(), &edge.conclusion));
    }
    Ok(out)
}

// ---- enumeration ----------------------------------------------------------

/// Which model components a constraint's truth can depend on.
#[derive(Clone, Copy, Default)]
struct Needs {
    r: bool,
    exists: bool,
    pos: bool,
}

fn needs_of(c: &Compiled, bounds: &Bounds) -> Needs {
    let mut needs = Needs::default();
    let mut propset_quantifier = false;
    for node in &c.comp().nodes {
        match node {
            Node::Nec(_) | Node::Dia(_) => needs.r = true,
            Node::ForallE(_) | Node::ExistsE(_) => needs.exists = true,
            Node::Positive => needs.pos = true,
            Node::Forall(t, _) | Node::Exists(t, _) if t.is_prop_set() => {
                propset_quantifier = true
            }
            _ => {}
        }
    }
    // A third-order quantifier that cannot be enumerated within the limit is
    // evaluated by the conjunction-of-a-set reduction, which reads the whole
    // model.
    if propset_quantifier && !propset_enumerable(bounds) {
        needs = Needs { r: true, exists: true, pos: true };
    }
    needs
}

fn propset_enumerable(bounds: &Bounds) -> bool {
    let ibits = bounds.worlds * bounds.entities;
    if ibits > 6 {
        return false;
    }
    let code_bits = (1usize << ibits) * bounds.worlds;
    code_bits <= 63 && 1u64 << code_bits <= bounds.third_order_limit
}

enum Step {
    Continue,
    Found(KripkeModel),
}

struct Searcher<'a> {
    n: usize,
    m_ent: usize,
    frame: Frame,
    prune: bool,
    symmetry: bool,
    deterministic: bool,
    third_order_limit: u64,
    candidate_limit: Option<u64>,
    deadline: Option<Instant>,
    /// Constraints staged by the deepest component they depend on.
    stage_r: Vec<&'a Compiled>,
    stage_exists: Vec<&'a Compiled>,
    stage_pos: Vec<&'a Compiled>,
    row_bound: u64,
    exists_bound: u64,
    pos_collapsed: bool,
    /// Per-world digit bound, saturated at `u64::MAX` when the digit space
    /// does not fit; the candidate limit cuts enumeration long before that.
    pos_bound: u64,
    /// Nontrivial (world permutation, intension remap) pairs used by
    /// symmetry breaking; empty when the option is off or the space is big.
    iso: Vec<Iso>,
    examined: AtomicU64,
    pruned: AtomicU64,
    best_row0: AtomicU64,
}

struct Iso {
    world_perm: Vec<usize>,
    entity_perm: Vec<usize>,
    intension_map: Vec<u64>,
}

impl<'a> Searcher<'a> {
    fn new(compiled: &'a [Compiled], cfg: &SearchConfig) -> Searcher<'a> {
        let n = cfg.bounds.worlds;
        let m_ent = cfg.bounds.entities;
        let needs: Vec<Needs> = if cfg.prune {
            compiled.iter().map(|c| needs_of(c, &cfg.bounds)).collect()
        } else {
            vec![Needs { r: true, exists: true, pos: true }; compiled.len()]
        };
        let mut stage_r = Vec::new();
        let mut stage_exists = Vec::new();
        let mut stage_pos = Vec::new();
        for (c, nd) in compiled.iter().zip(&needs) {
            if nd.pos {
                stage_pos.push(c);
            } else if nd.exists {
                stage_exists.push(c);
            } else {
                stage_r.push(c);
            }
        }
        let any = |f: fn(&Needs) -> bool| needs.iter().any(f);
        let collapse = cfg.prune;
        let r_collapsed = collapse && !any(|nd| nd.r);
        let exists_collapsed = collapse && !any(|nd| nd.exists);
        let pos_collapsed = collapse && !any(|nd| nd.pos);
        let ibits = n * m_ent;
        let pos_bound = if pos_collapsed {
            1
        } else if ibits >= 6 {
            u64::MAX
        } else {
            1u64 << (1u64 << ibits)
        };
        let iso = if cfg.symmetry_breaking && n <= 4 && m_ent <= 4 && ibits <= 12 {
            isomorphism_maps(n, m_ent)
        } else {
            Vec::new()
        };
        Searcher {
            n,
            m_ent,
            frame: cfg.frame,
            prune: cfg.prune,
            symmetry: cfg.symmetry_breaking,
            deterministic: cfg.deterministic,
            third_order_limit: cfg.bounds.third_order_limit,
            candidate_limit: cfg.candidate_limit,
            deadline: cfg.time_limit.map(|d| Instant::now() + d),
            stage_r,
            stage_exists,
            stage_pos,
            row_bound: if r_collapsed { 0 } else { 1u64 << n },
            exists_bound: if exists_collapsed { 1 } else { 1u64 << ibits },
            pos_collapsed,
            pos_bound,
            iso,
            examined: AtomicU64::new(0),
            pruned: AtomicU64::new(0),
            best_row0: AtomicU64::new(u64::MAX),
        }
    }

    /// First row value when the accessibility relation is collapsed: the
    /// smallest row satisfying the frame constraint.
    fn collapsed_row(&self, w: usize) -> u64 {
        match self.frame {
            Frame::T => 1u64 << w,
            Frame::K | Frame::Kb => 0,
        }
    }

    fn run(&self) -> SearchResult {
        if !self.pos_collapsed && self.pos_bound == u64::MAX {
            // Exhaustion is impossible once a digit no longer fits in u64.
            return SearchResult {
                outcome: SearchOutcome::BoundExceeded(
                    "positivity digit space exceeds 64 bits per world".into(),
                ),
                stats: SearchStats::default(),
            };
        }
        let outcome = if self.row_bound == 0 {
            // Collapsed accessibility: a single canonical relation.
            let succ: Vec<u64> = (0..self.n).map(|w| self.collapsed_row(w)).collect();
            match self.after_rows(&succ, 0) {
                Ok(Step::Found(m)) => SearchOutcome::ModelFound(m),
                Ok(Step::Continue) => SearchOutcome::ExhaustedAtBounds,
                Err(o) => o,
            }
        } else if self.deterministic {
            let mut succ = Vec::with_capacity(self.n);
            match self.rows(&mut succ, 0) {
                Ok(Step::Found(m)) => SearchOutcome::ModelFound(m),
                Ok(Step::Continue) => SearchOutcome::ExhaustedAtBounds,
                Err(o) => o,
            }
        } else {
            self.run_parallel()
        };
        SearchResult {
            outcome,
            stats: SearchStats {
                examined: self.examined.load(Ordering::Relaxed),
                pruned: self.pruned.load(Ordering::Relaxed),
            },
        }
    }

    /// Partitions the search by the first accessibility row. Workers abort
    /// once a lower-indexed slice has found a model, and the lowest-indexed
    /// find wins, so the witness matches the sequential one.
    fn run_parallel(&self) -> SearchOutcome {
        let slices: Vec<u64> = (0..self.row_bound)
            .filter(|&row| self.row_admissible(&[], 0, row))
            .collect();
        let results: Vec<(u64, Result<Step, SearchOutcome>)> = slices
            .into_par_iter()
            .map(|row0| {
                if self.best_row0.load(Ordering::Relaxed) < row0 {
                    return (row0, Ok(Step::Continue));
                }
                let mut succ = vec![row0];
                let step = self.rows(&mut succ, row0);
                if let Ok(Step::Found(..)) = &step {
                    self.best_row0.fetch_min(row0, Ordering::Relaxed);
                }
                (row0, step)
            })
            .collect();
        let mut stop: Option<SearchOutcome> = None;
        for (_, step) in results {
            match step {
                Ok(Step::Found(m)) => return SearchOutcome::ModelFound(m),
                Ok(Step::Continue) => {}
                Err(o) => stop = stop.or(Some(o)),
            }
        }
        stop.unwrap_or(SearchOutcome::ExhaustedAtBounds)
    }

    fn row_admissible(&self, succ: &[u64], w: usize, row: u64) -> bool {
        match self.frame {
            Frame::K => true,
            Frame::T => row >> w & 1 == 1,
            Frame::Kb => {
                (0..w.min(succ.len())).all(|k| row >> k & 1 == succ[k] >> w & 1)
            }
        }
    }

    fn poll(&self) -> Option<SearchOutcome> {
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return Some(SearchOutcome::TimedOut);
            }
        }
        if let Some(limit) = self.candidate_limit {
            if self.examined.load(Ordering::Relaxed) > limit {
                return Some(SearchOutcome::BoundExceeded(format!(
                    "candidate limit {} reached",
                    limit
                )));
            }
        }
        None
    }

    /// Extends the accessibility relation one row at a time.
    fn rows(&self, succ: &mut Vec<u64>, row0: u64) -> Result<Step, SearchOutcome> {
        if succ.len() == self.n {
            return self.after_rows(succ, row0);
        }
        if let Some(stop) = self.poll() {
            return Err(stop);
        }
        let w = succ.len();
        for row in 0..self.row_bound {
            if !self.row_admissible(succ, w, row) {
                continue;
            }
            succ.push(row);
            let step = self.rows(succ, if w == 0 { row } else { row0 });
            succ.pop();
            match step? {
                Step::Continue => {}
                found_or_stop => return Ok(found_or_stop),
            }
        }
        Ok(Step::Continue)
    }

    fn after_rows(&self, succ: &[u64], row0: u64) -> Result<Step, SearchOutcome> {
        if self.prune && !self.stage_r.is_empty() {
            let probe = self.build(succ, 0, &vec![0; self.n]);
            match self.holds_all(&self.stage_r, &probe) {
                Ok(true) => {}
                Ok(false) => {
                    let skipped = self
                        .exists_bound
                        .saturating_mul(self.pos_total());
                    self.pruned.fetch_add(skipped, Ordering::Relaxed);
                    return Ok(Step::Continue);
                }
                Err(stop) => return Err(stop),
            }
        }
        for exists in 0..self.exists_bound {
            if let Some(stop) = self.poll() {
                return Err(stop);
            }
            if self.prune && !self.stage_exists.is_empty() {
                let probe = self.build(succ, exists, &vec![0; self.n]);
                match self.holds_all(&self.stage_exists, &probe) {
                    Ok(true) => {}
                    Ok(false) => {
                        self.pruned.fetch_add(self.pos_total(), Ordering::Relaxed);
                        continue;
                    }
                    Err(stop) => return Err(stop),
                }
            }
            let mut digits = Vec::with_capacity(self.n);
            match self.pos_rows(succ, exists, &mut digits, row0)? {
                Step::Continue => {}
                found_or_stop => return Ok(found_or_stop),
            }
        }
        Ok(Step::Continue)
    }

    fn pos_rows(
        &self,
        succ: &[u64],
        exists: u64,
        digits: &mut Vec<u64>,
        row0: u64,
    ) -> Result<Step, SearchOutcome> {
        if digits.len() == self.n {
            return self.leaf(succ, exists, digits);
        }
        let mut digit = 0u64;
        loop {
            if digit % 512 == 0 {
                if let Some(stop) = self.poll() {
                    return Err(stop);
                }
                if self.best_row0.load(Ordering::Relaxed) < row0 {
                    return Ok(Step::Continue);
                }
            }
            digits.push(digit);
            let step = self.pos_rows(succ, exists, digits, row0);
            digits.pop();
            match step? {
                Step::Continue => {}
                found_or_stop => return Ok(found_or_stop),
            }
            if digit == self.pos_bound - 1 || self.pos_collapsed {
                break;
            }
            digit += 1;
        }
        Ok(Step::Continue)
    }

    fn leaf(&self, succ: &[u64], exists: u64, digits: &[u64]) -> Result<Step, SearchOutcome> {
        if self.symmetry && self.has_smaller_isomorph(succ, exists, digits) {
            self.pruned.fetch_add(1, Ordering::Relaxed);
            return Ok(Step::Continue);
        }
        let examined = self.examined.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.candidate_limit {
            if examined > limit {
                return Err(SearchOutcome::BoundExceeded(format!(
                    "candidate limit {} reached",
                    limit
                )));
            }
        }
        let model = self.build(succ, exists, digits);
        let checks: Vec<&&Compiled> = if self.prune {
            self.stage_pos.iter().collect()
        } else {
            self.stage_r
                .iter()
                .chain(self.stage_exists.iter())
                .chain(self.stage_pos.iter())
                .collect()
        };
        for c in checks {
            match self.holds(c, &model) {
                Ok(true) => {}
                Ok(false) => return Ok(Step::Continue),
                Err(stop) => return Err(stop),
            }
        }
        // Soundness round-trip: the witness must satisfy every constraint.
        let all: Vec<&Compiled> = self
            .stage_r
            .iter()
            .chain(self.stage_exists.iter())
            .chain(self.stage_pos.iter())
            .copied()
            .collect();
        match self.holds_all(&all, &model) {
            Ok(true) => Ok(Step::Found(model)),
            Ok(false) => unreachable!("witness failed re-verification"),
            Err(stop) => Err(stop),
        }
    }

    fn holds(&self, c: &Compiled, m: &KripkeModel) -> Result<bool, SearchOutcome> {
        match c.truth_limited(m, &Assignment::new(), self.third_order_limit) {
            Ok(mask) => Ok(mask == m.world_mask()),
            Err(EvalError::BoundExceeded { what, .. }) => {
                Err(SearchOutcome::BoundExceeded(what))
            }
            Err(e) => unreachable!("evaluation failed on a closed constraint: {e}"),
        }
    }

    fn holds_all(&self, cs: &[&Compiled], m: &KripkeModel) -> Result<bool, SearchOutcome> {
        for c in cs {
            if !self.holds(c, m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn build(&self, succ: &[u64], exists: u64, digits: &[u64]) -> KripkeModel {
        let pos = digits
            .iter()
            .map(|&digit| {
                (0..64u64)
                    .take_while(|&ix| digit >> ix != 0)
                    .filter(|&ix| digit >> ix & 1 == 1)
                    .collect()
            })
            .collect();
        KripkeModel::new(self.n, self.m_ent, succ.to_vec(), exists, pos)
            .expect("enumerated components are in range")
    }

    fn pos_total(&self) -> u64 {
        let mut total = 1u64;
        for _ in 0..self.n {
            total = total.saturating_mul(self.pos_bound);
        }
        total
    }

    fn has_smaller_isomorph(&self, succ: &[u64], exists: u64, digits: &[u64]) -> bool {
        for iso in &self.iso {
            let image = apply_iso(iso, succ, exists, digits, self.n);
            if image < (succ.to_vec(), exists, digits.to_vec()) {
                return true;
            }
        }
        false
    }
}

/// All nontrivial world/entity permutation pairs with their induced intension
/// remaps. Closed formulas cannot tell isomorphic models apart, so a
/// candidate whose image under one of these precedes it in the canonical
/// order is redundant.
fn isomorphism_maps(n: usize, m_ent: usize) -> Vec<Iso> {
    let world_perms = permutations(n);
    let entity_perms = permutations(m_ent);
    let mut out = Vec::new();
    for wp in &world_perms {
        for ep in &entity_perms {
            if wp.iter().enumerate().all(|(i, &x)| i == x)
                && ep.iter().enumerate().all(|(i, &x)| i == x)
            {
                continue;
            }
            let bits = n * m_ent;
            let intension_map = (0..1u64 << bits)
                .map(|ix| {
                    let mut out_ix = 0u64;
                    for e in 0..m_ent {
                        for w in 0..n {
                            if ix >> (e * n + w) & 1 == 1 {
                                out_ix |= 1 << (ep[e] * n + wp[w]);
                            }
                        }
                    }
                    out_ix
                })
                .collect();
            out.push(Iso { world_perm: wp.clone(), entity_perm: ep.clone(), intension_map });
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    permute(&mut items, 0, &mut out);
    out.sort();
    out
}

fn permute(items: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == items.len() {
        out.push(items.clone());
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, out);
        items.swap(at, i);
    }
}

fn apply_iso(
    iso: &Iso,
    succ: &[u64],
    exists: u64,
    digits: &[u64],
    n: usize,
) -> (Vec<u64>, u64, Vec<u64>) {
    let wp = &iso.world_perm;
    let ep = &iso.entity_perm;
    let mut succ_out = vec![0u64; succ.len()];
    for (w, &row) in succ.iter().enumerate() {
        for v in 0..n {
            if row >> v & 1 == 1 {
                succ_out[wp[w]] |= 1 << wp[v];
            }
        }
    }
    let mut exists_out = 0u64;
    for e in 0..ep.len() {
        for w in 0..n {
            if exists >> (e * n + w) & 1 == 1 {
                exists_out |= 1 << (ep[e] * n + wp[w]);
            }
        }
    }
    let mut digits_out = vec![0u64; digits.len()];
    for (w, &digit) in digits.iter().enumerate() {
        for (ix, &ix_out) in iso.intension_map.iter().enumerate() {
            if digit >> ix & 1 == 1 {
                digits_out[wp[w]] |= 1 << ix_out;
            }
        }
    }
    (succ_out, exists_out, digits_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_theory, expand_in_theory};

    fn global(src: &str) -> Formula {
        parse_formula(src, &[]).unwrap().ensure_global()
    }

    fn cfg(w: usize, e: usize, frame: Frame) -> SearchConfig {
        SearchConfig::new(Bounds::new(w, e), frame)
    }

    #[test]
    fn raw_candidate_count_without_pruning_is_16384() {
        let mut c = cfg(2, 1, Frame::K);
        c.prune = false;
        let result = find_model(&[global("F")], &c).unwrap();
        assert!(matches!(result.outcome, SearchOutcome::ExhaustedAtBounds));
        assert_eq!(result.stats.examined, 16384);
        assert_eq!(result.stats.pruned, 0);
    }

    #[test]
    fn unconstrained_search_returns_the_fully_collapsed_model() {
        let result = find_model(&[], &cfg(2, 1, Frame::K)).unwrap();
        let expect = KripkeModel::new(2, 1, vec![0, 0], 0, vec![vec![], vec![]]).unwrap();
        match result.outcome {
            SearchOutcome::ModelFound(m) => assert_eq!(m, expect),
            other => panic!("expected a model, got {:?}", other),
        }
        assert_eq!(result.stats.examined, 1);
    }

    #[test]
    fn reflexive_collapse_uses_the_diagonal_relation() {
        let result = find_model(&[global("forall p:Prop. box p -> p")], &cfg(2, 1, Frame::T))
            .unwrap();
        match result.outcome {
            SearchOutcome::ModelFound(m) => assert_eq!(m.succ_rows(), &[0b01, 0b10]),
            other => panic!("expected a model, got {:?}", other),
        }
    }

    #[test]
    fn first_countermodel_to_necessitated_truth_adds_one_cross_edge() {
        let conj = global("forall p:Prop. p -> box p");
        let result = check_bounded_validity(&[], &conj, &cfg(2, 1, Frame::K)).unwrap();
        match result.outcome {
            ValidityOutcome::Countermodel(m) => {
                assert_eq!(m.succ_rows(), &[0b00, 0b01]);
                assert_eq!(m.exists_bits(), 0);
                assert!(m.pos_rows().iter().all(|row| row.is_empty()));
            }
            other => panic!("expected a countermodel, got {:?}", other),
        }
    }

    #[test]
    fn distribution_schema_is_valid_at_bounds() {
        let conj = global("forall p q:Prop. box (p -> q) -> (box p -> box q)");
        let result = check_bounded_validity(&[], &conj, &cfg(2, 1, Frame::K)).unwrap();
        assert!(matches!(result.outcome, ValidityOutcome::ValidAtBounds));
    }

    #[test]
    fn verdicts_and_witnesses_are_stable_under_symmetry_and_parallelism() {
        let conj = global("forall p:Prop. p -> box p");
        let base = check_bounded_validity(&[], &conj, &cfg(2, 1, Frame::K)).unwrap();
        let base_model = match base.outcome {
            ValidityOutcome::Countermodel(m) => m,
            other => panic!("expected a countermodel, got {:?}", other),
        };
        for (symmetry, deterministic) in [(true, true), (false, false), (true, false)] {
            let mut c = cfg(2, 1, Frame::K);
            c.symmetry_breaking = symmetry;
            c.deterministic = deterministic;
            let result = check_bounded_validity(&[], &conj, &c).unwrap();
            match result.outcome {
                ValidityOutcome::Countermodel(m) => assert_eq!(m, base_model),
                other => panic!("expected a countermodel, got {:?}", other),
            }
        }
    }

    #[test]
    fn candidate_limit_reports_bound_exceeded() {
        let mut c = cfg(2, 1, Frame::K);
        c.prune = false;
        c.candidate_limit = Some(100);
        let result = find_model(&[global("F")], &c).unwrap();
        assert!(matches!(result.outcome, SearchOutcome::BoundExceeded(_)));
    }

    #[test]
    fn zero_time_budget_reports_timeout() {
        let mut c = cfg(2, 1, Frame::K);
        c.prune = false;
        c.time_limit = Some(Duration::ZERO);
        let result = find_model(&[global("F")], &c).unwrap();
        assert!(matches!(result.outcome, SearchOutcome::TimedOut));
    }

    #[test]
    fn free_variables_are_rejected() {
        let f = Formula::Var("p".into(), crate::syntax::SimpleType::Prop);
        assert!(find_model(&[f], &cfg(1, 1, Frame::K)).is_err());
    }

    #[test]
    fn proof_net_edge_with_conclusion_among_premises_is_trivially_valid() {
        let t = expand_in_theory(
            &parse_theory("theory t frame k\naxiom a: forall p:Prop. p -> p\n").unwrap(),
        );
        let edge = ProofEdge {
            name: "again".into(),
            premises: vec!["a".into()],
            conclusion: t.axioms[0].1.clone(),
        };
        let out = verify_proof_net(&t, &[edge], &cfg(1, 1, Frame::K)).unwrap();
        assert!(matches!(out[0].1.outcome, ValidityOutcome::ValidAtBounds));
    }

    #[test]
    fn proof_net_rejects_unknown_premises() {
        let t = expand_in_theory(&parse_theory("theory t frame k\n").unwrap());
        let edge = ProofEdge {
            name: "bad".into(),
            premises: vec!["missing".into()],
            conclusion: global("T"),
        };
        assert!(verify_proof_net(&t, &[edge], &cfg(1, 1, Frame::K)).is_err());
    }

    #[test]
    fn verify_model_reports_per_world_truth() {
        let m = KripkeModel::new(2, 1, vec![0b01, 0b11], 0b11, vec![
            vec![0b01, 0b11],
            vec![0b10, 0b11],
        ])
        .unwrap();
        let mc = (
            "mc".to_string(),
            parse_formula("forall p:Prop. p -> box p", &[]).unwrap(),
        );
        let out = verify_model(&m, &[mc]).unwrap();
        assert_eq!(out[0].per_world, vec![true, false]);
        assert!(!out[0].global);
        assert!(verify_model(&m, &[]).unwrap().is_empty());
    }

    #[test]
    fn third_order_search_without_reduction_reports_bound_exceeded() {
        // At (2,2) the third-order space is 2^32 codes and the constraint is
        // not a conjunction-of-a-set instance, so evaluation gives up.
        let f = global("forall Z:PropSet. Z (\\u:E. T) | ~(Z (\\u:E. T))");
        let result = find_model(&[f], &cfg(2, 2, Frame::K)).unwrap();
        assert!(matches!(result.outcome, SearchOutcome::BoundExceeded(_)));
    }

    #[test]
    fn symmetry_breaking_counts_skipped_leaves_as_pruned() {
        let mut c = cfg(2, 1, Frame::K);
        c.symmetry_breaking = true;
        let result = find_model(&[global("F")], &c).unwrap();
        assert!(matches!(result.outcome, SearchOutcome::ExhaustedAtBounds));
        assert!(result.stats.pruned > 0);
        assert!(result.stats.examined < 16384);
    }
}
