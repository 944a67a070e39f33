//! Index-code analysis: confusion sets, validity checking, cycle search,
//! optimal codelength in both linear and general (nonlinear) modes,
//! side-information edge deletion, and independent components.

use std::collections::{HashMap, HashSet};

use crate::code::{IndexCode, IndexCodeRepr};
use crate::field::{
    binomial, hamming_weight, vector_space_size, FieldSpec, Symbol, SymbolVector,
};
use crate::model::{IndexInstance, MessageId, Partition, ReceiverId};
use crate::{Error, Limits, Result};

/// The set of message-difference vectors a valid encoder must separate,
/// with, for each vector, the receivers whose conditions it meets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionSet {
    pub vectors: Vec<SymbolVector>,
    pub tags: Vec<Vec<ReceiverId>>,
}

impl ConfusionSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, z: &[Symbol]) -> bool {
        self.vectors.binary_search_by(|v| v.as_slice().cmp(z)).is_ok()
    }
}

/// Receivers whose confusion conditions a difference vector `z` meets:
/// the side-information part of `z` has weight at most `2δ` and the
/// wanted part is nonzero.
pub fn confusion_membership(inst: &IndexInstance, z: &[Symbol]) -> Vec<ReceiverId> {
    inst.receivers
        .iter()
        .filter(|r| {
            let side: Vec<Symbol> = inst.side_indices(r).iter().map(|&i| z[i]).collect();
            let wanted: Vec<Symbol> = inst.want_indices(r).iter().map(|&i| z[i]).collect();
            hamming_weight(&side) <= 2 * r.delta && hamming_weight(&wanted) > 0
        })
        .map(|r| r.id.clone())
        .collect()
}

/// Materializes the confusion set by enumerating all of `F_q^n`.
pub fn confusion_set(inst: &IndexInstance, limits: &Limits) -> Result<ConfusionSet> {
    let n = inst.n();
    let total = vector_space_size(inst.field.q(), n);
    limits.check(total)?;
    let mut vectors = Vec::new();
    let mut tags = Vec::new();
    for idx in 0..total as usize {
        let z = inst.field.vector_from_index(idx, n);
        let members = confusion_membership(inst, &z);
        if !members.is_empty() {
            vectors.push(z);
            tags.push(members);
        }
    }
    Ok(ConfusionSet { vectors, tags })
}

/// Outcome of an index-code validity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IcsieOutcome {
    Valid,
    Invalid(IcsieWitness),
}

impl IcsieOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, IcsieOutcome::Valid)
    }
}

/// A counterexample: a confusion vector the encoder fails to separate.
/// For table codes `x` is a message with `F(x) = F(x + z)`; linear codes
/// need only `z` (`z · G = 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcsieWitness {
    pub z: SymbolVector,
    pub x: Option<SymbolVector>,
    pub receivers: Vec<ReceiverId>,
}

/// Checks code validity: every confusion-set vector must separate
/// codewords. Linear codes use the kernel condition; table codes compare
/// all message pairs at each confusion difference.
pub fn validate_icsie(
    inst: &IndexInstance,
    code: &IndexCode,
    limits: &Limits,
) -> Result<IcsieOutcome> {
    if code.n != inst.n() {
        return Err(Error::DimensionMismatch(format!(
            "code is over {} messages, instance has {}",
            code.n,
            inst.n()
        )));
    }
    let field = &inst.field;
    let confusion = confusion_set(inst, limits)?;
    match &code.repr {
        IndexCodeRepr::Linear { .. } => {
            for (z, tags) in confusion.vectors.iter().zip(&confusion.tags) {
                let image = code.encode(field, z)?;
                if hamming_weight(&image) == 0 {
                    return Ok(IcsieOutcome::Invalid(IcsieWitness {
                        z: z.clone(),
                        x: None,
                        receivers: tags.clone(),
                    }));
                }
            }
            Ok(IcsieOutcome::Valid)
        }
        IndexCodeRepr::Table { .. } => {
            let total = vector_space_size(field.q(), code.n);
            limits.check(total.saturating_mul(confusion.len() as u128))?;
            for (z, tags) in confusion.vectors.iter().zip(&confusion.tags) {
                for idx in 0..total as usize {
                    let x = field.vector_from_index(idx, code.n);
                    let shifted = field.vec_add(&x, z);
                    if code.encode(field, &x)? == code.encode(field, &shifted)? {
                        return Ok(IcsieOutcome::Invalid(IcsieWitness {
                            z: z.clone(),
                            x: Some(x),
                            receivers: tags.clone(),
                        }));
                    }
                }
            }
            Ok(IcsieOutcome::Valid)
        }
    }
}

/// A minimum-cardinality message set whose induced subgraph certifies
/// that the codelength can drop below `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    pub messages: Vec<MessageId>,
    /// Receivers whose wanted messages all lie inside the set.
    pub receivers: Vec<ReceiverId>,
    /// For every receiver wanting into the set: how much of its side
    /// information the set covers (always at least `2δ + 1`).
    pub certificate: Vec<(ReceiverId, usize)>,
}

/// Searches nonempty message subsets `B` (smallest first, lexicographic
/// ties) for one where every receiver wanting into `B` retains side
/// information of size at least `2δ + 1` inside `B`. `None` means no such
/// set exists.
pub fn find_delta_s_cycle(
    inst: &IndexInstance,
    limits: &Limits,
) -> Result<Option<CycleWitness>> {
    let n = inst.n();
    limits.check(vector_space_size(2, n))?;
    let want_sets: Vec<Vec<usize>> = inst
        .receivers
        .iter()
        .map(|r| inst.want_indices(r))
        .collect();
    let side_sets: Vec<Vec<usize>> = inst
        .receivers
        .iter()
        .map(|r| inst.side_indices(r))
        .collect();

    for size in 1..=n {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let in_b: HashSet<usize> = comb.iter().copied().collect();
            let mut ok = true;
            let mut certificate = Vec::new();
            for (r, (wants, side)) in inst
                .receivers
                .iter()
                .zip(want_sets.iter().zip(&side_sets))
            {
                if wants.iter().any(|w| in_b.contains(w)) {
                    let overlap = side.iter().filter(|s| in_b.contains(s)).count();
                    if overlap < 2 * r.delta + 1 {
                        ok = false;
                        break;
                    }
                    certificate.push((r.id.clone(), overlap));
                }
            }
            if ok {
                let messages: Vec<MessageId> =
                    comb.iter().map(|&i| inst.messages[i].clone()).collect();
                let receivers = inst
                    .receivers
                    .iter()
                    .zip(&want_sets)
                    .filter(|(_, wants)| {
                        !wants.is_empty() && wants.iter().all(|w| in_b.contains(w))
                    })
                    .map(|(r, _)| r.id.clone())
                    .collect();
                return Ok(Some(CycleWitness {
                    messages,
                    receivers,
                    certificate,
                }));
            }
            if !crate::field::next_combination(&mut comb, n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Search mode for [`optimal_codelength`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMode {
    Linear,
    Nonlinear,
}

/// An optimal codelength together with a code achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult {
    pub n_opt: usize,
    pub code: IndexCode,
}

const LINEAR_SPACE_CAP: u128 = 1 << 12;
const NONLINEAR_SPACE_CAP: u128 = 512;

/// Computes the optimal codelength exactly.
///
/// Linear mode finds the largest subspace disjoint from the confusion set
/// by canonical basis extension; the optimum is `n` minus its dimension.
/// Nonlinear mode brackets the confusion-graph chromatic number between a
/// coset-clique lower bound and a coset-coloring / greedy upper bound;
/// when the brackets leave a gap between powers of `q`, an exact
/// branch-and-bound colorability search decides each candidate length.
pub fn optimal_codelength(
    inst: &IndexInstance,
    mode: OptMode,
    limits: &Limits,
) -> Result<OptResult> {
    let n = inst.n();
    let q = inst.field.q();
    let total = vector_space_size(q, n);
    let cap = match mode {
        OptMode::Linear => LINEAR_SPACE_CAP,
        OptMode::Nonlinear => NONLINEAR_SPACE_CAP,
    };
    if total > cap {
        return Err(Error::LimitExceeded {
            cost: total,
            limit: cap.min(limits.enumeration as u128) as u64,
        });
    }
    limits.check(total)?;

    let confusion = confusion_set(inst, limits)?;
    let field = &inst.field;
    let mut in_confusion = vec![false; total as usize];
    for z in &confusion.vectors {
        in_confusion[field.vector_index(z)] = true;
    }
    let space = IndexSpace::new(field, n);

    match mode {
        OptMode::Linear => {
            let basis = max_avoiding_subspace(&space, &in_confusion);
            let n_opt = n - basis.len();
            let matrix = generator_with_kernel(field, n, &basis);
            Ok(OptResult {
                n_opt,
                code: IndexCode::linear(matrix),
            })
        }
        OptMode::Nonlinear => {
            let (n_opt, coloring) = nonlinear_optimum(&space, &in_confusion);
            let rows: Vec<SymbolVector> = coloring
                .iter()
                .map(|&c| field.vector_from_index(c, n_opt))
                .collect();
            Ok(OptResult {
                n_opt,
                code: IndexCode {
                    n,
                    length: n_opt,
                    repr: IndexCodeRepr::Table { rows },
                },
            })
        }
    }
}

/// Index arithmetic over `F_q^n` viewed through lexicographic indices.
/// For characteristic-2 fields coordinate codes add by XOR and never
/// carry across positions, so index addition is a single XOR; otherwise
/// sums fall back to decoded vectors.
struct IndexSpace<'a> {
    field: &'a FieldSpec,
    n: usize,
    total: usize,
    xor_fast: bool,
}

impl<'a> IndexSpace<'a> {
    fn new(field: &'a FieldSpec, n: usize) -> Self {
        IndexSpace {
            field,
            n,
            total: vector_space_size(field.q(), n) as usize,
            xor_fast: field.characteristic() == 2,
        }
    }

    #[inline]
    fn add(&self, u: usize, v: usize) -> usize {
        if self.xor_fast {
            u ^ v
        } else {
            let a = self.field.vector_from_index(u, self.n);
            let b = self.field.vector_from_index(v, self.n);
            self.field.vector_index(&self.field.vec_add(&a, &b))
        }
    }

    #[inline]
    fn sub(&self, u: usize, v: usize) -> usize {
        if self.xor_fast {
            u ^ v
        } else {
            let a = self.field.vector_from_index(u, self.n);
            let b = self.field.vector_from_index(v, self.n);
            self.field.vector_index(&self.field.vec_sub(&a, &b))
        }
    }

    #[inline]
    fn scale(&self, c: u8, u: usize) -> usize {
        if self.xor_fast && self.field.q() == 2 {
            if c == 0 {
                0
            } else {
                u
            }
        } else {
            let a = self.field.vector_from_index(u, self.n);
            self.field.vector_index(&self.field.vec_scale(c, &a))
        }
    }
}

/// Exact smallest `N` with a valid `q^N`-class partition, plus a witness
/// coloring (color of every vector index).
fn nonlinear_optimum(space: &IndexSpace, in_confusion: &[bool]) -> (usize, Vec<usize>) {
    let q = space.field.q();
    let total = space.total;
    if total == 1 {
        return (0, vec![0]);
    }

    // clique lower bound: cosets of a subgroup whose nonzero elements are
    // all confusable are pairwise-confusable sets
    let mut avoid_non_confusion = vec![false; total];
    for (w, slot) in avoid_non_confusion.iter_mut().enumerate() {
        *slot = w != 0 && !in_confusion[w];
    }
    let clique_dim = max_avoiding_subspace(space, &avoid_non_confusion).len();
    let mut clique = 1usize;
    for _ in 0..clique_dim {
        clique *= q;
    }
    // a one-dimensional affine line through any confusable difference can
    // beat the subgroup bound at q > 2; take the better greedy clique too
    let clique = clique.max(greedy_clique(space, in_confusion));

    // upper bounds: greedy coloring, and cosets of the largest
    // confusion-avoiding subspace
    let greedy = greedy_coloring(space, in_confusion);
    let greedy_colors = greedy.iter().max().map_or(1, |&c| c + 1);
    let kernel = max_avoiding_subspace(space, in_confusion);
    let mut coset_coloring = vec![usize::MAX; total];
    {
        // enumerate the subspace once, then flood cosets
        let mut members = vec![0usize];
        for &b in &kernel {
            let mut extended = members.clone();
            for c in 1..q as u8 {
                let cb = space.scale(c, b);
                extended.extend(members.iter().map(|&m| space.add(m, cb)));
            }
            members = extended;
        }
        let mut color = 0usize;
        for v in 0..total {
            if coset_coloring[v] != usize::MAX {
                continue;
            }
            for &m in &members {
                coset_coloring[space.add(v, m)] = color;
            }
            color += 1;
        }
    }
    let coset_count = coset_coloring.iter().max().unwrap() + 1;

    let (mut best_colors, mut best_coloring) = if coset_count <= greedy_colors {
        (coset_count, coset_coloring)
    } else {
        (greedy_colors, greedy)
    };

    let log_q_ceil = |x: usize| -> usize {
        let mut len = 0;
        let mut classes = 1u128;
        while classes < x as u128 {
            classes *= q as u128;
            len += 1;
        }
        len
    };
    let n_lb = log_q_ceil(clique);
    let mut n_ub = log_q_ceil(best_colors);

    // decide each candidate length between the brackets exactly
    let mut n_try = n_ub;
    while n_try > n_lb {
        let k = {
            let mut classes = 1usize;
            for _ in 0..n_try - 1 {
                classes *= q;
            }
            classes
        };
        match try_color(space, in_confusion, k) {
            Some(coloring) => {
                best_coloring = coloring;
                n_ub = n_try - 1;
                n_try -= 1;
            }
            None => break,
        }
    }
    (n_ub, best_coloring)
}

fn greedy_clique(space: &IndexSpace, in_confusion: &[bool]) -> usize {
    let mut clique: Vec<usize> = Vec::new();
    for v in 0..space.total {
        if clique
            .iter()
            .all(|&u| in_confusion[space.sub(u, v)])
        {
            clique.push(v);
        }
    }
    clique.len()
}

fn greedy_coloring(space: &IndexSpace, in_confusion: &[bool]) -> Vec<usize> {
    let total = space.total;
    let mut colors = vec![usize::MAX; total];
    let mut class_members: Vec<Vec<usize>> = Vec::new();
    for v in 0..total {
        let mut c = 0;
        'colors: while c < class_members.len() {
            if class_members[c]
                .iter()
                .all(|&u| !in_confusion[space.sub(u, v)])
            {
                break 'colors;
            }
            c += 1;
        }
        if c == class_members.len() {
            class_members.push(Vec::new());
        }
        class_members[c].push(v);
        colors[v] = c;
    }
    colors
}

/// Largest subspace of `F_q^n` avoiding the flagged vectors, as a list of
/// basis vector indices. Depth-first canonical basis extension: a
/// candidate must be the smallest new element of the extended span, which
/// enumerates every subspace exactly once.
fn max_avoiding_subspace(space: &IndexSpace, avoid: &[bool]) -> Vec<usize> {
    struct Search<'a, 'b> {
        space: &'a IndexSpace<'b>,
        avoid: &'a [bool],
        best: Vec<usize>,
    }

    impl Search<'_, '_> {
        fn recurse(&mut self, basis: &mut Vec<usize>, span: &mut Vec<bool>, span_list: &mut Vec<usize>) {
            if basis.len() > self.best.len() {
                self.best = basis.clone();
            }
            if self.best.len() == self.space.n {
                return;
            }
            let start = basis.last().map_or(1, |&b| b + 1);
            for cand in start..self.space.total {
                if span[cand] || self.avoid[cand] {
                    continue;
                }
                // new span elements: v + c·cand for v in span, c nonzero
                let mut new_elems = Vec::new();
                let mut valid = true;
                let mut min_new = usize::MAX;
                'outer: for &v_idx in span_list.iter() {
                    for c in 1..self.space.field.q() as u8 {
                        let w_idx = self.space.add(v_idx, self.space.scale(c, cand));
                        if self.avoid[w_idx] {
                            valid = false;
                            break 'outer;
                        }
                        min_new = min_new.min(w_idx);
                        new_elems.push(w_idx);
                    }
                }
                if !valid || min_new != cand {
                    continue;
                }
                for &w in &new_elems {
                    span[w] = true;
                }
                let added = new_elems.len();
                span_list.extend(new_elems);
                basis.push(cand);
                self.recurse(basis, span, span_list);
                basis.pop();
                for _ in 0..added {
                    let w = span_list.pop().unwrap();
                    span[w] = false;
                }
                if self.best.len() == self.space.n {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        space,
        avoid,
        best: Vec::new(),
    };
    let mut span = vec![false; space.total];
    span[0] = true;
    let mut span_list = vec![0usize];
    search.recurse(&mut Vec::new(), &mut span, &mut span_list);
    search.best
}

/// Builds an `n × (n - d)` generator matrix whose left kernel is exactly
/// the span of the given basis vectors: complete the basis to all of
/// `F_q^n`, invert the basis-change matrix, and keep the columns dual to
/// the completion.
fn generator_with_kernel(field: &FieldSpec, n: usize, kernel_basis: &[usize]) -> Vec<Vec<Symbol>> {
    let d = kernel_basis.len();
    let mut rows: Vec<SymbolVector> = kernel_basis
        .iter()
        .map(|&idx| field.vector_from_index(idx, n))
        .collect();
    // complete with unit vectors
    for i in 0..n {
        if rows.len() == n {
            break;
        }
        let mut unit = vec![0u8; n];
        unit[i] = 1;
        let mut trial = rows.clone();
        trial.push(unit);
        if matrix_rank(field, &trial) == trial.len() {
            rows = trial;
        }
    }
    debug_assert_eq!(rows.len(), n);
    let inverse = invert_matrix(field, &rows);
    // columns d..n of the inverse
    (0..n)
        .map(|r| (d..n).map(|c| inverse[r][c]).collect())
        .collect()
}

pub(crate) fn matrix_rank(field: &FieldSpec, rows: &[SymbolVector]) -> usize {
    let mut m: Vec<SymbolVector> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv(m[rank][col]).unwrap();
        for c in 0..ncols {
            m[rank][c] = field.mul(m[rank][c], inv);
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..ncols {
                    let sub = field.mul(factor, m[rank][c]);
                    m[r][c] = field.sub(m[r][c], sub);
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn invert_matrix(field: &FieldSpec, rows: &[SymbolVector]) -> Vec<SymbolVector> {
    let n = rows.len();
    let mut m: Vec<SymbolVector> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u8::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] != 0).expect("matrix invertible");
        m.swap(col, pivot);
        let inv = field.inv(m[col][col]).unwrap();
        for c in 0..2 * n {
            m[col][c] = field.mul(m[col][c], inv);
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..2 * n {
                    let sub = field.mul(factor, m[col][c]);
                    m[r][c] = field.sub(m[r][c], sub);
                }
            }
        }
    }
    m.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Exact decision: can the confusion graph be partitioned into `k`
/// classes with no confusable pair inside a class? Branch-and-bound with
/// dynamic saturation ordering: always color next the vertex with the
/// most distinctly-colored conflicting classes, and never open more than
/// one brand-new class per branch.
fn try_color(space: &IndexSpace, in_confusion: &[bool], k: usize) -> Option<Vec<usize>> {
    let total = space.total;
    // adjacency as bitsets over vertex indices
    let words = total.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; total];
    for u in 0..total {
        for v in u + 1..total {
            if in_confusion[space.sub(u, v)] {
                adj[u][v / 64] |= 1 << (v % 64);
                adj[v][u / 64] |= 1 << (u % 64);
            }
        }
    }

    struct Search<'a> {
        adj: &'a [Vec<u64>],
        k: usize,
        words: usize,
        colors: Vec<usize>,
        class_bits: Vec<Vec<u64>>, // per color, member bitset
    }

    impl Search<'_> {
        fn conflicts(&self, v: usize, c: usize) -> bool {
            self.adj[v]
                .iter()
                .zip(&self.class_bits[c])
                .any(|(&a, &b)| a & b != 0)
        }

        fn recurse(&mut self, colored: usize, max_used: usize) -> bool {
            if colored == self.colors.len() {
                return true;
            }
            // pick the uncolored vertex with the highest saturation
            let mut best_v = usize::MAX;
            let mut best_sat = usize::MAX;
            let active = max_used.min(self.k);
            for v in 0..self.colors.len() {
                if self.colors[v] != usize::MAX {
                    continue;
                }
                let sat = (0..active).filter(|&c| self.conflicts(v, c)).count();
                let free = active - sat + usize::from(active < self.k);
                if free == 0 {
                    return false; // dead vertex
                }
                // fewest free choices first
                if best_v == usize::MAX || free < best_sat {
                    best_v = v;
                    best_sat = free;
                    if free == 1 {
                        break;
                    }
                }
            }
            let v = best_v;
            let cap = self.k.min(max_used + 1);
            for c in 0..cap {
                if self.conflicts(v, c) {
                    continue;
                }
                self.colors[v] = c;
                for (slot, word) in self.class_bits[c].iter_mut().zip(chunk_bit(v, self.words)) {
                    *slot |= word;
                }
                if self.recurse(colored + 1, max_used.max(c + 1)) {
                    return true;
                }
                for (slot, word) in self.class_bits[c].iter_mut().zip(chunk_bit(v, self.words)) {
                    *slot &= !word;
                }
                self.colors[v] = usize::MAX;
            }
            false
        }
    }

    fn chunk_bit(v: usize, words: usize) -> Vec<u64> {
        let mut out = vec![0u64; words];
        out[v / 64] = 1 << (v % 64);
        out
    }

    let mut search = Search {
        adj: &adj,
        k,
        words,
        colors: vec![usize::MAX; total],
        class_bits: vec![vec![0u64; words]; k],
    };
    // vertex 0 takes color 0 (the graph is vertex-transitive)
    search.colors[0] = 0;
    search.class_bits[0][0] |= 1;
    if search.recurse(1, 1) {
        Some(search.colors)
    } else {
        None
    }
}

/// Deletes the requested side-information edges and zeroes every delta,
/// producing the conventional (error-free) instance.
pub fn delete_side_info_edges(
    inst: &IndexInstance,
    deletions: &HashMap<ReceiverId, Vec<MessageId>>,
) -> Result<IndexInstance> {
    for (rid, del) in deletions {
        let r = inst
            .receiver(rid)
            .ok_or_else(|| Error::UnknownId(rid.clone()))?;
        let allowed = (2 * r.delta).min(r.side_info.len());
        if del.len() > allowed {
            return Err(Error::TooManyDeletions {
                receiver: rid.clone(),
                requested: del.len(),
                allowed,
            });
        }
        for m in del {
            if !r.side_info.contains(m) {
                return Err(Error::UnknownId(format!(
                    "receiver `{rid}` does not hold `{m}`"
                )));
            }
        }
    }
    let receivers = inst
        .receivers
        .iter()
        .map(|r| {
            let deleted: HashSet<&MessageId> = deletions
                .get(&r.id)
                .map(|v| v.iter().collect())
                .unwrap_or_default();
            crate::model::Receiver {
                id: r.id.clone(),
                wants: r.wants.clone(),
                side_info: r
                    .side_info
                    .iter()
                    .filter(|m| !deleted.contains(m))
                    .cloned()
                    .collect(),
                delta: 0,
            }
        })
        .collect();
    Ok(IndexInstance {
        field: inst.field.clone(),
        messages: inst.messages.clone(),
        receivers,
    })
}

/// All admissible deletion maps for an instance: per receiver, every
/// subset of its side information with at most `min(2δ, |X|)` elements.
/// The cartesian product is returned lazily as an iterator of maps.
pub fn admissible_deletions(
    inst: &IndexInstance,
    limits: &Limits,
) -> Result<Vec<HashMap<ReceiverId, Vec<MessageId>>>> {
    let mut per_receiver: Vec<(ReceiverId, Vec<Vec<MessageId>>)> = Vec::new();
    let mut cost: u128 = 1;
    for r in &inst.receivers {
        let cap = (2 * r.delta).min(r.side_info.len());
        let mut choices = Vec::new();
        for size in 0..=cap {
            for comb in crate::field::combinations(r.side_info.len(), size) {
                choices.push(comb.iter().map(|&i| r.side_info[i].clone()).collect());
            }
        }
        cost = cost.saturating_mul(choices.len() as u128);
        per_receiver.push((r.id.clone(), choices));
    }
    limits.check(cost)?;
    let mut out: Vec<HashMap<ReceiverId, Vec<MessageId>>> = vec![HashMap::new()];
    for (rid, choices) in per_receiver {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for partial in &out {
            for choice in &choices {
                let mut map = partial.clone();
                if !choice.is_empty() {
                    map.insert(rid.clone(), choice.clone());
                }
                next.push(map);
            }
        }
        out = next;
    }
    Ok(out)
}

/// The instance with one edge-part message and its unique receiver
/// removed (and the message dropped from every side-information set).
pub fn remove_component(
    inst: &IndexInstance,
    partition: &Partition,
    message: &str,
) -> Result<IndexInstance> {
    if !partition.e_messages.iter().any(|m| m == message) {
        return Err(Error::InvalidInstance(format!(
            "`{message}` is not an edge-part message"
        )));
    }
    let receiver = &partition.e_receivers[message];
    Ok(IndexInstance {
        field: inst.field.clone(),
        messages: inst
            .messages
            .iter()
            .filter(|m| m.as_str() != message)
            .cloned()
            .collect(),
        receivers: inst
            .receivers
            .iter()
            .filter(|r| &r.id != receiver)
            .map(|r| crate::model::Receiver {
                id: r.id.clone(),
                wants: r.wants.clone(),
                side_info: r
                    .side_info
                    .iter()
                    .filter(|m| m.as_str() != message)
                    .cloned()
                    .collect(),
                delta: r.delta,
            })
            .collect(),
    })
}

/// True when fixing the named edge-part component costs nothing: the
/// instance without it still admits a code one symbol shorter than the
/// target length.
pub fn is_independent_component(
    inst: &IndexInstance,
    partition: &Partition,
    message: &str,
    target_length: usize,
    limits: &Limits,
) -> Result<bool> {
    let reduced = remove_component(inst, partition, message)?;
    let opt = optimal_codelength(&reduced, OptMode::Nonlinear, limits)?;
    Ok(opt.n_opt + 1 <= target_length)
}

/// Number of weight-bounded patterns, exposed for cost estimates.
pub fn deletion_choice_count(side_len: usize, delta: usize) -> u128 {
    let cap = (2 * delta).min(side_len);
    (0..=cap).map(|s| binomial(side_len, s)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::model::Receiver;

    fn single_receiver_instance(delta: usize) -> IndexInstance {
        IndexInstance {
            field: make_field(2).unwrap(),
            messages: vec!["x1".into(), "x2".into()],
            receivers: vec![Receiver {
                id: "R1".into(),
                wants: vec!["x1".into()],
                side_info: vec!["x2".into()],
                delta,
            }],
        }
    }

    #[test]
    fn confusion_set_of_single_receiver() {
        let inst = single_receiver_instance(0);
        let c = confusion_set(&inst, &Limits::default()).unwrap();
        assert_eq!(c.vectors, vec![vec![1, 0]]);

        let inst = single_receiver_instance(1);
        let c = confusion_set(&inst, &Limits::default()).unwrap();
        assert_eq!(c.vectors, vec![vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn confusion_set_minimal_instance() {
        let inst = IndexInstance {
            field: make_field(2).unwrap(),
            messages: vec!["x1".into()],
            receivers: vec![Receiver {
                id: "R1".into(),
                wants: vec!["x1".into()],
                side_info: vec![],
                delta: 0,
            }],
        };
        let c = confusion_set(&inst, &Limits::default()).unwrap();
        assert_eq!(c.vectors, vec![vec![1]]);
    }

    #[test]
    fn scalar_closure_of_confusion_set() {
        let f = make_field(4).unwrap();
        let inst = IndexInstance {
            field: f.clone(),
            messages: vec!["a".into(), "b".into()],
            receivers: vec![Receiver {
                id: "R".into(),
                wants: vec!["a".into()],
                side_info: vec!["b".into()],
                delta: 0,
            }],
        };
        let c = confusion_set(&inst, &Limits::default()).unwrap();
        for z in &c.vectors {
            for s in 1..4u8 {
                let scaled = f.vec_scale(s, z);
                assert!(c.contains(&scaled), "z={z:?} s={s}");
            }
        }
    }

    fn two_cycle() -> IndexInstance {
        IndexInstance {
            field: make_field(2).unwrap(),
            messages: vec!["x1".into(), "x2".into()],
            receivers: vec![
                Receiver {
                    id: "R1".into(),
                    wants: vec!["x1".into()],
                    side_info: vec!["x2".into()],
                    delta: 0,
                },
                Receiver {
                    id: "R2".into(),
                    wants: vec!["x2".into()],
                    side_info: vec!["x1".into()],
                    delta: 0,
                },
            ],
        }
    }

    #[test]
    fn two_cycle_has_full_cycle() {
        let w = find_delta_s_cycle(&two_cycle(), &Limits::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.messages, vec!["x1".to_string(), "x2".to_string()]);
        assert_eq!(w.receivers.len(), 2);
    }

    #[test]
    fn raising_delta_breaks_the_cycle() {
        let mut inst = two_cycle();
        inst.receivers[0].delta = 1;
        assert_eq!(find_delta_s_cycle(&inst, &Limits::default()).unwrap(), None);
    }

    #[test]
    fn identity_code_is_always_valid() {
        let inst = two_cycle();
        let id = IndexCode::linear(vec![vec![1, 0], vec![0, 1]]);
        assert!(validate_icsie(&inst, &id, &Limits::default())
            .unwrap()
            .is_valid());
    }

    #[test]
    fn zero_code_is_invalid_with_witness() {
        let inst = two_cycle();
        let zero = IndexCode::linear(vec![vec![0], vec![0]]);
        match validate_icsie(&inst, &zero, &Limits::default()).unwrap() {
            IcsieOutcome::Invalid(w) => {
                assert!(!confusion_membership(&inst, &w.z).is_empty());
            }
            IcsieOutcome::Valid => panic!("zero code accepted"),
        }
    }

    #[test]
    fn two_cycle_optimal_length_is_one() {
        let inst = two_cycle();
        for mode in [OptMode::Linear, OptMode::Nonlinear] {
            let r = optimal_codelength(&inst, mode, &Limits::default()).unwrap();
            assert_eq!(r.n_opt, 1, "{mode:?}");
            assert!(validate_icsie(&inst, &r.code, &Limits::default())
                .unwrap()
                .is_valid());
        }
    }

    #[test]
    fn acyclic_instance_needs_full_length() {
        let inst = single_receiver_instance(0);
        // R1 wants x1 holding x2: still acyclic (x2 is wanted by nobody...
        // B = {x2} qualifies vacuously), so check a genuinely acyclic case:
        // both messages wanted, no usable side information.
        let inst2 = IndexInstance {
            field: inst.field.clone(),
            messages: inst.messages.clone(),
            receivers: vec![
                Receiver {
                    id: "R1".into(),
                    wants: vec!["x1".into()],
                    side_info: vec!["x2".into()],
                    delta: 0,
                },
                Receiver {
                    id: "R2".into(),
                    wants: vec!["x2".into()],
                    side_info: vec![],
                    delta: 0,
                },
            ],
        };
        assert!(find_delta_s_cycle(&inst2, &Limits::default())
            .unwrap()
            .is_none());
        for mode in [OptMode::Linear, OptMode::Nonlinear] {
            let r = optimal_codelength(&inst2, mode, &Limits::default()).unwrap();
            assert_eq!(r.n_opt, 2, "{mode:?}");
        }
    }

    #[test]
    fn deletion_respects_budget() {
        let inst = two_cycle();
        let mut deletions = HashMap::new();
        deletions.insert("R1".to_string(), vec!["x2".to_string()]);
        let err = delete_side_info_edges(&inst, &deletions).unwrap_err();
        assert!(matches!(err, Error::TooManyDeletions { .. }));

        let mut inst2 = inst.clone();
        inst2.receivers[0].delta = 1;
        let reduced = delete_side_info_edges(&inst2, &deletions).unwrap();
        assert!(reduced.receivers[0].side_info.is_empty());
        assert!(reduced.receivers.iter().all(|r| r.delta == 0));
    }

    #[test]
    fn deletion_with_empty_map_only_zeroes_deltas() {
        let mut inst = two_cycle();
        inst.receivers[0].delta = 1;
        let reduced = delete_side_info_edges(&inst, &HashMap::new()).unwrap();
        assert_eq!(reduced.receivers[0].side_info, vec!["x2".to_string()]);
        assert_eq!(reduced.receivers[0].delta, 0);
    }
}
