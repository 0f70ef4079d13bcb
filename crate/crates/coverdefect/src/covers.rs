//! Voltage graphs, derived abelian covers, towers of covers, and the
//! loop-lift bookkeeping behind the defect computations.
//!
//! A 2-complex is modeled as a connected graph plus relator words (the
//! attaching words of 2-cells). A character assigns a finite-abelian-group
//! element to every edge; it induces a homomorphism on the fundamental
//! group exactly when it kills every relator. The derived cover has
//! vertices (v, γ) and edges (e, γ): (u, γ) → (v, γ + w_e); a character is
//! accepted for a covering step only when the derived graph is connected,
//! which is equivalent to surjectivity onto the deck group.
//!
//! Vertex and edge ids in a derived cover are base_id·|Γ| + fiber_index,
//! with fiber indices in mixed-radix order over the cyclic factors, and
//! the basepoint lift fixed at fiber index 0. All enumeration orders are
//! ascending in these ids, so outputs are reproducible.

use num::Integer;
use serde::de::Error as DeError;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

pub type GroupElement = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverError {
    EmptyGroup,
    BadVertex(usize),
    BadEdge(usize),
    NotConnected,
    /// A relator word does not trace a closed path.
    RelatorNotClosed,
    /// The character does not kill every relator.
    RelatorNotKilled,
    /// The character image does not generate the deck group; the derived
    /// graph would be disconnected.
    NotSurjective,
    /// Word letters do not compose as a path.
    PathBroken,
    /// Lift start does not project to the word's start vertex.
    StartMismatch,
    /// Character evaluation requires a closed loop.
    OpenPath,
    /// Tower levels do not compose, or the tower is empty.
    TowerMismatch,
    ElementRankMismatch,
}

impl fmt::Display for CoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverError::EmptyGroup => write!(f, "group needs at least one cyclic factor"),
            CoverError::BadVertex(v) => write!(f, "vertex {v} out of range"),
            CoverError::BadEdge(e) => write!(f, "edge {e} out of range"),
            CoverError::NotConnected => write!(f, "graph is not connected"),
            CoverError::RelatorNotClosed => write!(f, "relator is not a closed path"),
            CoverError::RelatorNotKilled => write!(f, "character does not kill a relator"),
            CoverError::NotSurjective => write!(f, "character is not surjective onto the deck group"),
            CoverError::PathBroken => write!(f, "word letters do not compose as a path"),
            CoverError::StartMismatch => write!(f, "lift start does not project to the word start"),
            CoverError::OpenPath => write!(f, "word is not a closed loop"),
            CoverError::TowerMismatch => write!(f, "tower levels do not compose"),
            CoverError::ElementRankMismatch => write!(f, "group element has the wrong rank"),
        }
    }
}

impl std::error::Error for CoverError {}

/// Direct sum of cyclic groups Z_{n_1} ⊕ … ⊕ Z_{n_k}; elements are
/// residue vectors reduced mod the orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    cyclic_orders: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(cyclic_orders: Vec<u64>) -> Result<Self, CoverError> {
        if cyclic_orders.is_empty() || cyclic_orders.contains(&0) {
            return Err(CoverError::EmptyGroup);
        }
        Ok(FiniteAbelianGroup { cyclic_orders })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { cyclic_orders: vec![1] }
    }

    /// (Z_q)^k.
    pub fn homocyclic(q: u64, k: usize) -> Self {
        FiniteAbelianGroup::new(vec![q; k.max(1)]).expect("positive order")
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn rank(&self) -> usize {
        self.cyclic_orders.len()
    }

    pub fn order(&self) -> usize {
        self.cyclic_orders.iter().map(|&n| n as usize).product()
    }

    pub fn exponent(&self) -> u64 {
        self.cyclic_orders.iter().fold(1u64, |acc, &n| acc.lcm(&n))
    }

    pub fn zero(&self) -> GroupElement {
        vec![0; self.cyclic_orders.len()]
    }

    pub fn reduce(&self, raw: &[i64]) -> Result<GroupElement, CoverError> {
        if raw.len() != self.cyclic_orders.len() {
            return Err(CoverError::ElementRankMismatch);
        }
        Ok(raw
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(&x, &n)| x.rem_euclid(n as i64))
            .collect())
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> GroupElement {
        a.iter()
            .zip(b)
            .zip(&self.cyclic_orders)
            .map(|((&x, &y), &n)| (x + y).rem_euclid(n as i64))
            .collect()
    }

    pub fn neg(&self, a: &[i64]) -> GroupElement {
        a.iter().zip(&self.cyclic_orders).map(|(&x, &n)| (-x).rem_euclid(n as i64)).collect()
    }

    pub fn scale(&self, k: i64, a: &[i64]) -> GroupElement {
        a.iter()
            .zip(&self.cyclic_orders)
            .map(|(&x, &n)| (k.wrapping_mul(x)).rem_euclid(n as i64))
            .collect()
    }

    pub fn is_zero_elt(&self, a: &[i64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Mixed-radix index with the last factor fastest.
    pub fn index_of(&self, a: &[i64]) -> usize {
        let mut idx = 0usize;
        for (&x, &n) in a.iter().zip(&self.cyclic_orders) {
            idx = idx * n as usize + x as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut out = vec![0i64; self.cyclic_orders.len()];
        for (slot, &n) in out.iter_mut().zip(&self.cyclic_orders).rev() {
            *slot = (idx % n as usize) as i64;
            idx /= n as usize;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|i| self.element_at(i))
    }
}

/// Word in graph edges: letters (edge id, ±1). Traversal of (e, +1) runs
/// source → target; (e, −1) runs target → source. The start vertex is
/// implied by the first letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<(usize, i8)>,
}

impl Word {
    pub fn new(letters: Vec<(usize, i8)>) -> Self {
        assert!(letters.iter().all(|&(_, x)| x == 1 || x == -1), "exponents are ±1");
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: vec![] }
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word { letters: self.letters.iter().rev().map(|&(e, x)| (e, -x)).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// a·b·a⁻¹·b⁻¹.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn repeat(&self, k: usize) -> Self {
        let mut letters = Vec::with_capacity(self.letters.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Word { letters }
    }
}

/// Connected graph with stable edge ids, a basepoint, and optional
/// relator words (closed paths) marking attached 2-cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoltageGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    basepoint: usize,
    relators: Vec<Word>,
}

impl VoltageGraph {
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        basepoint: usize,
        relators: Vec<Word>,
    ) -> Result<Self, CoverError> {
        if basepoint >= vertex_count {
            return Err(CoverError::BadVertex(basepoint));
        }
        for &(u, v) in &edges {
            if u >= vertex_count {
                return Err(CoverError::BadVertex(u));
            }
            if v >= vertex_count {
                return Err(CoverError::BadVertex(v));
            }
        }
        let g = VoltageGraph { vertex_count, edges, basepoint, relators };
        if !g.is_connected() {
            return Err(CoverError::NotConnected);
        }
        for rel in &g.relators {
            let (start, end) = g.trace(rel)?;
            if start != end {
                return Err(CoverError::RelatorNotClosed);
            }
        }
        Ok(g)
    }

    /// Wedge of m circles: one vertex, m loop edges, no relators.
    pub fn wedge_of_circles(m: usize) -> Self {
        VoltageGraph {
            vertex_count: 1,
            edges: vec![(0, 0); m],
            basepoint: 0,
            relators: vec![],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64
    }

    fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![self.basepoint];
        seen[self.basepoint] = true;
        let mut count = 1usize;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// Start and end vertices of a word, verifying the path composes.
    /// The empty word is taken as the constant path at the basepoint.
    pub fn trace(&self, w: &Word) -> Result<(usize, usize), CoverError> {
        let Some(&(e0, x0)) = w.letters().first() else {
            return Ok((self.basepoint, self.basepoint));
        };
        if e0 >= self.edges.len() {
            return Err(CoverError::BadEdge(e0));
        }
        let start = if x0 == 1 { self.edges[e0].0 } else { self.edges[e0].1 };
        let mut at = start;
        for &(e, x) in w.letters() {
            if e >= self.edges.len() {
                return Err(CoverError::BadEdge(e));
            }
            let (u, v) = self.edges[e];
            let (from, to) = if x == 1 { (u, v) } else { (v, u) };
            if from != at {
                return Err(CoverError::PathBroken);
            }
            at = to;
        }
        Ok((start, at))
    }

    /// First Betti number of the underlying graph.
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertex_count as i64 + 1
    }

    /// Edge membership in a basepoint-rooted BFS spanning tree.
    fn spanning_tree_edges(&self) -> Vec<bool> {
        let mut in_tree = vec![false; self.edges.len()];
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertex_count];
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        let mut seen = vec![false; self.vertex_count];
        seen[self.basepoint] = true;
        let mut queue = std::collections::VecDeque::from([self.basepoint]);
        while let Some(v) = queue.pop_front() {
            for &(w, id) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    in_tree[id] = true;
                    queue.push_back(w);
                }
            }
        }
        in_tree
    }
}

/// Character: an assignment of deck-group elements to edges. Missing
/// edges are assigned zero. Induces a fundamental-group homomorphism
/// exactly when it kills every relator of the complex it is used on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    target: FiniteAbelianGroup,
    assignment: BTreeMap<usize, GroupElement>,
}

impl Character {
    pub fn new(
        target: FiniteAbelianGroup,
        assignment: BTreeMap<usize, GroupElement>,
    ) -> Result<Self, CoverError> {
        let mut reduced = BTreeMap::new();
        for (e, v) in assignment {
            let r = target.reduce(&v)?;
            if !target.is_zero_elt(&r) {
                reduced.insert(e, r);
            }
        }
        Ok(Character { target, assignment: reduced })
    }

    pub fn zero(target: FiniteAbelianGroup) -> Self {
        Character { target, assignment: BTreeMap::new() }
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    /// Edges carrying a nonzero value.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment.keys().copied()
    }

    pub fn value(&self, edge: usize) -> GroupElement {
        self.assignment.get(&edge).cloned().unwrap_or_else(|| self.target.zero())
    }

    /// Signed sum of edge values along a word.
    pub fn word_value(&self, w: &Word) -> GroupElement {
        let mut acc = self.target.zero();
        for &(e, x) in w.letters() {
            if let Some(v) = self.assignment.get(&e) {
                let signed = if x == 1 { v.clone() } else { self.target.neg(v) };
                acc = self.target.add(&acc, &signed);
            }
        }
        acc
    }

    pub fn kills_relators(&self, g: &VoltageGraph) -> bool {
        g.relators().iter().all(|rel| self.target.is_zero_elt(&self.word_value(rel)))
    }
}

/// Evaluate a character on a closed loop of the graph it lives on.
pub fn evaluate_character(
    g: &VoltageGraph,
    chi: &Character,
    w: &Word,
) -> Result<GroupElement, CoverError> {
    let (start, end) = g.trace(w)?;
    if start != end {
        return Err(CoverError::OpenPath);
    }
    Ok(chi.word_value(w))
}

/// A derived cover: the covering graph, projections to the base, the
/// deck group, and the per-base-edge fiber shifts induced by the
/// character's voltages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedCover {
    base: VoltageGraph,
    cover: VoltageGraph,
    deck: FiniteAbelianGroup,
    /// shift[e][γ] = index of γ + w_e; the target fiber of edge (e, γ).
    shift: Vec<Vec<usize>>,
    shift_inv: Vec<Vec<usize>>,
}

impl DerivedCover {
    pub fn base(&self) -> &VoltageGraph {
        &self.base
    }

    pub fn cover(&self) -> &VoltageGraph {
        &self.cover
    }

    pub fn deck(&self) -> &FiniteAbelianGroup {
        &self.deck
    }

    pub fn degree(&self) -> usize {
        self.deck.order()
    }

    pub fn vertex_projection(&self, cover_vertex: usize) -> usize {
        cover_vertex / self.degree()
    }

    pub fn edge_projection(&self, cover_edge: usize) -> usize {
        cover_edge / self.degree()
    }

    /// All cover vertices over a base vertex, ascending.
    pub fn fiber(&self, base_vertex: usize) -> Vec<usize> {
        let n = self.degree();
        (0..n).map(|i| base_vertex * n + i).collect()
    }
}

/// Build the derived cover of g determined by a surjective relator-killing
/// character.
pub fn derive_cover(g: &VoltageGraph, chi: &Character) -> Result<DerivedCover, CoverError> {
    if !chi.kills_relators(g) {
        return Err(CoverError::RelatorNotKilled);
    }
    let deck = chi.target().clone();
    let n = deck.order();
    let mut shift = Vec::with_capacity(g.edge_count());
    let mut shift_inv = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        let w = chi.value(e);
        let mut fwd = vec![0usize; n];
        let mut bwd = vec![0usize; n];
        for idx in 0..n {
            let gamma = deck.element_at(idx);
            let to = deck.index_of(&deck.add(&gamma, &w));
            fwd[idx] = to;
            bwd[to] = idx;
        }
        shift.push(fwd);
        shift_inv.push(bwd);
    }
    let mut edges = Vec::with_capacity(g.edge_count() * n);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for idx in 0..n {
            edges.push((u * n + idx, v * n + shift[e][idx]));
        }
    }
    let cover_vertices = g.vertex_count() * n;
    let basepoint = g.basepoint() * n;
    // Connectivity of the derived graph is exactly surjectivity of the
    // character onto the deck group.
    let probe = VoltageGraph {
        vertex_count: cover_vertices,
        edges,
        basepoint,
        relators: vec![],
    };
    if !probe.is_connected() {
        return Err(CoverError::NotSurjective);
    }
    let mut partial = DerivedCover {
        base: g.clone(),
        cover: probe,
        deck,
        shift,
        shift_inv,
    };
    // Lift every base relator at every fiber start, ascending.
    let mut lifted = Vec::with_capacity(g.relators().len() * n);
    for rel in g.relators() {
        let (rel_start, _) = g.trace(rel)?;
        for idx in 0..n {
            let start = rel_start * n + idx;
            let (end, word) = lift_word(&partial, rel, start)?;
            debug_assert_eq!(end, start, "killed relators lift to loops");
            lifted.push(word);
        }
    }
    partial.cover.relators = lifted;
    Ok(partial)
}

/// Wrap a graph as the trivial cover of itself.
pub fn trivial_cover(g: &VoltageGraph) -> DerivedCover {
    let chi = Character::zero(FiniteAbelianGroup::trivial());
    derive_cover(g, &chi).expect("trivial character is always valid")
}

/// Lift a base word letter by letter from a cover vertex lying over its
/// start. Returns the endpoint and the lifted word.
pub fn lift_word(
    c: &DerivedCover,
    w: &Word,
    start: usize,
) -> Result<(usize, Word), CoverError> {
    let n = c.degree();
    if start >= c.cover.vertex_count() {
        return Err(CoverError::BadVertex(start));
    }
    let (base_start, _) = c.base.trace(w)?;
    if !w.is_empty() && start / n != base_start {
        return Err(CoverError::StartMismatch);
    }
    let mut at = start;
    let mut letters = Vec::with_capacity(w.len());
    for &(e, x) in w.letters() {
        let (u, v) = c.base.edges()[e];
        let idx = at % n;
        if x == 1 {
            debug_assert_eq!(at / n, u);
            letters.push((e * n + idx, 1));
            at = v * n + c.shift[e][idx];
        } else {
            debug_assert_eq!(at / n, v);
            let from_idx = c.shift_inv[e][idx];
            letters.push((e * n + from_idx, -1));
            at = u * n + from_idx;
        }
    }
    Ok((at, Word::new(letters)))
}

/// Build a tower of covers: chars[i] lives on the cover at level i (the
/// base for i = 0) and must kill its lifted relators and be surjective.
pub fn build_tower(
    base: &VoltageGraph,
    chars: &[Character],
) -> Result<Vec<DerivedCover>, CoverError> {
    let mut tower = Vec::with_capacity(chars.len());
    let mut current = base.clone();
    for chi in chars {
        let level = derive_cover(&current, chi)?;
        current = level.cover().clone();
        tower.push(level);
    }
    Ok(tower)
}

/// Lift a base word through a whole tower starting at a top vertex; the
/// start vertices at intermediate levels are the projections of the top
/// vertex. Returns the top endpoint and the lifted word in top edges.
pub fn lift_through_tower(
    tower: &[DerivedCover],
    w: &Word,
    top_start: usize,
) -> Result<(usize, Word), CoverError> {
    if tower.is_empty() {
        return Err(CoverError::TowerMismatch);
    }
    let mut starts = vec![top_start];
    for level in tower.iter().rev() {
        let v = *starts.last().unwrap();
        starts.push(level.vertex_projection(v));
    }
    starts.reverse();
    // starts[0] is in the base; starts[i+1] in tower[i].cover.
    let mut word = w.clone();
    let mut end = 0usize;
    for (i, level) in tower.iter().enumerate() {
        let (e, lifted) = lift_word(level, &word, starts[i + 1])?;
        word = lifted;
        end = e;
    }
    Ok((end, word))
}

/// One orbit record of the loop-lift bookkeeping: the lift of α^r at
/// `start` is the first closed lift, and `lifted_word` is that loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopLiftRecord {
    pub start: usize,
    pub r: usize,
    pub lifted_word: Word,
}

/// Orbit decomposition of the top basepoint fiber under lifting α:
/// repeatedly take the smallest unvisited fiber vertex, follow single-α
/// lifts until the path closes, and record the multiplicity r and the
/// concatenated lifted loop. Σ r over records equals the covering degree.
pub fn loop_lift_collection(
    alpha: &Word,
    tower: &[DerivedCover],
) -> Result<Vec<LoopLiftRecord>, CoverError> {
    if tower.is_empty() {
        return Err(CoverError::TowerMismatch);
    }
    for pair in tower.windows(2) {
        if pair[1].base() != pair[0].cover() {
            return Err(CoverError::TowerMismatch);
        }
    }
    let base = tower[0].base();
    let (a_start, a_end) = base.trace(alpha)?;
    if a_start != a_end || a_start != base.basepoint() {
        return Err(CoverError::OpenPath);
    }
    let mut fiber = vec![base.basepoint()];
    for level in tower {
        let n = level.degree();
        fiber = fiber.into_iter().flat_map(|v| (0..n).map(move |i| v * n + i)).collect();
    }
    let top_vertices = tower.last().unwrap().cover().vertex_count();
    let mut visited = vec![false; top_vertices];
    let mut records = Vec::new();
    for &v in &fiber {
        if visited[v] {
            continue;
        }
        let mut at = v;
        let mut word = Word::empty();
        let mut r = 0usize;
        loop {
            visited[at] = true;
            let (next, lifted) = lift_through_tower(tower, alpha, at)?;
            word = word.concat(&lifted);
            r += 1;
            at = next;
            if at == v {
                break;
            }
            debug_assert!(!visited[at], "α-lift endpoints form disjoint orbits");
        }
        records.push(LoopLiftRecord { start: v, r, lifted_word: word });
    }
    debug_assert_eq!(records.iter().map(|rec| rec.r).sum::<usize>(), fiber.len());
    Ok(records)
}

/// Smith normal form diagonal of an integer matrix, with the divisibility
/// chain enforced; returns the nonzero invariant factors.
fn smith_invariant_factors(mut m: Vec<Vec<i64>>) -> Vec<i64> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut t = 0usize;
    while t < rows.min(cols) {
        // Find a nonzero pivot of minimal absolute value.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            if m[i][t] % m[t][t] != 0 {
                clean = false;
            }
            let q = m[i][t] / m[t][t];
            if q != 0 {
                for j in t..cols {
                    m[i][j] -= q * m[t][j];
                }
            }
        }
        for j in t + 1..cols {
            if m[t][j] % m[t][t] != 0 {
                clean = false;
            }
            let q = m[t][j] / m[t][t];
            if q != 0 {
                for row in m.iter_mut().take(rows).skip(t) {
                    row[j] -= q * row[t];
                }
            }
        }
        let zeroed = (t + 1..rows).all(|i| m[i][t] == 0) && (t + 1..cols).all(|j| m[t][j] == 0);
        if zeroed && clean {
            t += 1;
        }
    }
    let mut diag: Vec<i64> = (0..t).map(|i| m[i][i].abs()).collect();
    // Enforce d_1 | d_2 | … with gcd/lcm swaps.
    let k = diag.len();
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (diag[i], diag[j]);
            let g = a.gcd(&b);
            diag[i] = g;
            diag[j] = a / g * b;
        }
    }
    diag.retain(|&d| d != 0);
    diag
}

/// Rank of the group of Γ-valued characters on the cover complex killing
/// all lifted relators, in the free-module sense: the character group is
/// Γ^rank when every invariant factor of the relator matrix is either
/// coprime to or divisible by the exponent of Γ (always the case for the
/// homocyclic towers built here).
pub fn character_rank(c: &DerivedCover, gamma: &FiniteAbelianGroup) -> usize {
    let g = c.cover();
    let b1 = g.betti().max(0) as usize;
    if g.relators().is_empty() {
        return b1;
    }
    let in_tree = g.spanning_tree_edges();
    // Column index for each non-tree edge.
    let mut col_of = vec![usize::MAX; g.edge_count()];
    let mut cols = 0usize;
    for e in 0..g.edge_count() {
        if !in_tree[e] {
            col_of[e] = cols;
            cols += 1;
        }
    }
    debug_assert_eq!(cols, b1);
    let mut rows = Vec::with_capacity(g.relators().len());
    for rel in g.relators() {
        let mut row = vec![0i64; cols];
        for &(e, x) in rel.letters() {
            if col_of[e] != usize::MAX {
                row[col_of[e]] += x as i64;
            }
        }
        rows.push(row);
    }
    let factors = smith_invariant_factors(rows);
    let q = gamma.exponent();
    let free = b1 - factors.len();
    let torsion_full = factors.iter().filter(|&&d| d % q as i64 == 0).count();
    free + torsion_full
}

/// All relator-killing characters on the cover with values in Γ,
/// optionally restricted to support on at most `support_limit` edges.
/// Deterministic order: ascending support sets, then ascending value
/// indices; the zero character comes first.
pub fn enumerate_characters(
    c: &DerivedCover,
    gamma: &FiniteAbelianGroup,
    support_limit: Option<usize>,
) -> Vec<Character> {
    let g = c.cover();
    let e_count = g.edge_count();
    let limit = support_limit.unwrap_or(e_count).min(e_count);
    let nonzero: Vec<GroupElement> = gamma.elements().skip(1).collect();
    let mut out = Vec::new();
    let mut supports: Vec<Vec<usize>> = vec![vec![]];
    for k in 1..=limit {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            supports.push(subset.clone());
            // Advance to the next k-subset of 0..e_count lexicographically.
            let Some(i) = (0..k).rev().find(|&i| subset[i] < e_count - k + i) else {
                break;
            };
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
    for support in supports {
        let mut counters = vec![0usize; support.len()];
        loop {
            let mut assignment = BTreeMap::new();
            for (slot, &e) in support.iter().enumerate() {
                assignment.insert(e, nonzero[counters[slot]].clone());
            }
            let chi = Character::new(gamma.clone(), assignment).expect("reduced values");
            if chi.kills_relators(g) {
                out.push(chi);
            }
            // Odometer over nonzero values.
            let mut pos = support.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                counters[pos] += 1;
                if counters[pos] < nonzero.len() {
                    break;
                }
                counters[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if support.is_empty() || pos == usize::MAX {
                break;
            }
        }
    }
    out
}

impl Serialize for VoltageGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("VoltageGraph", 4)?;
        st.serialize_field("vertices", &self.vertex_count)?;
        let edges: Vec<[usize; 2]> = self.edges.iter().map(|&(u, v)| [u, v]).collect();
        st.serialize_field("edges", &edges)?;
        st.serialize_field("basepoint", &self.basepoint)?;
        st.serialize_field("relators", &self.relators)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for VoltageGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            vertices: usize,
            edges: Vec<[usize; 2]>,
            basepoint: usize,
            #[serde(default)]
            relators: Vec<Word>,
        }
        let w = Wire::deserialize(deserializer)?;
        VoltageGraph::new(
            w.vertices,
            w.edges.into_iter().map(|[u, v]| (u, v)).collect(),
            w.basepoint,
            w.relators,
        )
        .map_err(|e| DeError::custom(e.to_string()))
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Character", 2)?;
        st.serialize_field("orders", self.target.cyclic_orders())?;
        let assignment: BTreeMap<String, &GroupElement> =
            self.assignment.iter().map(|(e, v)| (e.to_string(), v)).collect();
        st.serialize_field("assignment", &assignment)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            orders: Vec<u64>,
            #[serde(default)]
            assignment: BTreeMap<String, GroupElement>,
        }
        let w = Wire::deserialize(deserializer)?;
        let target =
            FiniteAbelianGroup::new(w.orders).map_err(|e| DeError::custom(e.to_string()))?;
        let mut assignment = BTreeMap::new();
        for (k, v) in w.assignment {
            let e: usize = k.parse().map_err(|_| DeError::custom("bad edge key"))?;
            assignment.insert(e, v);
        }
        Character::new(target, assignment).map_err(|e| DeError::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z2_squared_char() -> Character {
        let gamma = FiniteAbelianGroup::homocyclic(2, 2);
        Character::new(
            gamma,
            BTreeMap::from([(0, vec![1, 0]), (1, vec![0, 1])]),
        )
        .unwrap()
    }

    #[test]
    fn group_arithmetic_and_indexing() {
        let g = FiniteAbelianGroup::new(vec![4, 2]).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.exponent(), 4);
        assert_eq!(g.add(&[3, 1], &[2, 1]), vec![1, 0]);
        assert_eq!(g.neg(&[1, 1]), vec![3, 1]);
        for idx in 0..g.order() {
            assert_eq!(g.index_of(&g.element_at(idx)), idx);
        }
        assert_eq!(g.element_at(0), g.zero());
        assert!(FiniteAbelianGroup::new(vec![]).is_err());
    }

    #[test]
    fn wedge_cover_by_klein_four_group() {
        let base = VoltageGraph::wedge_of_circles(2);
        let c = derive_cover(&base, &z2_squared_char()).unwrap();
        assert_eq!(c.cover().vertex_count(), 4);
        assert_eq!(c.cover().edge_count(), 8);
        assert_eq!(c.cover().betti(), 5);
        assert_eq!(
            c.cover().euler_characteristic(),
            c.degree() as i64 * base.euler_characteristic()
        );
    }

    #[test]
    fn non_surjective_character_is_rejected() {
        let base = VoltageGraph::wedge_of_circles(2);
        let gamma = FiniteAbelianGroup::homocyclic(2, 2);
        // Image generates only the first factor.
        let chi =
            Character::new(gamma, BTreeMap::from([(0, vec![1, 0]), (1, vec![1, 0])])).unwrap();
        assert_eq!(derive_cover(&base, &chi).unwrap_err(), CoverError::NotSurjective);
    }

    #[test]
    fn relator_killing_is_enforced() {
        let rel = Word::new(vec![(0, 1); 4]);
        let base = VoltageGraph::new(1, vec![(0, 0)], 0, vec![rel]).unwrap();
        let z2 = FiniteAbelianGroup::homocyclic(2, 1);
        let ok = Character::new(z2.clone(), BTreeMap::from([(0, vec![1])])).unwrap();
        let cover = derive_cover(&base, &ok).unwrap();
        assert_eq!(cover.cover().relators().len(), 2);
        for lifted in cover.cover().relators() {
            let (s, e) = cover.cover().trace(lifted).unwrap();
            assert_eq!(s, e);
        }
        let z8 = FiniteAbelianGroup::new(vec![8]).unwrap();
        let bad = Character::new(z8, BTreeMap::from([(0, vec![1])])).unwrap();
        assert_eq!(derive_cover(&base, &bad).unwrap_err(), CoverError::RelatorNotKilled);
    }

    #[test]
    fn trivial_cover_is_isomorphic_to_base() {
        let rel = Word::new(vec![(0, 1), (1, 1), (0, -1), (1, -1)]);
        let base = VoltageGraph::new(1, vec![(0, 0), (0, 0)], 0, vec![rel]).unwrap();
        let c = trivial_cover(&base);
        assert_eq!(c.cover().vertex_count(), base.vertex_count());
        assert_eq!(c.cover().edge_count(), base.edge_count());
        assert_eq!(c.cover().relators().len(), base.relators().len());
    }

    #[test]
    fn word_tracing_and_validation() {
        let g = VoltageGraph::new(2, vec![(0, 1), (1, 0)], 0, vec![]).unwrap();
        let w = Word::new(vec![(0, 1), (1, 1)]);
        assert_eq!(g.trace(&w).unwrap(), (0, 0));
        let back = Word::new(vec![(0, 1), (0, -1)]);
        assert_eq!(g.trace(&back).unwrap(), (0, 0));
        let broken = Word::new(vec![(0, 1), (0, 1)]);
        assert_eq!(g.trace(&broken).unwrap_err(), CoverError::PathBroken);
        assert!(VoltageGraph::new(
            2,
            vec![(0, 1), (1, 0)],
            0,
            vec![Word::new(vec![(0, 1)])]
        )
        .is_err());
    }

    #[test]
    fn lift_single_circle_voltage_one() {
        let base = VoltageGraph::wedge_of_circles(1);
        let z3 = FiniteAbelianGroup::new(vec![3]).unwrap();
        let chi = Character::new(z3, BTreeMap::from([(0, vec![1])])).unwrap();
        let c = derive_cover(&base, &chi).unwrap();
        let circle = Word::new(vec![(0, 1)]);
        let (end, lifted) = lift_word(&c, &circle, 0).unwrap();
        assert_eq!(end, 1, "one step moves one sheet up");
        assert_eq!(lifted.letters(), &[(0, 1)]);
        let (end2, _) = lift_word(&c, &circle.inverse(), 0).unwrap();
        assert_eq!(end2, 2);
    }

    #[test]
    fn commutator_lifts_close_in_abelian_covers() {
        let base = VoltageGraph::wedge_of_circles(2);
        let c = derive_cover(&base, &z2_squared_char()).unwrap();
        let comm = Word::commutator(&Word::new(vec![(0, 1)]), &Word::new(vec![(1, 1)]));
        for v in c.fiber(0) {
            let (end, lifted) = lift_word(&c, &comm, v).unwrap();
            assert_eq!(end, v, "commutators die in abelian deck groups");
            assert_eq!(lifted.len(), 4);
        }
    }

    #[test]
    fn loop_collection_single_circle_z4() {
        let base = VoltageGraph::wedge_of_circles(1);
        let z4 = FiniteAbelianGroup::new(vec![4]).unwrap();
        let chi = Character::new(z4, BTreeMap::from([(0, vec![1])])).unwrap();
        let tower = build_tower(&base, &[chi]).unwrap();
        let alpha = Word::new(vec![(0, 1)]);
        let records = loop_lift_collection(&alpha, &tower).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].r, 4);
        assert_eq!(records[0].start, 0);
        assert_eq!(records[0].lifted_word.len(), 4);
        let (s, e) = tower[0].cover().trace(&records[0].lifted_word).unwrap();
        assert_eq!((s, e), (0, 0));
    }

    #[test]
    fn loop_collection_trivial_tower() {
        let base = VoltageGraph::wedge_of_circles(2);
        let tower = vec![trivial_cover(&base)];
        let alpha = Word::commutator(&Word::new(vec![(0, 1)]), &Word::new(vec![(1, 1)]));
        let records = loop_lift_collection(&alpha, &tower).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].r, 1);
        assert_eq!(records[0].lifted_word, alpha);
    }

    #[test]
    fn loop_collection_degree_bookkeeping() {
        let base = VoltageGraph::wedge_of_circles(2);
        let c1 = z2_squared_char();
        let tower_level_1 = build_tower(&base, &[c1.clone()]).unwrap();
        // Continue with a Z_2 character on the cover found by search.
        let z2 = FiniteAbelianGroup::homocyclic(2, 1);
        let candidates = enumerate_characters(&tower_level_1[0], &z2, Some(1));
        let mut done = false;
        for chi in candidates {
            if chi.support().count() == 0 {
                continue;
            }
            let Ok(tower) = build_tower(&base, &[c1.clone(), chi]) else {
                continue;
            };
            let alpha = Word::commutator(&Word::new(vec![(0, 1)]), &Word::new(vec![(1, 1)]));
            let records = loop_lift_collection(&alpha, &tower).unwrap();
            let degree: usize = tower.iter().map(|l| l.degree()).product();
            assert_eq!(records.iter().map(|r| r.r).sum::<usize>(), degree);
            done = true;
            break;
        }
        assert!(done, "at least one surjective single-edge character exists");
    }

    #[test]
    fn character_evaluation_on_loops() {
        let base = VoltageGraph::wedge_of_circles(2);
        let chi = z2_squared_char();
        let comm = Word::commutator(&Word::new(vec![(0, 1)]), &Word::new(vec![(1, 1)]));
        assert_eq!(evaluate_character(&base, &chi, &comm).unwrap(), vec![0, 0]);
        let single = Word::new(vec![(1, 1)]);
        assert_eq!(evaluate_character(&base, &chi, &single).unwrap(), vec![0, 1]);
        let z3 = FiniteAbelianGroup::new(vec![3]).unwrap();
        let open_graph = VoltageGraph::new(2, vec![(0, 1)], 0, vec![]).unwrap();
        let open_chi = Character::zero(z3);
        assert_eq!(
            evaluate_character(&open_graph, &open_chi, &Word::new(vec![(0, 1)])).unwrap_err(),
            CoverError::OpenPath
        );
    }

    #[test]
    fn betti_and_rank_formula_one_level() {
        for m in 2..=4usize {
            let base = VoltageGraph::wedge_of_circles(m);
            assert_eq!(base.betti(), m as i64);
            for d in [2u64, 4] {
                let gamma = FiniteAbelianGroup::new(vec![d]).unwrap();
                let chi = Character::new(
                    gamma.clone(),
                    BTreeMap::from([(0, vec![1])]),
                )
                .unwrap();
                let c = derive_cover(&base, &chi).unwrap();
                let expected = d as i64 * (m as i64 - 1) + 1;
                assert_eq!(c.cover().betti(), expected);
                assert_eq!(character_rank(&c, &gamma) as i64, expected);
            }
        }
    }

    #[test]
    fn character_rank_with_relators() {
        // One circle with relator c^4; Z_2-characters factor through Z_4.
        let rel = Word::new(vec![(0, 1); 4]);
        let base = VoltageGraph::new(1, vec![(0, 0)], 0, vec![rel]).unwrap();
        let c = trivial_cover(&base);
        let z2 = FiniteAbelianGroup::homocyclic(2, 1);
        assert_eq!(character_rank(&c, &z2), 1);
        // Z_8 characters must kill c^4, leaving only the order-≤4 part:
        // the character group is Z_4, not free over Z_8.
        let z3 = FiniteAbelianGroup::new(vec![3]).unwrap();
        assert_eq!(character_rank(&c, &z3), 0);
    }

    #[test]
    fn enumeration_counts() {
        let base = VoltageGraph::wedge_of_circles(2);
        let c = trivial_cover(&base);
        let z2 = FiniteAbelianGroup::homocyclic(2, 1);
        let all = enumerate_characters(&c, &z2, None);
        assert_eq!(all.len(), 4);
        assert_eq!(all[0].support().count(), 0, "zero character first");
        let z4 = FiniteAbelianGroup::new(vec![4]).unwrap();
        let single = enumerate_characters(&c, &z4, Some(1));
        assert_eq!(single.len(), 1 + 2 * 3);
        // Relators filter the assignments.
        let rel = Word::new(vec![(0, 1); 4]);
        let circle = VoltageGraph::new(1, vec![(0, 0)], 0, vec![rel]).unwrap();
        let cc = trivial_cover(&circle);
        let z8 = FiniteAbelianGroup::new(vec![8]).unwrap();
        let killed = enumerate_characters(&cc, &z8, None);
        // Values must satisfy 4v ≡ 0 mod 8: v ∈ {0, 2, 4, 6}.
        assert_eq!(killed.len(), 4);
    }

    #[test]
    fn random_tower_euler_characteristics() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let m = rng.gen_range(2..=4);
            let base = VoltageGraph::wedge_of_circles(m);
            let k = rng.gen_range(1..=2usize);
            let gamma = FiniteAbelianGroup::homocyclic(2, k);
            // Voltage the first k circles with the basis, the rest randomly.
            let mut assignment = BTreeMap::new();
            for i in 0..m {
                if i < k {
                    let mut e = vec![0i64; k];
                    e[i] = 1;
                    assignment.insert(i, e);
                } else {
                    assignment.insert(i, (0..k).map(|_| rng.gen_range(0..2)).collect());
                }
            }
            let chi = Character::new(gamma.clone(), assignment).unwrap();
            let c = derive_cover(&base, &chi).unwrap();
            assert_eq!(
                c.cover().euler_characteristic(),
                gamma.order() as i64 * base.euler_characteristic()
            );
            assert_eq!(c.cover().betti(), gamma.order() as i64 * (m as i64 - 1) + 1);
        }
    }

    #[test]
    fn graph_serde_round_trip() {
        let rel = Word::new(vec![(0, 1), (1, 1), (0, -1), (1, -1)]);
        let g = VoltageGraph::new(1, vec![(0, 0), (0, 0)], 0, vec![rel]).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        let back: VoltageGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
        let chi = z2_squared_char();
        let cj = serde_json::to_string(&chi).unwrap();
        assert_eq!(cj, r#"{"orders":[2,2],"assignment":{"0":[1,0],"1":[0,1]}}"#);
        let cback: Character = serde_json::from_str(&cj).unwrap();
        assert_eq!(chi, cback);
        // Disconnected wire graphs rejected.
        let bad = r#"{"vertices":2,"edges":[],"basepoint":0,"relators":[]}"#;
        assert!(serde_json::from_str::<VoltageGraph>(bad).is_err());
    }
}
