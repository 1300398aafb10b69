//! Weighted match-circuits and even-circuits: undirected multigraphs
//! with ordered degree-1 external vertices, evaluated by brute-force
//! enumeration over spin assignments to the non-terminal edges, plus
//! all the gadget constructions that make the clone closure operations
//! and the constructive converses explicit.

use crate::fourier::inverse_transform;
use crate::table::{bits_of, FunctionTable};
use crate::{Error, Result};

/// A circuit sums over perfect matchings (`Match`) or spanning even
/// subgraphs (`Even`) of its spin-1 edge set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitKind {
    Match,
    Even,
}

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub weight: f64,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId, weight: f64) -> Self {
        Edge { a, b, weight }
    }
}

/// Evaluation caps: terminals (table arity) and non-terminal edge
/// count for the subset enumeration.
pub const MAX_TERMINALS: usize = 8;
pub const MAX_NONTERMINAL_EDGES: usize = 24;

/// A weighted circuit.  Each external vertex has degree exactly one;
/// its edge is the terminal carrying that argument's spin and must
/// have weight 1.  Parallel edges are allowed, self-loops are not.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    kind: CircuitKind,
    externals: Vec<VertexId>,
    internals: Vec<VertexId>,
    edges: Vec<Edge>,
    /// Index into `edges` of each external's terminal, aligned with
    /// `externals`.
    terminals: Vec<usize>,
}

impl Circuit {
    pub fn new(
        kind: CircuitKind,
        externals: Vec<VertexId>,
        internals: Vec<VertexId>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        if externals.len() > MAX_TERMINALS {
            return Err(Error::BadCircuit(format!(
                "{} terminals exceed the cap of {MAX_TERMINALS}",
                externals.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &v in externals.iter().chain(&internals) {
            if !seen.insert(v) {
                return Err(Error::BadCircuit(format!("duplicate vertex id {v}")));
            }
        }
        let is_external = |v: VertexId| -> bool { externals.contains(&v) };
        let mut terminals = vec![usize::MAX; externals.len()];
        let mut nonterminal = 0usize;
        for (i, e) in edges.iter().enumerate() {
            if e.a == e.b {
                return Err(Error::BadCircuit(format!("self-loop at vertex {}", e.a)));
            }
            if !seen.contains(&e.a) || !seen.contains(&e.b) {
                return Err(Error::BadCircuit(format!(
                    "edge ({}, {}) touches an unknown vertex",
                    e.a, e.b
                )));
            }
            if !e.weight.is_finite() {
                return Err(Error::BadCircuit("non-finite edge weight".into()));
            }
            let ext_a = is_external(e.a);
            let ext_b = is_external(e.b);
            if ext_a && ext_b {
                return Err(Error::BadCircuit(format!(
                    "edge ({}, {}) joins two external vertices",
                    e.a, e.b
                )));
            }
            if ext_a || ext_b {
                let ext = if ext_a { e.a } else { e.b };
                let pos = externals.iter().position(|&v| v == ext).expect("checked");
                if terminals[pos] != usize::MAX {
                    return Err(Error::BadCircuit(format!(
                        "external vertex {ext} has degree above one"
                    )));
                }
                if e.weight != 1.0 {
                    return Err(Error::BadCircuit(format!(
                        "terminal edge at vertex {ext} must have weight 1, got {}",
                        e.weight
                    )));
                }
                terminals[pos] = i;
            } else {
                nonterminal += 1;
                match kind {
                    CircuitKind::Match => {
                        if e.weight <= 0.0 {
                            return Err(Error::BadCircuit(format!(
                                "match-circuit weight {} is not positive",
                                e.weight
                            )));
                        }
                    }
                    CircuitKind::Even => {
                        if !(e.weight > 0.0 && e.weight <= 1.0) {
                            return Err(Error::BadCircuit(format!(
                                "even-circuit weight {} is outside (0, 1]",
                                e.weight
                            )));
                        }
                    }
                }
            }
        }
        if let Some(pos) = terminals.iter().position(|&t| t == usize::MAX) {
            return Err(Error::BadCircuit(format!(
                "external vertex {} has no terminal edge",
                externals[pos]
            )));
        }
        if nonterminal > MAX_NONTERMINAL_EDGES {
            return Err(Error::BadCircuit(format!(
                "{nonterminal} non-terminal edges exceed the enumeration cap of \
                 {MAX_NONTERMINAL_EDGES}"
            )));
        }
        Ok(Circuit {
            kind,
            externals,
            internals,
            edges,
            terminals,
        })
    }

    pub fn kind(&self) -> CircuitKind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        self.externals.len()
    }

    pub fn externals(&self) -> &[VertexId] {
        &self.externals
    }

    pub fn internals(&self) -> &[VertexId] {
        &self.internals
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The internal endpoint of terminal `i`.
    pub fn terminal_attachment(&self, i: usize) -> VertexId {
        let e = &self.edges[self.terminals[i]];
        if self.externals.contains(&e.a) {
            e.b
        } else {
            e.a
        }
    }

    fn internal_index(&self, v: VertexId) -> Option<usize> {
        self.internals.iter().position(|&u| u == v)
    }

    /// Sum over configurations consistent with the terminal spins `y`:
    /// perfect matchings (every internal vertex covered exactly once)
    /// or even subgraphs (every internal vertex of even spin-1
    /// degree), of the product of spin-1 edge weights.  The empty
    /// product has weight 1.
    pub fn eval(&self, y: &[bool]) -> Result<f64> {
        if y.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: y.len(),
            });
        }
        let n = self.internals.len();
        let mut degree = vec![0u32; n];
        let mut terminal_weight = 1.0;
        for (i, &spin) in y.iter().enumerate() {
            if spin {
                let v = self.terminal_attachment(i);
                let vi = self.internal_index(v).expect("validated at construction");
                degree[vi] += 1;
                terminal_weight *= self.edges[self.terminals[i]].weight;
            }
        }

        // Non-terminal edges sorted so that each vertex's incident
        // edges finish as early as possible, letting the recursion
        // check a vertex constraint the moment it is final.
        let mut worklist: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.terminals.contains(i))
            .map(|(_, e)| {
                let a = self
                    .internal_index(e.a)
                    .expect("non-terminal endpoints are internal");
                let b = self
                    .internal_index(e.b)
                    .expect("non-terminal endpoints are internal");
                (a.min(b), a.max(b), e.weight)
            })
            .collect();
        worklist.sort_by(|x, y| (x.1, x.0).cmp(&(y.1, y.0)).then(x.2.total_cmp(&y.2)));

        let mut last_touch = vec![None::<usize>; n];
        for (i, &(a, b, _)) in worklist.iter().enumerate() {
            last_touch[a] = Some(i);
            last_touch[b] = Some(i);
        }
        let vertex_ok = |deg: u32, kind: CircuitKind| match kind {
            CircuitKind::Match => deg == 1,
            CircuitKind::Even => deg.is_multiple_of(2),
        };
        // Vertices untouched by any non-terminal edge are final now.
        for v in 0..n {
            if last_touch[v].is_none() && !vertex_ok(degree[v], self.kind) {
                return Ok(0.0);
            }
        }

        struct Search<'a> {
            kind: CircuitKind,
            edges: &'a [(usize, usize, f64)],
            finalize_at: Vec<Vec<usize>>,
            degree: Vec<u32>,
            total: f64,
        }
        impl Search<'_> {
            fn vertex_ok(&self, v: usize) -> bool {
                match self.kind {
                    CircuitKind::Match => self.degree[v] == 1,
                    CircuitKind::Even => self.degree[v].is_multiple_of(2),
                }
            }

            fn recurse(&mut self, depth: usize, weight: f64) {
                if depth == self.edges.len() {
                    self.total += weight;
                    return;
                }
                let (a, b, w) = self.edges[depth];
                // spin 0
                if self.finalize_at[depth]
                    .iter()
                    .all(|&v| self.vertex_ok_at(v, depth))
                {
                    self.recurse(depth + 1, weight);
                }
                // spin 1
                self.degree[a] += 1;
                self.degree[b] += 1;
                let feasible = match self.kind {
                    CircuitKind::Match => self.degree[a] <= 1 && self.degree[b] <= 1,
                    CircuitKind::Even => true,
                };
                if feasible
                    && self.finalize_at[depth]
                        .iter()
                        .all(|&v| self.vertex_ok_at(v, depth))
                {
                    self.recurse(depth + 1, weight * w);
                }
                self.degree[a] -= 1;
                self.degree[b] -= 1;
            }

            fn vertex_ok_at(&self, v: usize, _depth: usize) -> bool {
                self.vertex_ok(v)
            }
        }

        let mut finalize_at = vec![Vec::new(); worklist.len()];
        for (v, touch) in last_touch.iter().enumerate() {
            if let Some(depth) = touch {
                finalize_at[*depth].push(v);
            }
        }
        let mut search = Search {
            kind: self.kind,
            edges: &worklist,
            finalize_at,
            degree,
            total: 0.0,
        };
        if worklist.is_empty() {
            return Ok(terminal_weight);
        }
        search.recurse(0, 1.0);
        Ok(terminal_weight * search.total)
    }

    /// The function of the terminal spins computed by the circuit, as
    /// a non-negative table over all `2^k` assignments.  In the clone
    /// picture this table is a Fourier image.
    pub fn implemented_function(&self) -> Result<FunctionTable> {
        let k = self.arity();
        let values: Vec<f64> = (0..1usize << k)
            .map(|idx| self.eval(&bits_of(idx, k)))
            .collect::<Result<_>>()?;
        FunctionTable::non_negative(k, values)
    }

    /// Inverse-transforms the implemented function and certifies the
    /// result non-negative (entries below `-tol` are rejected with a
    /// witness, entries in `[-tol, 0)` are clamped).
    pub fn realized_pbf(&self, tol: f64) -> Result<FunctionTable> {
        let inverse = inverse_transform(&self.implemented_function()?);
        let mut values = inverse.values().to_vec();
        for (index, v) in values.iter_mut().enumerate() {
            if *v < -tol {
                return Err(Error::NegativeRealization { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        FunctionTable::non_negative(inverse.arity(), values)
    }
}

fn fresh_ids(count: usize, start: VertexId) -> Vec<VertexId> {
    (0..count as VertexId).map(|i| start + i).collect()
}

/// The five-vertex path implementing half the equality function:
/// terminals at both ends, the two internal edges next to the first
/// terminal carrying weight 1/2.
pub fn gadget_eq_match() -> Circuit {
    Circuit::new(
        CircuitKind::Match,
        vec![0, 5],
        vec![1, 2, 3, 4],
        vec![
            Edge::new(0, 1, 1.0),
            Edge::new(1, 2, 0.5),
            Edge::new(2, 3, 0.5),
            Edge::new(3, 4, 1.0),
            Edge::new(4, 5, 1.0),
        ],
    )
    .expect("static gadget")
}

/// The six-vertex path whose implemented function is the spectrum
/// `[3/4, 0, 1/4]` of the half-weight Ising edge.
pub fn gadget_ising_half_match() -> Circuit {
    Circuit::new(
        CircuitKind::Match,
        vec![0, 5],
        vec![1, 2, 3, 4],
        vec![
            Edge::new(0, 1, 1.0),
            Edge::new(1, 2, 1.0),
            Edge::new(2, 3, 0.25),
            Edge::new(3, 4, 0.75),
            Edge::new(4, 5, 1.0),
        ],
    )
    .expect("static gadget")
}

fn next_id(c: &Circuit) -> VertexId {
    c.externals()
        .iter()
        .chain(c.internals())
        .copied()
        .max()
        .map_or(0, |m| m + 1)
}

/// Adds a fictitious terminal: for a match-circuit a disjoint
/// weight-1 path (terminal plus one matched edge), for an even-circuit
/// a disjoint terminal edge alone.
pub fn gadget_fictitious(c: &Circuit) -> Result<Circuit> {
    let base = next_id(c);
    let mut externals = c.externals().to_vec();
    let mut internals = c.internals().to_vec();
    let mut edges = c.edges().to_vec();
    externals.push(base);
    match c.kind() {
        CircuitKind::Match => {
            internals.extend([base + 1, base + 2]);
            edges.push(Edge::new(base, base + 1, 1.0));
            edges.push(Edge::new(base + 1, base + 2, 1.0));
        }
        CircuitKind::Even => {
            internals.push(base + 1);
            edges.push(Edge::new(base, base + 1, 1.0));
        }
    }
    Circuit::new(c.kind(), externals, internals, edges)
}

/// Deletes the last terminal (forcing its edge to spin 0).  A
/// match-circuit gains a disjoint weight-2 edge so the result
/// implements twice the restriction; an even-circuit implements the
/// plain restriction, half the summed spectrum.
pub fn gadget_sum(c: &Circuit) -> Result<Circuit> {
    let k = c.arity();
    if k == 0 {
        return Err(Error::Precondition(
            "cannot sum out a terminal of a nullary circuit".into(),
        ));
    }
    let dropped = *c.externals().last().expect("k >= 1");
    let terminal_idx = c.terminals[k - 1];
    let externals = c.externals()[..k - 1].to_vec();
    let mut internals = c.internals().to_vec();
    let mut edges: Vec<Edge> = c
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != terminal_idx)
        .map(|(_, e)| e.clone())
        .collect();
    debug_assert!(!edges.iter().any(|e| e.a == dropped || e.b == dropped));
    if c.kind() == CircuitKind::Match {
        let base = next_id(c);
        internals.extend([base, base + 1]);
        edges.push(Edge::new(base, base + 1, 2.0));
    }
    Circuit::new(c.kind(), externals, internals, edges)
}

/// Joins two circuits of the same kind and arity so that the
/// implemented function is the XOR-convolution of theirs.  Each old
/// pair of terminals is re-wired through a fresh three-edge fork; a
/// match-circuit additionally bridges the two old external vertices.
pub fn gadget_product(f: &Circuit, g: &Circuit) -> Result<Circuit> {
    if f.kind() != g.kind() {
        return Err(Error::BadCircuit(
            "cannot join circuits of different kinds".into(),
        ));
    }
    let k = f.arity();
    if g.arity() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            got: g.arity(),
        });
    }

    // Re-number: F keeps its ids, G and the fresh vertices shift up.
    let f_max = next_id(f);
    let shift = |v: VertexId| v + f_max;
    let g_max = next_id(g) + f_max;

    let externals = fresh_ids(k, g_max); // u_i
    let v_row = fresh_ids(k, g_max + k as VertexId); // v_i
    let w_row = fresh_ids(k, g_max + 2 * k as VertexId); // v_{k+i}

    let mut internals: Vec<VertexId> = Vec::new();
    internals.extend(f.externals()); // old externals become internal
    internals.extend(f.internals());
    internals.extend(g.externals().iter().map(|&v| shift(v)));
    internals.extend(g.internals().iter().map(|&v| shift(v)));
    internals.extend(&v_row);
    internals.extend(&w_row);

    let mut edges: Vec<Edge> = f.edges().to_vec();
    edges.extend(
        g.edges()
            .iter()
            .map(|e| Edge::new(shift(e.a), shift(e.b), e.weight)),
    );
    for i in 0..k {
        let uf = f.externals()[i];
        let ug = shift(g.externals()[i]);
        edges.push(Edge::new(externals[i], v_row[i], 1.0));
        edges.push(Edge::new(v_row[i], w_row[i], 1.0));
        edges.push(Edge::new(w_row[i], uf, 1.0));
        edges.push(Edge::new(w_row[i], ug, 1.0));
        if f.kind() == CircuitKind::Match {
            edges.push(Edge::new(uf, ug, 1.0));
        }
    }
    Circuit::new(f.kind(), externals, internals, edges)
}

/// Verdict and slack of the four-terminal matching inequality
/// `h(0011) h(1100) + h(0101) h(1010) + h(0110) h(1001) >= h(0000) h(1111)`.
pub fn matchineq_check(fhat: &FunctionTable, tol: f64) -> Result<(bool, f64)> {
    if fhat.arity() != 4 {
        return Err(Error::ArityMismatch {
            expected: 4,
            got: fhat.arity(),
        });
    }
    let v = |idx: usize| fhat.get(idx);
    let lhs = v(0b0011) * v(0b1100) + v(0b0101) * v(0b1010) + v(0b0110) * v(0b1001);
    let rhs = v(0b0000) * v(0b1111);
    let slack = lhs - rhs;
    Ok((slack >= -tol, slack))
}

/// Match-circuit implementing the even-support ternary spectrum
/// `(a, b, c, d)` at assignments `(000, 011, 101, 110)`: three
/// terminal paths into a triangle with weights `d/a`, `b/a`, `c/a`
/// (zero entries delete their edge) and a disjoint scale edge `a`.
pub fn gadget_sdp3(a: f64, b: f64, c: f64, d: f64) -> Result<Circuit> {
    if a <= 0.0 {
        return Err(Error::Precondition(format!(
            "leading coefficient {a} must be positive"
        )));
    }
    for (name, v) in [("b", b), ("c", c), ("d", d)] {
        if v < 0.0 {
            return Err(Error::Precondition(format!(
                "coefficient {name} = {v} is negative"
            )));
        }
    }
    let externals = vec![0, 1, 2];
    let v_row = [3, 4, 5];
    let w_row = [6, 7, 8];
    let scale = [9, 10];
    let mut edges = Vec::new();
    for i in 0..3 {
        edges.push(Edge::new(externals[i], v_row[i], 1.0));
        edges.push(Edge::new(v_row[i], w_row[i], 1.0));
    }
    for (weight, (x, y)) in [(d, (0usize, 1usize)), (b, (1, 2)), (c, (2, 0))] {
        if weight > 0.0 {
            edges.push(Edge::new(w_row[x], w_row[y], weight / a));
        }
    }
    edges.push(Edge::new(scale[0], scale[1], a));
    let mut internals: Vec<VertexId> = v_row.to_vec();
    internals.extend(w_row);
    internals.extend(scale);
    Circuit::new(CircuitKind::Match, externals, internals, edges)
}

/// Match-circuit implementing a symmetric self-dual four-terminal
/// spectrum `(c0, c2, c4)` (weights 0, 2, 4), which exists exactly
/// when `3 c2^2 >= c0 c4`.  The construction follows the clique
/// gadget: terminal paths with weight-mu attachments into a six-clique
/// whose distinguished edge solves `z(l) = l (3l+12) / (l+2)^2 =
/// c0 c4 / c2^2`, degenerating to edge deletion at `z = 0` and to
/// clique contraction at `z = 3`.
pub fn gadget_sym4(c0: f64, c2: f64, c4: f64) -> Result<Circuit> {
    for (name, v) in [("c0", c0), ("c2", c2), ("c4", c4)] {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::Precondition(format!(
                "coefficient {name} = {v} must be a non-negative real"
            )));
        }
    }
    if 3.0 * c2 * c2 < c0 * c4 {
        return Err(Error::Precondition(format!(
            "3 c2^2 = {} < c0 c4 = {}: unrealizable by the matching inequality",
            3.0 * c2 * c2,
            c0 * c4
        )));
    }

    let externals = vec![0u32, 1, 2, 3];
    let v_row = [4u32, 5, 6, 7];
    let w_row = [8u32, 9, 10, 11];
    let x_row = [12u32, 13, 14, 15, 16, 17];
    let scale = [18u32, 19];

    let mut edges = Vec::new();
    for i in 0..4 {
        edges.push(Edge::new(externals[i], v_row[i], 1.0));
        edges.push(Edge::new(v_row[i], w_row[i], 1.0));
    }
    let mut internals: Vec<VertexId> = Vec::new();
    internals.extend(v_row);
    internals.extend(w_row);

    if c0 == 0.0 {
        // Zero spectrum: the mean coefficient vanishes only for the
        // zero function.  A disjoint triangle kills every matching.
        let tri = [12u32, 13, 14];
        internals.extend(tri);
        edges.push(Edge::new(tri[0], tri[1], 1.0));
        edges.push(Edge::new(tri[1], tri[2], 1.0));
        edges.push(Edge::new(tri[2], tri[0], 1.0));
        return Circuit::new(CircuitKind::Match, externals, internals, edges);
    }
    if c2 == 0.0 && c4 == 0.0 {
        internals.extend(scale);
        edges.push(Edge::new(scale[0], scale[1], c0));
        return Circuit::new(CircuitKind::Match, externals, internals, edges);
    }
    // From here c2 > 0: if c4 > 0 the inequality forces it, and
    // c4 = 0 = c2 was handled above.
    debug_assert!(c2 > 0.0);

    let (clique_size, lambda, mu, s) = if c4 == 0.0 {
        // z = 0: delete the distinguished edge.
        (6usize, None, (6.0 * c2 / c0).sqrt(), c0 / 12.0)
    } else if 3.0 * c2 * c2 == c0 * c4 {
        // z = 3: contract away the two distinguished vertices.
        (4usize, None, (3.0 * c2 / c0).sqrt(), c0 / 3.0)
    } else {
        let t = c0 * c4 / (c2 * c2);
        // (3 - t) l^2 + (12 - 4t) l - 4t = 0, positive root
        let lambda = (4.0 * t - 12.0 + (144.0 - 48.0 * t).sqrt()) / (2.0 * (3.0 - t));
        let mu = (c2 * (3.0 * lambda + 12.0) / (c0 * (lambda + 2.0))).sqrt();
        (6usize, Some(lambda), mu, c0 / (3.0 * lambda + 12.0))
    };

    internals.extend(&x_row[..clique_size]);
    internals.extend(scale);
    for i in 0..4 {
        edges.push(Edge::new(w_row[i], x_row[i], mu));
    }
    for i in 0..clique_size {
        for j in i + 1..clique_size {
            if i == 4 && j == 5 {
                // z = 0 case deletes the edge entirely
                if let Some(l) = lambda {
                    edges.push(Edge::new(x_row[i], x_row[j], l));
                }
            } else {
                edges.push(Edge::new(x_row[i], x_row[j], 1.0));
            }
        }
    }
    edges.push(Edge::new(scale[0], scale[1], s));
    Circuit::new(CircuitKind::Match, externals, internals, edges)
}

/// Even-circuit implementing the equality function: a three-edge
/// weight-1 path between two terminals.
pub fn gadget_even_eq() -> Circuit {
    Circuit::new(
        CircuitKind::Even,
        vec![0, 3],
        vec![1, 2],
        vec![
            Edge::new(0, 1, 1.0),
            Edge::new(1, 2, 1.0),
            Edge::new(2, 3, 1.0),
        ],
    )
    .expect("static gadget")
}

/// Even-circuit for the ferromagnetic Ising edge: a three-edge path
/// whose middle weight is `(1 - lambda) / (1 + lambda)`.  Returns the
/// scale `(1 + lambda) / 2` under which the realized function is
/// exactly `hising(2, lambda)`.
pub fn gadget_even_ising(lambda: f64) -> Result<(Circuit, f64)> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Precondition(format!(
            "even-circuit Ising gadget needs lambda in [0, 1), got {lambda}"
        )));
    }
    let middle = (1.0 - lambda) / (1.0 + lambda);
    let circuit = Circuit::new(
        CircuitKind::Even,
        vec![0, 3],
        vec![1, 2],
        vec![
            Edge::new(0, 1, 1.0),
            Edge::new(1, 2, middle),
            Edge::new(2, 3, 1.0),
        ],
    )?;
    Ok((circuit, (1.0 + lambda) / 2.0))
}

/// A pairwise-interaction spin system extracted from an even-circuit:
/// one variable per internal vertex, one ferromagnetic interaction per
/// non-terminal edge, terminals clamped to the arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingSystem {
    pub variables: Vec<VertexId>,
    /// `(u, v, lambda)` with `lambda` in `[0, 1)`.
    pub interactions: Vec<(VertexId, VertexId, f64)>,
    /// Argument index -> clamped variable.
    pub terminal_map: Vec<VertexId>,
    /// Overall scale of the Gibbs sum.
    pub constant: f64,
}

impl IsingSystem {
    /// `constant * sum over spin assignments fixing the clamped
    /// variables of the product of edge interactions`.
    pub fn gibbs(&self, y: &[bool]) -> Result<f64> {
        if y.len() != self.terminal_map.len() {
            return Err(Error::ArityMismatch {
                expected: self.terminal_map.len(),
                got: y.len(),
            });
        }
        Ok(self.constant * self.raw_gibbs(y))
    }

    fn raw_gibbs(&self, y: &[bool]) -> f64 {
        let index_of = |v: VertexId| {
            self.variables
                .iter()
                .position(|&u| u == v)
                .expect("interactions range over declared variables")
        };
        let mut clamp: Vec<Option<bool>> = vec![None; self.variables.len()];
        for (i, &v) in self.terminal_map.iter().enumerate() {
            let vi = index_of(v);
            if let Some(existing) = clamp[vi] {
                if existing != y[i] {
                    return 0.0;
                }
            }
            clamp[vi] = Some(y[i]);
        }
        let free: Vec<usize> = (0..self.variables.len())
            .filter(|&i| clamp[i].is_none())
            .collect();
        let mut total = 0.0;
        for assignment in 0..1usize << free.len() {
            let mut spins: Vec<bool> = clamp.iter().map(|c| c.unwrap_or(false)).collect();
            for (pos, &vi) in free.iter().enumerate() {
                spins[vi] = (assignment >> pos) & 1 == 1;
            }
            let mut prod = 1.0;
            for &(u, v, lambda) in &self.interactions {
                if spins[index_of(u)] != spins[index_of(v)] {
                    prod *= lambda;
                }
            }
            total += prod;
        }
        total
    }
}

/// Translates an even-circuit into its pairwise Ising system: each
/// non-terminal weight `w` becomes an interaction
/// `lambda = (1 - w) / (1 + w)`, and the constant is fixed against the
/// realized function at the all-zero assignment, then verified on
/// every other assignment within `tol`.
pub fn even_to_ising(c: &Circuit, tol: f64) -> Result<IsingSystem> {
    if c.kind() != CircuitKind::Even {
        return Err(Error::Precondition(
            "the Ising translation applies to even-circuits".into(),
        ));
    }
    let interactions: Vec<(VertexId, VertexId, f64)> = c
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !c.terminals.contains(i))
        .map(|(_, e)| (e.a, e.b, (1.0 - e.weight) / (1.0 + e.weight)))
        .collect();
    let terminal_map: Vec<VertexId> = (0..c.arity()).map(|i| c.terminal_attachment(i)).collect();
    let realized = c.realized_pbf(tol)?;
    let mut system = IsingSystem {
        variables: c.internals().to_vec(),
        interactions,
        terminal_map,
        constant: 1.0,
    };
    let zeros = vec![false; c.arity()];
    let base = system.raw_gibbs(&zeros);
    // The empty spin assignment always contributes 1.
    debug_assert!(base >= 1.0);
    system.constant = realized.eval(&zeros)? / base;
    for idx in 0..realized.len() {
        let y = bits_of(idx, c.arity());
        let got = system.gibbs(&y)?;
        let want = realized.get(idx);
        if (got - want).abs() > tol {
            return Err(Error::VerificationFailed(format!(
                "Gibbs sum {got} misses realized value {want} at index {idx}"
            )));
        }
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::convolve;
    use crate::ising::hising;
    use crate::table::FunctionTable;
    use crate::DEFAULT_TOL;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eq_gadget_implements_half_eq() {
        let c = gadget_eq_match();
        assert_eq!(c.eval(&[false, false]).unwrap(), 0.5);
        assert_eq!(c.eval(&[true, false]).unwrap(), 0.0);
        assert_eq!(c.eval(&[false, true]).unwrap(), 0.0);
        assert_eq!(c.eval(&[true, true]).unwrap(), 0.5);
        let implemented = c.implemented_function().unwrap();
        assert!(implemented.approx_eq(&FunctionTable::equality().scale(0.5).unwrap(), 1e-12));
        let realized = c.realized_pbf(DEFAULT_TOL).unwrap();
        assert!(realized.approx_eq(&FunctionTable::equality(), 1e-12));
    }

    #[test]
    fn ising_half_gadget() {
        let c = gadget_ising_half_match();
        let implemented = c.implemented_function().unwrap();
        let want = FunctionTable::symmetric(&[0.75, 0.0, 0.25]).unwrap();
        assert!(implemented.approx_eq(&want, 1e-12));
        let realized = c.realized_pbf(DEFAULT_TOL).unwrap();
        assert!(realized.approx_eq(&hising(2, 0.5).unwrap(), 1e-12));
    }

    #[test]
    fn disjoint_triangle_kills_matchings() {
        let c = Circuit::new(
            CircuitKind::Match,
            vec![0, 1, 2],
            vec![3, 4, 5, 6, 7, 8],
            vec![
                Edge::new(0, 3, 1.0),
                Edge::new(1, 4, 1.0),
                Edge::new(2, 5, 1.0),
                Edge::new(6, 7, 1.0),
                Edge::new(7, 8, 1.0),
                Edge::new(8, 6, 1.0),
            ],
        )
        .unwrap();
        let implemented = c.implemented_function().unwrap();
        assert!(implemented.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn circuit_validation() {
        // external of degree two
        assert!(Circuit::new(
            CircuitKind::Match,
            vec![0],
            vec![1, 2],
            vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0),],
        )
        .is_err());
        // terminal weight must be one
        assert!(Circuit::new(
            CircuitKind::Match,
            vec![0],
            vec![1],
            vec![Edge::new(0, 1, 2.0)],
        )
        .is_err());
        // even-circuit weights capped at one
        assert!(Circuit::new(
            CircuitKind::Even,
            vec![0],
            vec![1, 2],
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.5)],
        )
        .is_err());
        // self-loops rejected
        assert!(Circuit::new(
            CircuitKind::Match,
            vec![],
            vec![1],
            vec![Edge::new(1, 1, 1.0)],
        )
        .is_err());
        // external-external edges rejected
        assert!(Circuit::new(
            CircuitKind::Match,
            vec![0, 1],
            vec![],
            vec![Edge::new(0, 1, 1.0)],
        )
        .is_err());
        // parallel edges are fine
        assert!(Circuit::new(
            CircuitKind::Even,
            vec![0],
            vec![1, 2],
            vec![
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 0.5),
                Edge::new(1, 2, 0.25),
            ],
        )
        .is_ok());
    }

    fn random_circuit(
        rng: &mut ChaCha8Rng,
        kind: CircuitKind,
        k: usize,
        internals: usize,
        extra_edges: usize,
    ) -> Circuit {
        let n = internals.max(1);
        let externals: Vec<VertexId> = (0..k as VertexId).collect();
        let internal_ids: Vec<VertexId> = (k as VertexId..(k + n) as VertexId).collect();
        let mut edges = Vec::new();
        for &u in &externals {
            let target = internal_ids[rng.random_range(0..n)];
            edges.push(Edge::new(u, target, 1.0));
        }
        for _ in 0..extra_edges {
            if n < 2 {
                break;
            }
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n);
            while b == a {
                b = rng.random_range(0..n);
            }
            let weight = match kind {
                CircuitKind::Match => rng.random_range(0.1..2.0),
                CircuitKind::Even => rng.random_range(0.05..=1.0),
            };
            edges.push(Edge::new(internal_ids[a], internal_ids[b], weight));
        }
        Circuit::new(kind, externals, internal_ids, edges).unwrap()
    }

    #[test]
    fn parity_condition_holds_for_random_match_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..150 {
            let k = rng.random_range(1..=4usize);
            let (n, m) = (rng.random_range(1..=6), rng.random_range(0..=8));
            let c = random_circuit(&mut rng, CircuitKind::Match, k, n, m);
            let implemented = c.implemented_function().unwrap();
            let odd_zero = (0..implemented.len())
                .filter(|i| i.count_ones() % 2 == 1)
                .all(|i| implemented.get(i) == 0.0);
            let even_zero = (0..implemented.len())
                .filter(|i| i.count_ones() % 2 == 0)
                .all(|i| implemented.get(i) == 0.0);
            assert!(odd_zero || even_zero);
        }
    }

    #[test]
    fn fictitious_and_sum_gadgets() {
        for kind in [CircuitKind::Match, CircuitKind::Even] {
            let base = match kind {
                CircuitKind::Match => gadget_eq_match(),
                CircuitKind::Even => gadget_even_eq(),
            };
            let implemented = base.implemented_function().unwrap();

            let fic = gadget_fictitious(&base).unwrap();
            let fic_impl = fic.implemented_function().unwrap();
            for idx in 0..implemented.len() {
                assert!((fic_impl.get(idx << 1) - implemented.get(idx)).abs() < 1e-12);
                assert_eq!(fic_impl.get((idx << 1) | 1), 0.0);
            }

            let summed = gadget_sum(&base).unwrap();
            let sum_impl = summed.implemented_function().unwrap();
            for idx in 0..sum_impl.len() {
                let expected = match kind {
                    // doubled restriction for match, plain restriction
                    // (half the summed spectrum) for even
                    CircuitKind::Match => 2.0 * implemented.get(idx << 1),
                    CircuitKind::Even => implemented.get(idx << 1),
                };
                assert!((sum_impl.get(idx) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_gadget_matches_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..40 {
            let kind = if trial % 2 == 0 {
                CircuitKind::Match
            } else {
                CircuitKind::Even
            };
            let k = rng.random_range(1..=2usize);
            let (nf, mf) = (rng.random_range(1..=3), rng.random_range(0..=3));
            let (ng, mg) = (rng.random_range(1..=3), rng.random_range(0..=3));
            let f = random_circuit(&mut rng, kind, k, nf, mf);
            let g = random_circuit(&mut rng, kind, k, ng, mg);
            let joined = gadget_product(&f, &g).unwrap();
            let want = convolve(
                &f.implemented_function().unwrap(),
                &g.implemented_function().unwrap(),
            )
            .unwrap();
            let got = joined.implemented_function().unwrap();
            assert!(got.approx_eq(&want, 1e-9), "kind {kind:?}, trial {trial}");
        }
    }

    #[test]
    fn product_of_eq_gadgets_is_quarter_convolution() {
        let c = gadget_product(&gadget_eq_match(), &gadget_eq_match()).unwrap();
        let eq_half = FunctionTable::equality().scale(0.5).unwrap();
        let want = convolve(&eq_half, &eq_half).unwrap();
        assert!(c.implemented_function().unwrap().approx_eq(&want, 1e-12));
    }

    #[test]
    fn matchineq_examples() {
        let g = crate::fourier::hising_hat(4, 0.5).unwrap();
        let (holds, slack) = matchineq_check(&g, DEFAULT_TOL).unwrap();
        assert!(!holds);
        assert!((slack - (3.0 / 256.0 - 9.0 / 256.0)).abs() < 1e-15);

        let f = FunctionTable::symmetric(&[4.0, 0.0, 1.5, 0.0, 0.0]).unwrap();
        let (holds, slack) = matchineq_check(&f, DEFAULT_TOL).unwrap();
        assert!(holds);
        assert!((slack - 3.0 * 1.5 * 1.5).abs() < 1e-12);

        let g = crate::fourier::hising_hat(4, 0.25).unwrap();
        let (holds, _) = matchineq_check(&g, DEFAULT_TOL).unwrap();
        assert!(!holds);
    }

    #[test]
    fn matchineq_holds_for_random_match_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let (n, m) = (rng.random_range(1..=8), rng.random_range(0..=10));
            let c = random_circuit(&mut rng, CircuitKind::Match, 4, n, m);
            let implemented = c.implemented_function().unwrap();
            let (holds, slack) = matchineq_check(&implemented, DEFAULT_TOL).unwrap();
            assert!(holds, "slack {slack}");
        }
    }

    #[test]
    fn sdp3_gadget() {
        // (1, 0, 0, 0): only the all-zero assignment survives
        let c = gadget_sdp3(1.0, 0.0, 0.0, 0.0).unwrap();
        let implemented = c.implemented_function().unwrap();
        assert_eq!(implemented.get(0), 1.0);
        assert!(implemented.values()[1..].iter().all(|&v| v == 0.0));
        // deletion rule: no triangle edges at all
        assert_eq!(c.edges().len(), 3 + 3 + 1);

        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..40 {
            let b = rng.random_range(0.0..1.0);
            let c_coef = rng.random_range(0.0..1.0);
            let d = rng.random_range(0.0..1.0);
            let a = b + c_coef + d + rng.random_range(0.01..1.0);
            let circuit = gadget_sdp3(a, b, c_coef, d).unwrap();
            let implemented = circuit.implemented_function().unwrap();
            assert!((implemented.get(0b000) - a).abs() < 1e-12);
            assert!((implemented.get(0b011) - b).abs() < 1e-12);
            assert!((implemented.get(0b101) - c_coef).abs() < 1e-12);
            assert!((implemented.get(0b110) - d).abs() < 1e-12);
            for idx in [0b001, 0b010, 0b100, 0b111] {
                assert_eq!(implemented.get(idx), 0.0);
            }
        }
        assert!(gadget_sdp3(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sym4_gadget_cases() {
        // c0 = 0: zero function
        let c = gadget_sym4(0.0, 0.0, 0.0).unwrap();
        assert!(c
            .implemented_function()
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));

        // c2 = c4 = 0
        let c = gadget_sym4(2.5, 0.0, 0.0).unwrap();
        let implemented = c.implemented_function().unwrap();
        assert!((implemented.get(0) - 2.5).abs() < 1e-12);
        assert!(implemented.values()[1..].iter().all(|&v| v == 0.0));

        let check = |c0: f64, c2: f64, c4: f64| {
            let circuit = gadget_sym4(c0, c2, c4).unwrap();
            let implemented = circuit.implemented_function().unwrap();
            assert!((implemented.get(0) - c0).abs() < 1e-9 * c0.max(1.0), "c0");
            for idx in 0..16usize {
                match idx.count_ones() {
                    0 => {}
                    2 => assert!(
                        (implemented.get(idx) - c2).abs() < 1e-9 * c2.max(1.0),
                        "c2 at {idx}: {} vs {c2}",
                        implemented.get(idx)
                    ),
                    4 => assert!(
                        (implemented.get(idx) - c4).abs() < 1e-9 * c4.max(1.0),
                        "c4: {} vs {c4}",
                        implemented.get(idx)
                    ),
                    _ => assert_eq!(implemented.get(idx), 0.0),
                }
            }
        };

        // interior case
        check(1.0, 1.0, 1.0);
        // the [13,4,1,4,13] spectrum: lambda = 0 branch
        check(4.0, 1.5, 0.0);
        let c = gadget_sym4(4.0, 1.5, 0.0).unwrap();
        let realized = c.realized_pbf(DEFAULT_TOL).unwrap();
        let want = FunctionTable::symmetric(&[13.0, 4.0, 1.0, 4.0, 13.0]).unwrap();
        assert!(realized.approx_eq(&want, 1e-9));
        // boundary 3 c2^2 = c0 c4: clique contraction branch
        check(3.0, 1.0, 1.0);

        assert!(gadget_sym4(3.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn even_gadgets() {
        let c = gadget_even_eq();
        assert!(c
            .implemented_function()
            .unwrap()
            .approx_eq(&FunctionTable::equality(), 1e-12));

        for lambda in [0.0, 0.25, 0.5, 0.9] {
            let (c, scale) = gadget_even_ising(lambda).unwrap();
            let realized = c.realized_pbf(DEFAULT_TOL).unwrap().scale(scale).unwrap();
            assert!(
                realized.approx_eq(&hising(2, lambda).unwrap(), 1e-12),
                "lambda = {lambda}"
            );
        }
        assert!(gadget_even_ising(1.0).is_err());

        // the empty subgraph contributes 1 to every all-zero evaluation
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..30 {
            let k = rng.random_range(1..=3usize);
            let (n, m) = (rng.random_range(1..=4), rng.random_range(0..=6));
            let c = random_circuit(&mut rng, CircuitKind::Even, k, n, m);
            assert!(c.eval(&vec![false; k]).unwrap() >= 1.0);
        }
    }

    #[test]
    fn even_to_ising_round_trip() {
        let (c, _) = gadget_even_ising(0.3).unwrap();
        let system = even_to_ising(&c, 1e-8).unwrap();
        assert_eq!(system.interactions.len(), 1);
        assert!((system.interactions[0].2 - 0.3).abs() < 1e-12);

        // two-edge series circuit: two interactions, Gibbs sum checked
        // internally by even_to_ising
        let series = Circuit::new(
            CircuitKind::Even,
            vec![0, 4],
            vec![1, 2, 3],
            vec![
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 0.5),
                Edge::new(2, 3, 0.25),
                Edge::new(3, 4, 1.0),
            ],
        )
        .unwrap();
        let system = even_to_ising(&series, 1e-8).unwrap();
        assert_eq!(system.interactions.len(), 2);

        // no internal edges: constant system
        let bare = Circuit::new(
            CircuitKind::Even,
            vec![0],
            vec![1],
            vec![Edge::new(0, 1, 1.0)],
        )
        .unwrap();
        let system = even_to_ising(&bare, 1e-8).unwrap();
        assert!(system.interactions.is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..40 {
            let k = rng.random_range(1..=3usize);
            let (n, m) = (rng.random_range(1..=4), rng.random_range(0..=6));
            let c = random_circuit(&mut rng, CircuitKind::Even, k, n, m);
            even_to_ising(&c, 1e-8).unwrap();
        }

        assert!(even_to_ising(&gadget_eq_match(), 1e-8).is_err());
    }

    #[test]
    fn realized_pbf_rejects_signed_spectra() {
        // A circuit whose implemented function is supported on odd
        // weights only: its inverse transform takes negative values.
        let c = Circuit::new(
            CircuitKind::Match,
            vec![0],
            vec![1],
            vec![Edge::new(0, 1, 1.0)],
        )
        .unwrap();
        let implemented = c.implemented_function().unwrap();
        assert_eq!(implemented.values(), &[0.0, 1.0]);
        let err = c.realized_pbf(DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NegativeRealization { .. }));
    }

    #[test]
    fn realized_match_circuits_are_in_sdp() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut accepted = 0;
        for _ in 0..120 {
            let k = rng.random_range(1..=4usize);
            let (n, m) = (rng.random_range(1..=6), rng.random_range(0..=8));
            let c = random_circuit(&mut rng, CircuitKind::Match, k, n, m);
            if let Ok(realized) = c.realized_pbf(DEFAULT_TOL) {
                accepted += 1;
                let sd = crate::membership::is_sd(&realized, DEFAULT_TOL);
                let p = crate::membership::is_p(&realized, DEFAULT_TOL).unwrap();
                let pn = crate::membership::is_pn(&realized, DEFAULT_TOL).unwrap();
                assert!(sd.holds && p.holds && pn.holds);
            }
        }
        assert!(accepted > 10);
    }
}
