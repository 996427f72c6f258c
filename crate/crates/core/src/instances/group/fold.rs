//! Stallings foldings of subgroups of a free group.
//!
//! Edges carry a label word over an auxiliary alphabet. Folding keeps the
//! invariant that reading a closed basepoint loop multiplies out, in label
//! order, to a word over the input generators that evaluates to the same
//! group element. Tracing a subgroup element therefore rewrites it in terms of
//! the generating set the graph was built from.

use std::collections::{BTreeMap, VecDeque};

use super::word::{gen_of, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Edge {
    src: usize,
    dst: usize,
    gen: usize,
    label: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FoldedGraph {
    vertices: usize,
    base: usize,
    edges: Vec<Edge>,
}

impl FoldedGraph {
    /// Folded core graph of the subgroup generated by `gens`, labelled so that
    /// [`FoldedGraph::trace`] returns words in the indices of `gens`.
    pub fn of(gens: &[Word]) -> Self {
        let mut g = Self::petals(gens);
        g.fold();
        g.core(true);
        g
    }

    /// The canonical form of the subgroup generated by `gens`: vertices in
    /// breadth-first order from the basepoint, tree edges unlabelled and
    /// the remaining edges labelled by their index in the canonical basis.
    pub fn canonical(gens: &[Word]) -> Self {
        Self::of(gens).canonicalized()
    }

    fn petals(gens: &[Word]) -> Self {
        let mut g = FoldedGraph {
            vertices: 1,
            base: 0,
            edges: Vec::new(),
        };
        for (j, w) in gens.iter().enumerate() {
            let ls = w.letters();
            if ls.is_empty() {
                continue;
            }
            let mut at = 0;
            for (k, &l) in ls.iter().enumerate() {
                let next = if k + 1 == ls.len() {
                    0
                } else {
                    g.vertices += 1;
                    g.vertices - 1
                };
                let label = if k == 0 {
                    Word::gen(j)
                } else {
                    Word::identity()
                };
                g.add(at, next, l, label);
                at = next;
            }
        }
        g
    }

    /// Add an edge reading letter `l` from `u` to `v` with label `label`.
    fn add(&mut self, u: usize, v: usize, l: Letter, label: Word) {
        let e = if l > 0 {
            Edge {
                src: u,
                dst: v,
                gen: gen_of(l),
                label,
            }
        } else {
            Edge {
                src: v,
                dst: u,
                gen: gen_of(l),
                label: label.inverse(),
            }
        };
        self.edges.push(e);
    }

    /// Signed letter, far endpoint and label when leaving `v` along edge `i`.
    fn leaving(&self, i: usize, v: usize) -> Vec<(Letter, usize, Word)> {
        let e = &self.edges[i];
        let l = e.gen as Letter + 1;
        let mut out = Vec::new();
        if e.src == v {
            out.push((l, e.dst, e.label.clone()));
        }
        if e.dst == v {
            out.push((-l, e.src, e.label.inverse()));
        }
        out
    }

    fn find_fold(&self) -> Option<(usize, Letter, usize, usize)> {
        let mut seen: BTreeMap<(usize, Letter), usize> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            let l = e.gen as Letter + 1;
            for key in [(e.src, l), (e.dst, -l)] {
                if let Some(&j) = seen.get(&key) {
                    if j != i {
                        return Some((key.0, key.1, j, i));
                    }
                } else {
                    seen.insert(key, i);
                }
            }
        }
        None
    }

    fn fold(&mut self) {
        while let Some((v, l, i1, i2)) = self.find_fold() {
            let (_, u1, lab1) = self
                .leaving(i1, v)
                .into_iter()
                .find(|x| x.0 == l)
                .expect("edge leaves v");
            let (_, u2, lab2) = self
                .leaving(i2, v)
                .into_iter()
                .find(|x| x.0 == l)
                .expect("edge leaves v");
            if u1 == u2 {
                self.edges.remove(i2);
                continue;
            }
            // Eliminate a non-basepoint endpoint after gauging it so both labels agree.
            let (w, lab_w, other, lab_o, drop) = if u2 != self.base {
                (u2, lab2, u1, lab1, i2)
            } else {
                (u1, lab1, u2, lab2, i1)
            };
            let t = lab_w.inverse().mul(&lab_o);
            let tinv = t.inverse();
            for e in &mut self.edges {
                let mut lab = e.label.clone();
                if e.src == w {
                    lab = tinv.mul(&lab);
                }
                if e.dst == w {
                    lab = lab.mul(&t);
                }
                e.label = lab;
            }
            for e in &mut self.edges {
                if e.src == w {
                    e.src = other;
                }
                if e.dst == w {
                    e.dst = other;
                }
            }
            self.edges.remove(drop);
            self.compact();
        }
    }

    fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.src == v) as usize + (e.dst == v) as usize)
            .sum()
    }

    /// Drop hanging trees; with `keep_base` the basepoint is never removed.
    fn core(&mut self, keep_base: bool) {
        loop {
            let hanging =
                (0..self.vertices).find(|&v| (v != self.base || !keep_base) && self.degree(v) == 1);
            match hanging {
                Some(v) => self.edges.retain(|e| e.src != v && e.dst != v),
                None => break,
            }
        }
        self.compact();
    }

    /// Renumber so that only vertices incident to an edge, plus the basepoint, remain.
    fn compact(&mut self) {
        let mut used = vec![false; self.vertices];
        used[self.base] = true;
        for e in &self.edges {
            used[e.src] = true;
            used[e.dst] = true;
        }
        let mut map = vec![usize::MAX; self.vertices];
        let mut next = 0;
        for v in 0..self.vertices {
            if used[v] {
                map[v] = next;
                next += 1;
            }
        }
        for e in &mut self.edges {
            e.src = map[e.src];
            e.dst = map[e.dst];
        }
        self.base = map[self.base];
        self.vertices = next;
    }

    fn step(&self, v: usize, l: Letter) -> Option<(usize, Word)> {
        self.edges
            .iter()
            .enumerate()
            .find_map(|(i, _)| self.leaving(i, v).into_iter().find(|x| x.0 == l))
            .map(|(_, u, lab)| (u, lab))
    }

    /// Read `w` from the basepoint. Returns the product of labels when the
    /// path closes up, i.e. exactly when `w` lies in the subgroup.
    pub fn trace(&self, w: &Word) -> Option<Word> {
        let mut at = self.base;
        let mut acc = Vec::new();
        for &l in w.letters() {
            let (next, lab) = self.step(at, l)?;
            acc.extend_from_slice(lab.letters());
            at = next;
        }
        (at == self.base).then(|| Word::new(acc))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.trace(w).is_some()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Rank of the subgroup: edges minus vertices plus one.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices
    }

    /// `(src, dst, generator)` triples, sorted.
    pub fn edge_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut t: Vec<_> = self.edges.iter().map(|e| (e.src, e.dst, e.gen)).collect();
        t.sort_unstable();
        t
    }

    /// Breadth-first spanning tree from the basepoint, exploring letters in
    /// the order `+1, -1, +2, -2, ...`. Returns the visiting order, the
    /// path word to each vertex and the indices of tree edges.
    fn bfs(&self) -> (Vec<usize>, Vec<Word>, Vec<bool>) {
        let max_gen = self.edges.iter().map(|e| e.gen + 1).max().unwrap_or(0);
        let mut order = vec![self.base];
        let mut path = vec![None; self.vertices];
        path[self.base] = Some(Word::identity());
        let mut tree = vec![false; self.edges.len()];
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for g in 0..max_gen {
                for l in [g as Letter + 1, -(g as Letter + 1)] {
                    for i in 0..self.edges.len() {
                        for (ll, u, _) in self.leaving(i, v) {
                            if ll == l && path[u].is_none() {
                                path[u] =
                                    Some(path[v].as_ref().expect("visited").mul(&Word::new([l])));
                                tree[i] = true;
                                order.push(u);
                                queue.push_back(u);
                            }
                        }
                    }
                }
            }
        }
        (
            order,
            path.into_iter().map(|p| p.unwrap_or_default()).collect(),
            tree,
        )
    }

    fn canonicalized(&self) -> Self {
        let (order, _, tree) = self.bfs();
        let mut rank = vec![0; self.vertices];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        let mut tree_edges = Vec::new();
        let mut other = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let t = (rank[e.src], rank[e.dst], e.gen);
            if tree[i] {
                tree_edges.push(t);
            } else {
                other.push(t);
            }
        }
        other.sort_unstable();
        tree_edges.sort_unstable();
        let mut edges: Vec<Edge> = tree_edges
            .into_iter()
            .map(|(s, d, g)| Edge {
                src: s,
                dst: d,
                gen: g,
                label: Word::identity(),
            })
            .collect();
        edges.extend(other.into_iter().enumerate().map(|(j, (s, d, g))| Edge {
            src: s,
            dst: d,
            gen: g,
            label: Word::gen(j),
        }));
        FoldedGraph {
            vertices: order.len(),
            base: 0,
            edges,
        }
    }

    /// Free basis read off a canonical graph: one generator per non-tree edge,
    /// in label order. Tracing an element yields its coordinates in this basis.
    pub fn schreier_basis(&self) -> Vec<Word> {
        let (_, path, _) = self.bfs();
        let mut basis: Vec<(usize, Word)> = self
            .edges
            .iter()
            .filter(|e| !e.label.is_empty())
            .map(|e| {
                let w = path[e.src]
                    .mul(&Word::gen(e.gen))
                    .mul(&path[e.dst].inverse());
                (gen_of(e.label.letters()[0]), w)
            })
            .collect();
        basis.sort();
        basis.into_iter().map(|(_, w)| w).collect()
    }

    /// Fiber product at the basepoint pair, cored. Both graphs must be canonical;
    /// the result is canonical.
    pub fn intersect(&self, other: &FoldedGraph) -> FoldedGraph {
        let mut index: BTreeMap<(usize, usize), usize> =
            BTreeMap::from([((self.base, other.base), 0)]);
        let mut queue = VecDeque::from([(self.base, other.base)]);
        let mut edges = Vec::new();
        while let Some((a, b)) = queue.pop_front() {
            let from = index[&(a, b)];
            for e in &self.edges {
                for f in other.edges.iter().filter(|f| f.gen == e.gen) {
                    let (near, far) = if (e.src, f.src) == (a, b) {
                        ((e.dst, f.dst), true)
                    } else if (e.dst, f.dst) == (a, b) {
                        ((e.src, f.src), false)
                    } else {
                        continue;
                    };
                    let fresh = index.len();
                    let to = *index.entry(near).or_insert_with(|| {
                        queue.push_back(near);
                        fresh
                    });
                    // Record each product edge once, from its source.
                    if far {
                        edges.push(Edge {
                            src: from,
                            dst: to,
                            gen: e.gen,
                            label: Word::identity(),
                        });
                    }
                }
            }
        }
        let mut g = FoldedGraph {
            vertices: index.len(),
            base: 0,
            edges,
        };
        g.core(true);
        g.canonicalized()
    }

    /// Vertices of the cyclic core: the graph with hanging trees pruned from
    /// every vertex, basepoint included. Used as the Whitehead complexity.
    pub fn cyclic_core(&self) -> FoldedGraph {
        let mut g = self.clone();
        g.core(false);
        g
    }

    /// A word from the basepoint to a vertex lying on the cyclic core, and the
    /// generators labelling loops there, when the cyclic core is a rose.
    pub fn rose_at(&self) -> Option<(Word, Vec<usize>)> {
        let mut g = self.clone();
        loop {
            let hanging = (0..g.vertices).find(|&v| v != g.base && g.degree(v) == 1);
            match hanging {
                Some(v) => g.edges.retain(|e| e.src != v && e.dst != v),
                None => break,
            }
        }
        let loops: Vec<&Edge> = g.edges.iter().filter(|e| e.src == e.dst).collect();
        let v = match loops.first() {
            Some(e) => e.src,
            None => return g.edges.is_empty().then(|| (Word::identity(), Vec::new())),
        };
        if loops.iter().any(|e| e.src != v) {
            return None;
        }
        // Everything except the loops at v must be a path from the basepoint.
        if g.edges.len() - loops.len() + 1 != g.vertex_count_touched() {
            return None;
        }
        let (_, path, _) = g.bfs();
        let mut gens: Vec<usize> = loops.iter().map(|e| e.gen).collect();
        gens.sort_unstable();
        Some((path[v].clone(), gens))
    }

    fn vertex_count_touched(&self) -> usize {
        let mut vs: Vec<usize> = self.edges.iter().flat_map(|e| [e.src, e.dst]).collect();
        vs.push(self.base);
        vs.sort_unstable();
        vs.dedup();
        vs.len()
    }
}

/// Rewrite `w` as a word in the indices of `gens`, when it lies in their span.
pub fn rewrite(gens: &[Word], w: &Word) -> Option<Word> {
    FoldedGraph::of(gens).trace(w)
}

#[cfg(test)]
mod tests {
    use super::super::word::w;
    use super::*;

    #[test]
    fn standard_generator_is_a_loop() {
        let g = FoldedGraph::canonical(&[w("a")]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_triples(), vec![(0, 0, 0)]);
    }

    #[test]
    fn square_is_a_two_cycle() {
        let g = FoldedGraph::canonical(&[w("aa")]);
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 2));
        assert!(!g.contains(&w("a")));
        assert!(g.contains(&w("aa")));
        assert!(g.contains(&w("AAAA")));
    }

    #[test]
    fn rose_is_everything() {
        let g = FoldedGraph::canonical(&[w("a"), w("b")]);
        assert_eq!(g.rank(), 2);
        assert!(g.contains(&w("abABBa")));
    }

    #[test]
    fn rewriting_recovers_products() {
        let gens = [w("ab"), w("bb"), w("aB")];
        for target in [w("abbb"), w("BBBA"), w("aBab"), w("abaB")] {
            let coords = rewrite(&gens, &target).expect("member");
            assert_eq!(coords.substitute(&gens), target, "{coords}");
        }
        assert!(rewrite(&gens, &w("a")).is_none());
    }

    #[test]
    fn schreier_basis_spans_the_subgroup() {
        let gens = [w("abA"), w("bb"), w("aab")];
        let g = FoldedGraph::canonical(&gens);
        let basis = g.schreier_basis();
        assert_eq!(FoldedGraph::canonical(&basis), g);
        for x in &gens {
            let c = g.trace(x).expect("member");
            assert_eq!(c.substitute(&basis), *x);
        }
    }

    #[test]
    fn fiber_product_intersections() {
        let ab = FoldedGraph::canonical(&[w("a"), w("b")]);
        let bc = FoldedGraph::canonical(&[w("b"), w("c")]);
        assert_eq!(ab.intersect(&bc), FoldedGraph::canonical(&[w("b")]));
        assert_eq!(ab.intersect(&ab), ab);
        let a = FoldedGraph::canonical(&[w("a")]);
        let b = FoldedGraph::canonical(&[w("b")]);
        assert_eq!(a.intersect(&b).rank(), 0);
    }
}
