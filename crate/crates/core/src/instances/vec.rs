//! Finite-dimensional vector spaces over GF(p), ordered by subspace.
//!
//! A model is a subspace of some ambient `GF(p)^n`, stored as its reduced
//! row-echelon basis, which is the canonical form. Elements are coordinate
//! vectors of the ambient.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::class::{
    check_embedding, image, is_commutative_square, restrict, AmalgamDiagram, ClassInstance,
    Diagram, IsoVerdict, KEmbedding, Span, SpanOf,
};
use crate::error::{Error, Result};
use crate::indep::{GaloisTypes, TypeOf};
use crate::notion::Notion;
use crate::pregeom::ClosureSystem;
use crate::seqamal::{piece_images, Cert, MuWitness};
use crate::uniqueness::Separation;

/// Largest ambient cardinality `p^n` the enumerators accept.
pub const ENUM_LIMIT: u64 = 1 << 16;

pub type Vector = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Subspace {
    pub p: u8,
    pub n: usize,
    pub rows: Vec<Vector>,
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..p)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

fn inv_mod(a: u8, p: u8) -> u8 {
    (1..p)
        .find(|&b| (a as u16 * b as u16) % p as u16 == 1)
        .expect("nonzero residue")
}

/// `dst += c * src` over GF(p).
fn axpy(dst: &mut [u8], c: u8, src: &[u8], p: u8) {
    if c == 0 {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d = ((*d as u16 + c as u16 * *s as u16) % p as u16) as u8;
    }
}

fn neg(c: u8, p: u8) -> u8 {
    (p - c % p) % p
}

/// Row-reduce in place; returns pivot columns.
fn rref_in_place(rows: &mut Vec<Vector>, p: u8) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = ((*x as u16 * inv as u16) % p as u16) as u8;
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && row[c] != 0 {
                let c0 = neg(row[c], p);
                axpy(row, c0, &pivot_row, p);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

impl Subspace {
    pub fn zero(p: u8, n: usize) -> Self {
        Subspace {
            p,
            n,
            rows: Vec::new(),
        }
    }

    pub fn whole(p: u8, n: usize) -> Self {
        Subspace {
            p,
            n,
            rows: (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero row"))
            .collect()
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[u8]) -> Option<Vec<u8>> {
        let coeffs: Vec<u8> = self.pivots().iter().map(|&c| v[c]).collect();
        let mut w = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&coeffs) {
            axpy(&mut w, neg(c, self.p), row, self.p);
        }
        w.iter().all(|&x| x == 0).then_some(coeffs)
    }

    pub fn contains_vec(&self, v: &[u8]) -> bool {
        v.len() == self.n && self.coords(v).is_some()
    }

    pub fn is_sub(&self, other: &Subspace) -> bool {
        self.p == other.p && self.n == other.n && self.rows.iter().all(|r| other.contains_vec(r))
    }

    /// Every vector of the subspace, in coefficient order.
    pub fn elements(&self) -> Vec<Vector> {
        let k = self.dim();
        let total = (self.p as usize).pow(k as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = vec![0u8; self.n];
                for row in &self.rows {
                    axpy(&mut v, (idx % self.p as usize) as u8, row, self.p);
                    idx /= self.p as usize;
                }
                v
            })
            .collect()
    }

    fn cardinality(&self) -> u64 {
        (self.p as u64).saturating_pow(self.n as u32)
    }
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Reduced row-echelon form of the row space of `rows`.
pub fn canonicalize(p: u8, n: usize, rows: &[Vector]) -> Result<Subspace> {
    if !is_prime(p as u32) {
        return Err(Error::ZeroCharacteristic(p as u32));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::AmbientMismatch(format!(
            "row of length {} in GF({p})^{n}",
            r.len()
        )));
    }
    let mut m: Vec<Vector> = rows
        .iter()
        .map(|r| r.iter().map(|x| x % p).collect())
        .collect();
    rref_in_place(&mut m, p);
    Ok(Subspace { p, n, rows: m })
}

fn same_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.p != b.p || a.n != b.n {
        return Err(Error::AmbientMismatch(format!(
            "GF({})^{} vs GF({})^{}",
            a.p, a.n, b.p, b.n
        )));
    }
    Ok(())
}

pub fn sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    same_ambient(a, b)?;
    let rows: Vec<Vector> = a.rows.iter().chain(&b.rows).cloned().collect();
    canonicalize(a.p, a.n, &rows)
}

/// Intersection by the Zassenhaus block reduction.
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    same_ambient(a, b)?;
    let n = a.n;
    let mut m: Vec<Vector> = a
        .rows
        .iter()
        .map(|r| r.iter().chain(r.iter()).copied().collect())
        .chain(
            b.rows
                .iter()
                .map(|r| r.iter().copied().chain(std::iter::repeat_n(0, n)).collect()),
        )
        .collect();
    rref_in_place(&mut m, a.p);
    let rows: Vec<Vector> = m
        .into_iter()
        .filter(|r| r[..n].iter().all(|&x| x == 0))
        .map(|r| r[n..].to_vec())
        .collect();
    canonicalize(a.p, n, &rows)
}

pub fn rank(p: u8, vs: &[Vector]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let mut m = vs.to_vec();
    rref_in_place(&mut m, p).len()
}

/// All echelon matrices with `k` rows over `q` columns.
fn echelon_forms(p: u8, q: usize, k: usize) -> Vec<Vec<Vector>> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    fn choose(q: usize, k: usize, start: usize, cur: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            acc.push(cur.clone());
            return;
        }
        for c in start..q {
            cur.push(c);
            choose(q, k, c + 1, cur, acc);
            cur.pop();
        }
    }
    let mut pivot_sets = Vec::new();
    choose(q, k, 0, &mut pivots, &mut pivot_sets);
    for ps in pivot_sets {
        // free slots: (row i, column c) with c > ps[i] and c not a pivot
        let slots: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let ps = ps.clone();
                (ps[i] + 1..q)
                    .filter(move |c| !ps.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let total = (p as usize).pow(slots.len() as u32);
        for mut idx in 0..total {
            let mut rows = vec![vec![0u8; q]; k];
            for (i, &c) in ps.iter().enumerate() {
                rows[i][c] = 1;
            }
            for &(i, c) in &slots {
                rows[i][c] = (idx % p as usize) as u8;
                idx /= p as usize;
            }
            out.push(rows);
        }
    }
    out
}

/// Every subspace `s` with `containing <= s <= n`, each once, in lexicographic echelon order.
pub fn enumerate_subspaces(n: &Subspace, containing: &Subspace) -> Result<Vec<Subspace>> {
    same_ambient(n, containing)?;
    if n.cardinality() > ENUM_LIMIT {
        return Err(Error::TooLarge {
            size: n.cardinality(),
            limit: ENUM_LIMIT,
        });
    }
    if !containing.is_sub(n) {
        return Ok(Vec::new());
    }
    let comp = complement_basis(containing, n);
    let q = comp.len();
    let mut out = Vec::new();
    for k in 0..=q {
        for form in echelon_forms(n.p, q, k) {
            let mut rows = containing.rows.clone();
            for coeffs in &form {
                let mut v = vec![0u8; n.n];
                for (c, w) in coeffs.iter().zip(&comp) {
                    axpy(&mut v, *c, w, n.p);
                }
                rows.push(v);
            }
            out.push(canonicalize(n.p, n.n, &rows)?);
        }
    }
    out.sort();
    Ok(out)
}

/// Rows of `n` that extend a basis of `m` to one of `n`, greedily in echelon order.
pub fn complement_basis(m: &Subspace, n: &Subspace) -> Vec<Vector> {
    let mut acc = m.rows.clone();
    let mut out = Vec::new();
    let mut r = rank(m.p, &acc);
    for row in &n.rows {
        acc.push(row.clone());
        let r2 = rank(m.p, &acc);
        if r2 > r {
            out.push(row.clone());
            r = r2;
        } else {
            acc.pop();
        }
    }
    out
}

/// Pivot completion: `m0` plus the rows of `n` completing a basis of `m1`.
pub fn pivot_complement(m0: &Subspace, m1: &Subspace, n: &Subspace) -> Result<Subspace> {
    let extra = complement_basis(m1, n);
    let rows: Vec<Vector> = m0.rows.iter().cloned().chain(extra).collect();
    canonicalize(n.p, n.n, &rows)
}

/// `g1[m1] ∩ g2[m2] = g1[m0]` and `g1[m1] + g2[m2] = n`, on already-computed images.
pub fn direct_sum_condition(a0: &Subspace, a1: &Subspace, a2: &Subspace, n: &Subspace) -> bool {
    matches!(intersect(a1, a2), Ok(ref i) if i == a0) && matches!(sum(a1, a2), Ok(ref s) if s == n)
}

/// The class of subspaces of `GF(p)^n` for small primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VecSpace {
    pub p: u8,
}

impl Default for VecSpace {
    fn default() -> Self {
        VecSpace { p: 2 }
    }
}

impl VecSpace {
    pub fn new(p: u8) -> Result<Self> {
        if !is_prime(p as u32) {
            return Err(Error::ZeroCharacteristic(p as u32));
        }
        Ok(VecSpace { p })
    }

    pub fn whole(&self, n: usize) -> Subspace {
        Subspace::whole(self.p, n)
    }

    pub fn zero(&self, n: usize) -> Subspace {
        Subspace::zero(self.p, n)
    }

    pub fn span(&self, n: usize, rows: &[Vector]) -> Subspace {
        canonicalize(self.p, n, rows).expect("valid ambient")
    }

    /// Images of generators of `dom` under the map sending `basis[i] -> targets[i]`
    /// where `basis` is any basis of `dom`.
    fn images_from_basis(
        &self,
        dom: &Subspace,
        basis: &[Vector],
        targets: &[Vector],
        cod_n: usize,
    ) -> Vec<Vector> {
        // express each echelon row of dom in terms of `basis`
        let k = basis.len();
        dom.rows
            .iter()
            .map(|g| {
                let coeffs = solve(self.p, basis, g).expect("basis spans domain");
                let mut v = vec![0u8; cod_n];
                for i in 0..k {
                    axpy(&mut v, coeffs[i], &targets[i], self.p);
                }
                v
            })
            .collect()
    }

    /// Independent vectors of `n` extending `fixed`, enumerated by backtracking.
    fn extend_independent(
        &self,
        n: &Subspace,
        fixed: &[Vector],
        count: usize,
        bound: usize,
    ) -> Vec<Vec<Vector>> {
        let elems = n.elements();
        let mut out = Vec::new();
        let mut cur: Vec<Vector> = Vec::new();
        fn rec(
            p: u8,
            elems: &[Vector],
            fixed: &[Vector],
            count: usize,
            bound: usize,
            cur: &mut Vec<Vector>,
            out: &mut Vec<Vec<Vector>>,
        ) {
            if out.len() >= bound {
                return;
            }
            if cur.len() == count {
                out.push(cur.clone());
                return;
            }
            for e in elems {
                let mut all: Vec<Vector> = fixed.iter().chain(cur.iter()).cloned().collect();
                let before = all.len();
                all.push(e.clone());
                if rank(p, &all) == before + 1 {
                    cur.push(e.clone());
                    rec(p, elems, fixed, count, bound, cur, out);
                    cur.pop();
                    if out.len() >= bound {
                        return;
                    }
                }
            }
        }
        rec(self.p, &elems, fixed, count, bound, &mut cur, &mut out);
        out
    }

    fn random_independent(
        &self,
        rng: &mut ChaCha8Rng,
        within: &Subspace,
        count: usize,
    ) -> Vec<Vector> {
        let mut out: Vec<Vector> = Vec::new();
        while out.len() < count {
            let mut v = vec![0u8; within.n];
            for row in &within.rows {
                axpy(&mut v, rng.gen_range(0..self.p), row, self.p);
            }
            let mut all = out.clone();
            all.push(v.clone());
            if rank(self.p, &all) == out.len() + 1 {
                out.push(v);
            }
        }
        out
    }
}

/// Coefficients `c` with `sum c_i basis_i = v`, if any.
pub fn solve(p: u8, basis: &[Vector], v: &[u8]) -> Option<Vec<u8>> {
    let k = basis.len();
    let n = v.len();
    // augmented system: columns are basis vectors
    let mut rows: Vec<Vector> = (0..n)
        .map(|j| {
            let mut r: Vector = basis.iter().map(|b| b[j]).collect();
            r.push(v[j]);
            r
        })
        .collect();
    if rows.is_empty() {
        return Some(vec![0; k]);
    }
    let pivots = rref_in_place(&mut rows, p);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![0u8; k];
    for (row, &col) in rows.iter().zip(&pivots) {
        c[col] = row[k];
    }
    Some(c)
}

impl ClassInstance for VecSpace {
    type Model = Subspace;
    type Element = Vector;

    fn tag(&self) -> String {
        format!("vec-gf{}", self.p)
    }

    fn size(&self, m: &Subspace) -> usize {
        m.dim()
    }

    fn generators(&self, m: &Subspace) -> Vec<Vector> {
        m.rows.clone()
    }

    fn contains(&self, m: &Subspace, x: &Vector) -> bool {
        m.contains_vec(x)
    }

    fn elements(&self, m: &Subspace, bound: usize) -> Vec<Vector> {
        if m.cardinality() > ENUM_LIMIT {
            return Vec::new();
        }
        m.elements().into_iter().take(bound).collect()
    }

    fn is_subset(&self, m: &Subspace, n: &Subspace) -> bool {
        m.is_sub(n)
    }

    fn is_strong_sub(&self, m: &Subspace, n: &Subspace) -> bool {
        m.is_sub(n)
    }

    fn span_in(&self, n: &Subspace, a: &[Vector]) -> Result<Subspace> {
        let s = canonicalize(n.p, n.n, a)?;
        if !s.is_sub(n) {
            return Err(Error::PreconditionViolated(
                "generators outside the ambient model".into(),
            ));
        }
        Ok(s)
    }

    fn substructures(&self, n: &Subspace, containing: &Subspace) -> Result<Vec<Subspace>> {
        enumerate_subspaces(n, containing)
    }

    fn intersect(&self, a: &Subspace, b: &Subspace) -> Option<Subspace> {
        intersect(a, b).ok()
    }

    fn apply(&self, e: &KEmbedding<Subspace, Vector>, x: &Vector) -> Vector {
        let coeffs = e.dom.coords(x).expect("argument lies in the domain");
        let mut v = vec![0u8; e.cod.n];
        for (c, img) in coeffs.iter().zip(&e.images) {
            axpy(&mut v, *c, img, self.p);
        }
        v
    }

    fn is_valid_map(&self, dom: &Subspace, cod: &Subspace, images: &[Vector]) -> bool {
        images.len() == dom.dim()
            && dom.p == self.p
            && cod.p == self.p
            && images.iter().all(|v| cod.contains_vec(v))
            && rank(self.p, images) == images.len()
    }

    fn embeddings(
        &self,
        m: &Subspace,
        n: &Subspace,
        pinned: &[(Vector, Vector)],
        bound: usize,
    ) -> Vec<Vec<Vector>> {
        if m.dim() > n.dim() || bound == 0 || n.cardinality() > ENUM_LIMIT {
            return Vec::new();
        }
        // independent pinned sources with their targets
        let mut src: Vec<Vector> = Vec::new();
        let mut dst: Vec<Vector> = Vec::new();
        for (x, y) in pinned {
            if !m.contains_vec(x) || !n.contains_vec(y) {
                return Vec::new();
            }
            match solve(self.p, &src, x) {
                Some(c) => {
                    let mut img = vec![0u8; n.n];
                    for (ci, d) in c.iter().zip(&dst) {
                        axpy(&mut img, *ci, d, self.p);
                    }
                    if &img != y {
                        return Vec::new();
                    }
                }
                None => {
                    src.push(x.clone());
                    dst.push(y.clone());
                }
            }
        }
        if rank(self.p, &dst) != dst.len() {
            return Vec::new();
        }
        let free = complement_basis(&canonicalize(self.p, m.n, &src).expect("ambient"), m);
        let basis: Vec<Vector> = src.iter().cloned().chain(free.iter().cloned()).collect();
        self.extend_independent(n, &dst, free.len(), bound)
            .into_iter()
            .map(|ext| {
                let targets: Vec<Vector> = dst.iter().cloned().chain(ext).collect();
                self.images_from_basis(m, &basis, &targets, n.n)
            })
            .collect()
    }

    fn iso_search(
        &self,
        m: &Subspace,
        n: &Subspace,
        pinned: &[(Vector, Vector)],
    ) -> IsoVerdict<Vector> {
        if m.dim() != n.dim() {
            return IsoVerdict::Absent {
                reason: format!("dimension {} vs {}", m.dim(), n.dim()),
            };
        }
        match self.embeddings(m, n, pinned, 1).into_iter().next() {
            Some(images) => IsoVerdict::Found(images),
            None => IsoVerdict::Absent {
                reason: "pinned values admit no linear extension".into(),
            },
        }
    }

    fn isomorphisms_from(
        &self,
        m: &Subspace,
        bound: usize,
        seed: u64,
    ) -> Vec<KEmbedding<Subspace, Vector>> {
        let mut out = vec![KEmbedding {
            dom: m.clone(),
            cod: m.clone(),
            images: m.rows.clone(),
        }];
        let ambient = Subspace::whole(self.p, m.n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        seen.insert((m.clone(), m.rows.clone()));
        let mut attempts = 0;
        while out.len() < bound && attempts < bound * 8 {
            attempts += 1;
            let basis = self.random_independent(&mut rng, &ambient, m.dim());
            let target = self.span(m.n, &basis);
            let mut images = basis.clone();
            images.shuffle(&mut rng);
            if seen.insert((target.clone(), images.clone())) {
                out.push(KEmbedding {
                    dom: m.clone(),
                    cod: target,
                    images,
                });
            }
        }
        out
    }

    fn superstructures(&self, n: &Subspace) -> Vec<Subspace> {
        enumerate_subspaces(&Subspace::whole(self.p, n.n), n).unwrap_or_else(|_| vec![n.clone()])
    }

    fn prime_minimal(&self, ambient: &Subspace) -> Option<Subspace> {
        Some(Subspace::zero(ambient.p, ambient.n))
    }

    fn describe(&self, m: &Subspace) -> String {
        format!("dim={}", m.dim())
    }
}

/// Amalgams that are internal direct sums: `g1[m1] ∩ g2[m2] = g1[m0]` and
/// `g1[m1] + g2[m2] = n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DirectSum;

impl DirectSum {
    /// Images of `g1[m0]`, `g1[m1]`, `g2[m2]`, if the maps are well formed.
    fn images(v: &VecSpace, d: &Diagram<VecSpace>) -> Option<(Subspace, Subspace, Subspace)> {
        let a0 = image(v, &restrict(v, &d.g1, &d.span.m0)).ok()?;
        let a1 = image(v, &d.g1).ok()?;
        let a2 = image(v, &d.g2).ok()?;
        Some((a0, a1, a2))
    }
}

impl Notion<VecSpace> for DirectSum {
    fn name(&self) -> String {
        "direct-sum".into()
    }

    fn is_amalgam(&self, v: &VecSpace, d: &Diagram<VecSpace>) -> bool {
        if !is_commutative_square(v, d) {
            return false;
        }
        matches!(Self::images(v, d), Some((a0, a1, a2)) if direct_sum_condition(&a0, &a1, &a2, &d.n))
    }

    /// `n` is spanned by the first `d1 + d2 - d0` unit vectors of an ambient one
    /// dimension larger, so that proper superstructures exist.
    fn construct(&self, v: &VecSpace, s: &SpanOf<VecSpace>) -> Result<Diagram<VecSpace>> {
        let (d0, d1, d2) = (s.m0.dim(), s.m1.dim(), s.m2.dim());
        if !s.m0.is_sub(&s.m1) || !check_embedding(v, &s.f)? || s.f.dom != s.m0 || s.f.cod != s.m2 {
            return Err(Error::PreconditionViolated("malformed span".into()));
        }
        let d = d1 + d2 - d0;
        let amb = d + 1;
        let n = v.span(amb, &(0..d).map(|i| unit(amb, i)).collect::<Vec<_>>());

        let basis1: Vec<Vector> =
            s.m0.rows
                .iter()
                .cloned()
                .chain(complement_basis(&s.m0, &s.m1))
                .collect();
        let targets1: Vec<Vector> = (0..d1).map(|i| unit(amb, i)).collect();
        let g1 = KEmbedding {
            dom: s.m1.clone(),
            cod: n.clone(),
            images: v.images_from_basis(&s.m1, &basis1, &targets1, amb),
        };

        let fb0: Vec<Vector> = s.m0.rows.iter().map(|x| v.apply(&s.f, x)).collect();
        let f_img = canonicalize(v.p, s.m2.n, &fb0)?;
        let basis2: Vec<Vector> = fb0
            .into_iter()
            .chain(complement_basis(&f_img, &s.m2))
            .collect();
        let targets2: Vec<Vector> = (0..d0).chain(d1..d).map(|i| unit(amb, i)).collect();
        let g2 = KEmbedding {
            dom: s.m2.clone(),
            cod: n.clone(),
            images: v.images_from_basis(&s.m2, &basis2, &targets2, amb),
        };

        Ok(AmalgamDiagram {
            span: s.clone(),
            n,
            g1,
            g2,
        })
    }

    fn inclusion_candidate(
        &self,
        _v: &VecSpace,
        _m0: &Subspace,
        m1: &Subspace,
        m2: &Subspace,
        _n: &Subspace,
    ) -> Option<Subspace> {
        sum(m1, m2).ok()
    }

    fn decompose(
        &self,
        _v: &VecSpace,
        m0: &Subspace,
        m1: &Subspace,
        n: &Subspace,
    ) -> Result<Subspace> {
        if !(m0.is_sub(m1) && m1.is_sub(n)) {
            return Err(Error::PreconditionViolated(
                "decompose needs m0 <= m1 <= n".into(),
            ));
        }
        pivot_complement(m0, m1, n)
    }
}

/// `g1[m1] ∩ g2[m2] = g1[m0]` and `g1[m1] + g2[m2] = n`.
pub fn is_direct_amalgam(v: &VecSpace, d: &Diagram<VecSpace>) -> bool {
    DirectSum.is_amalgam(v, d)
}

/// Linear span.
impl ClosureSystem for VecSpace {
    fn closure(&self, m: &Subspace, a: &[Vector]) -> Result<Subspace> {
        self.span_in(m, a)
    }
}

/// Every span `(m0 <= m1, f: m0 -> m2)` with all three inside `GF(p)^ambient`
/// and `dim m1 + dim m2 - dim m0 <= max_apex`.
pub fn all_spans(v: &VecSpace, ambient: usize, max_apex: usize) -> Result<Vec<SpanOf<VecSpace>>> {
    let subs = enumerate_subspaces(&v.whole(ambient), &v.zero(ambient))?;
    let mut out = Vec::new();
    for m1 in &subs {
        for m0 in enumerate_subspaces(m1, &v.zero(ambient))? {
            for m2 in &subs {
                if m1.dim() + m2.dim() > max_apex + m0.dim() {
                    continue;
                }
                for images in v.embeddings(&m0, m2, &[], usize::MAX) {
                    let f = KEmbedding {
                        dom: m0.clone(),
                        cod: m2.clone(),
                        images,
                    };
                    out.push(Span {
                        m0: m0.clone(),
                        m1: m1.clone(),
                        m2: m2.clone(),
                        f,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Every diagram with apex `GF(p)^k`, `k <= max_apex`, up to isomorphism of
/// the span and automorphisms of the apex: the span is coordinate, `g1` is the
/// coordinate inclusion and `g2` ranges over all commuting embeddings.
pub fn canonical_diagrams(v: &VecSpace, max_apex: usize) -> Vec<Diagram<VecSpace>> {
    let mut out = Vec::new();
    for k in 0..=max_apex {
        let n = v.whole(k);
        for d1 in 0..=k {
            let m1 = v.whole(d1);
            let g1 = KEmbedding {
                dom: m1.clone(),
                cod: n.clone(),
                images: (0..d1).map(|i| unit(k, i)).collect(),
            };
            for d2 in 0..=k {
                let m2 = v.whole(d2);
                for d0 in 0..=d1.min(d2) {
                    let m0 = v.span(d1, &(0..d0).map(|i| unit(d1, i)).collect::<Vec<_>>());
                    let f = KEmbedding {
                        dom: m0.clone(),
                        cod: m2.clone(),
                        images: (0..d0).map(|i| unit(d2, i)).collect(),
                    };
                    let pinned: Vec<_> = (0..d0).map(|i| (unit(d2, i), unit(k, i))).collect();
                    let span = Span {
                        m0,
                        m1: m1.clone(),
                        m2: m2.clone(),
                        f,
                    };
                    for images in v.embeddings(&m2, &n, &pinned, usize::MAX) {
                        let g2 = KEmbedding {
                            dom: m2.clone(),
                            cod: n.clone(),
                            images,
                        };
                        out.push(AmalgamDiagram {
                            span: span.clone(),
                            n: n.clone(),
                            g1: g1.clone(),
                            g2,
                        });
                    }
                }
            }
        }
    }
    out
}

/// A seeded random span inside `GF(p)^ambient`.
pub fn random_span(v: &VecSpace, rng: &mut ChaCha8Rng, ambient: usize) -> SpanOf<VecSpace> {
    let d1 = rng.gen_range(0..=ambient);
    let m1 = random_subspace(v, rng, ambient, d1);
    let d0 = rng.gen_range(0..=d1);
    let basis0 = v.random_independent(rng, &m1, d0);
    let m0 = v.span(ambient, &basis0);
    let d2 = rng.gen_range(d0..=ambient);
    let m2 = random_subspace(v, rng, ambient, d2);
    let targets = v.random_independent(rng, &m2, d0);
    let images = v.images_from_basis(&m0, &basis0, &targets, ambient);
    let f = KEmbedding {
        dom: m0.clone(),
        cod: m2.clone(),
        images,
    };
    Span { m0, m1, m2, f }
}

/// Linear relations `c` with `sum c_i v_i = 0`, as a subspace of `GF(p)^len`.
pub fn relations(p: u8, vs: &[Vector]) -> Subspace {
    let k = vs.len();
    let width = vs.first().map_or(0, |v| v.len());
    let mut rows: Vec<Vector> = vs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut r = v.clone();
            r.extend(unit(k, i));
            r
        })
        .collect();
    rref_in_place(&mut rows, p);
    let kernel: Vec<Vector> = rows
        .into_iter()
        .filter(|r| r[..width].iter().all(|&c| c == 0))
        .map(|r| r[width..].to_vec())
        .collect();
    canonicalize(p, k, &kernel).expect("prime field")
}

/// Two tuples have the same type over a common base iff they satisfy the same
/// linear relations together with a basis of the base.
impl GaloisTypes for VecSpace {
    fn gtype_equal(&self, p: &TypeOf<VecSpace>, q: &TypeOf<VecSpace>) -> Result<bool> {
        if p.base != q.base || p.tuple.len() != q.tuple.len() {
            return Err(Error::PreconditionViolated(
                "types must share base and length".into(),
            ));
        }
        let with_base =
            |t: &[Vector]| -> Vec<Vector> { t.iter().chain(&p.base.rows).cloned().collect() };
        Ok(relations(self.p, &with_base(&p.tuple)) == relations(self.p, &with_base(&q.tuple)))
    }
}

/// `μ` witness read off coordinates: `a` lies in the sub-amalgam of exactly the
/// pieces on which its coordinates modulo the base are nonzero.
pub fn coordinate_support(
    v: &VecSpace,
    cert: &Cert<VecSpace>,
    a: &Vector,
) -> Result<MuWitness<Subspace, Vector>> {
    if !cert.total.contains_vec(a) {
        return Err(Error::ElementOutsideTotal);
    }
    let base = &cert.resolution[0];
    let images = piece_images(v, cert)?;
    let mut basis = base.rows.clone();
    let mut owner = vec![None; basis.len()];
    for (i, piece) in images.iter().enumerate() {
        for row in complement_basis(base, piece) {
            basis.push(row);
            owner.push(Some(i));
        }
    }
    let coeffs = solve(v.p, &basis, a)
        .ok_or_else(|| Error::VerificationFailed("pieces do not span the total".into()))?;
    let mut support: Vec<usize> = coeffs
        .iter()
        .zip(&owner)
        .filter(|(c, _)| **c != 0)
        .filter_map(|(_, o)| *o)
        .collect();
    support.sort_unstable();
    support.dedup();
    let rows: Vec<Vector> = base
        .rows
        .iter()
        .chain(support.iter().flat_map(|&i| images[i].rows.iter()))
        .cloned()
        .collect();
    let sub_amalgam = canonicalize(v.p, base.n, &rows)?;
    Ok(MuWitness {
        element: a.clone(),
        subsequence: support,
        sub_amalgam,
    })
}

/// A uniformly chosen basis spanning a `dim`-dimensional subspace of `GF(p)^n`.
pub fn random_subspace(inst: &VecSpace, rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Subspace {
    let basis = inst.random_independent(rng, &Subspace::whole(inst.p, n), dim);
    inst.span(n, &basis)
}

impl Separation for VecSpace {}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vector {
        unit(n, i)
    }

    #[test]
    fn canonicalize_examples() {
        let m = canonicalize(2, 2, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(m.rows, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(canonicalize(2, 3, &[]).unwrap(), Subspace::zero(2, 3));
        let d = canonicalize(2, 3, &[e(3, 0), e(3, 0)]).unwrap();
        assert_eq!(d.rows, vec![e(3, 0)]);
        assert_eq!(canonicalize(4, 2, &[]), Err(Error::ZeroCharacteristic(4)));
    }

    #[test]
    fn intersect_examples() {
        let v = VecSpace::default();
        let a = v.span(3, &[e(3, 0), e(3, 1)]);
        let b = v.span(3, &[e(3, 1), e(3, 2)]);
        assert_eq!(intersect(&a, &b).unwrap(), v.span(3, &[e(3, 1)]));
        assert_eq!(intersect(&a, &a).unwrap(), a);
        let l1 = v.span(3, &[e(3, 0)]);
        let l2 = v.span(3, &[e(3, 1)]);
        assert_eq!(intersect(&l1, &l2).unwrap(), Subspace::zero(2, 3));
        assert!(intersect(&l1, &Subspace::zero(2, 2)).is_err());
    }

    #[test]
    fn enumerate_counts() {
        let v = VecSpace::default();
        assert_eq!(
            enumerate_subspaces(&v.whole(2), &v.zero(2)).unwrap().len(),
            5
        );
        let w3 = v.whole(3);
        assert_eq!(enumerate_subspaces(&w3, &w3).unwrap(), vec![w3.clone()]);
        let line = v.span(3, &[vec![1, 1, 0]]);
        assert_eq!(enumerate_subspaces(&w3, &line).unwrap().len(), 5);
        assert_eq!(
            enumerate_subspaces(&v.whole(4), &v.zero(4)).unwrap().len(),
            67
        );
        let g3 = VecSpace::new(3).unwrap();
        // 1 + 4 + 1 subspaces of GF(3)^2
        assert_eq!(
            enumerate_subspaces(&g3.whole(2), &g3.zero(2))
                .unwrap()
                .len(),
            6
        );
    }

    #[test]
    fn guard_rejects_large_ambients() {
        let big = Subspace::whole(2, 17);
        assert!(matches!(
            enumerate_subspaces(&big, &Subspace::zero(2, 17)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn embeddings_respect_pins() {
        let v = VecSpace::default();
        let w2 = v.whole(2);
        let all = v.embeddings(&w2, &w2, &[], 1000);
        assert_eq!(all.len(), 6); // |GL2(2)|
        let pinned = v.embeddings(&w2, &w2, &[(e(2, 0), vec![1, 1])], 1000);
        assert_eq!(pinned.len(), 2);
        assert!(pinned.iter().all(|imgs| imgs[0] == vec![1, 1]));
        let bad = v.embeddings(&w2, &w2, &[(e(2, 0), e(2, 1)), (e(2, 1), e(2, 1))], 10);
        assert!(bad.is_empty());
    }

    #[test]
    fn apply_linear() {
        let v = VecSpace::default();
        let dom = v.whole(2);
        let map = KEmbedding {
            dom,
            cod: v.whole(3),
            images: vec![e(3, 2), e(3, 0)],
        };
        assert_eq!(v.apply(&map, &vec![1, 1]), vec![1, 0, 1]);
    }
}
