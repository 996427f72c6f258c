//! Sequential amalgams over a base: building, re-assembly by inclusion,
//! subsequences, reordering, decomposition into small pieces and `μ` witnesses.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::class::{
    apply, compose, identity, image, inclusion, restrict, with_cod, AmalgamDiagram, ClassInstance,
    Diagram, KEmbedding, Span,
};
use crate::error::{Error, Result};
use crate::notion::{decompose, oplus, Notion};
use crate::report::{PropertyReport, Tally};

/// A finite sequential amalgam of `pieces` over `base`.
///
/// `resolution[0]` is the image of the base inside `total`, `resolution[i + 1]`
/// amalgamates `resolution[i]` with `pieces[i]`, and the last entry is `total`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct SeqAmalgamCertificate<M, E> {
    pub base: M,
    pub pieces: Vec<M>,
    pub resolution: Vec<M>,
    /// Embedding of `base` onto `resolution[0]`.
    pub base_map: KEmbedding<M, E>,
    /// `maps[i]: pieces[i] -> resolution[i + 1]`.
    pub maps: Vec<KEmbedding<M, E>>,
    pub total: M,
}

pub type Cert<I> =
    SeqAmalgamCertificate<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;

/// Minimal index set whose sub-amalgam contains an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct MuWitness<M, E> {
    pub element: E,
    pub subsequence: Vec<usize>,
    pub sub_amalgam: M,
}

/// Largest number of index subsets `mu_witness` tries.
pub const MU_SUBSET_CAP: usize = 1 << 12;

impl<M: Clone, E> SeqAmalgamCertificate<M, E> {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}

/// Stage square `i`: `pieces[i]` and `resolution[i]` over the base, into `resolution[i + 1]`.
pub fn stage_square<I: ClassInstance>(inst: &I, cert: &Cert<I>, i: usize) -> Diagram<I> {
    let ni = &cert.resolution[i];
    let next = &cert.resolution[i + 1];
    AmalgamDiagram {
        span: Span {
            m0: cert.base.clone(),
            m1: cert.pieces[i].clone(),
            m2: ni.clone(),
            f: with_cod(&cert.base_map, ni),
        },
        n: next.clone(),
        g1: with_cod(&cert.maps[i], next),
        g2: inclusion(inst, ni, next),
    }
}

/// Re-check every structural claim of a certificate.
pub fn verify_certificate<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    cert: &Cert<I>,
) -> Result<()> {
    let k = cert.pieces.len();
    let fail = |msg: String| Err(Error::VerificationFailed(msg));
    if cert.resolution.len() != k + 1 || cert.maps.len() != k {
        return fail("resolution or maps have the wrong length".into());
    }
    if cert.resolution.last() != Some(&cert.total) {
        return fail("last resolution entry is not the total".into());
    }
    if image(inst, &cert.base_map)? != cert.resolution[0] {
        return fail("resolution[0] is not the image of the base".into());
    }
    for w in cert.resolution.windows(2) {
        if !inst.is_strong_sub(&w[0], &w[1]) {
            return fail("resolution is not increasing".into());
        }
    }
    for i in 0..k {
        if !notion.is_amalgam(inst, &stage_square(inst, cert, i)) {
            return fail(format!("stage {i} is not an amalgam"));
        }
    }
    Ok(())
}

/// Build a fresh sequential amalgam by iterated construction, pushing earlier
/// stages forward into each new apex.
pub fn build_seq_amalgam<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    base: &I::Model,
    pieces: &[I::Model],
) -> Result<Cert<I>> {
    if pieces.is_empty() {
        return Err(Error::PreconditionViolated("no pieces".into()));
    }
    let mut base_map = identity(inst, base);
    let mut resolution = vec![base.clone()];
    let mut maps: Vec<KEmbedding<I::Model, I::Element>> = Vec::new();
    for (index, piece) in pieces.iter().enumerate() {
        let stage_err = |reason: String| Error::AmalgamConstructionFailed { index, reason };
        if !inst.is_strong_sub(base, piece) {
            return Err(stage_err("piece does not contain the base".into()));
        }
        let cur = resolution.last().expect("nonempty").clone();
        let span = Span {
            m0: base.clone(),
            m1: piece.clone(),
            m2: cur.clone(),
            f: with_cod(&base_map, &cur),
        };
        let d = notion
            .construct(inst, &span)
            .map_err(|e| stage_err(e.to_string()))?;
        let push = &d.g2;
        resolution = resolution
            .iter()
            .map(|r| image(inst, &restrict(inst, push, r)))
            .collect::<Result<_>>()
            .map_err(|e| stage_err(e.to_string()))?;
        maps = maps.iter().map(|f| compose(inst, push, f)).collect();
        base_map = compose(inst, push, &base_map);
        maps.push(d.g1.clone());
        resolution.push(d.n.clone());
    }
    let total = resolution.last().expect("nonempty").clone();
    let maps = maps
        .iter()
        .enumerate()
        .map(|(i, f)| with_cod(f, &resolution[i + 1]))
        .collect();
    let cert = SeqAmalgamCertificate {
        base: base.clone(),
        pieces: pieces.to_vec(),
        resolution,
        base_map,
        maps,
        total,
    };
    if let Err(e) = verify_certificate(inst, notion, &cert) {
        return Err(Error::AmalgamConstructionFailed {
            index: pieces.len(),
            reason: e.to_string(),
        });
    }
    Ok(cert)
}

/// Sequential amalgam of submodels of `n` by inclusion: `N_{i+1} = pieces[i] ⊕ N_i` inside `n`.
pub fn assemble_inside<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    base: &I::Model,
    pieces: &[I::Model],
    n: &I::Model,
) -> Result<Cert<I>> {
    let mut resolution = vec![base.clone()];
    for (index, piece) in pieces.iter().enumerate() {
        let cur = resolution.last().expect("nonempty");
        let next = oplus(inst, notion, piece, cur, base, n)
            .map_err(|e| Error::AmalgamConstructionFailed {
                index,
                reason: e.to_string(),
            })?
            .ok_or_else(|| Error::AmalgamConstructionFailed {
                index,
                reason: "pieces are not subamalgamated".into(),
            })?;
        resolution.push(next);
    }
    let total = resolution.last().expect("nonempty").clone();
    let maps = pieces
        .iter()
        .zip(&resolution[1..])
        .map(|(p, r)| inclusion(inst, p, r))
        .collect();
    Ok(SeqAmalgamCertificate {
        base: base.clone(),
        pieces: pieces.to_vec(),
        resolution,
        base_map: inclusion(inst, base, &total),
        maps,
        total,
    })
}

/// Images of the pieces inside the total.
pub fn piece_images<I: ClassInstance>(inst: &I, cert: &Cert<I>) -> Result<Vec<I::Model>> {
    cert.maps
        .iter()
        .map(|f| image(inst, &with_cod(f, &cert.total)))
        .collect()
}

fn index_check(len: usize, s: &[usize]) -> Result<()> {
    match s.iter().find(|&&i| i >= len) {
        Some(i) => Err(Error::PreconditionViolated(format!(
            "index {i} out of range"
        ))),
        None => Ok(()),
    }
}

/// `(M_S, M_{S̄})`: sub-amalgams of the pieces in `s` and in its complement,
/// with `total = M_S ⊕ M_{S̄}` over the base re-verified.
pub fn subseq_amalgam<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    cert: &Cert<I>,
    s: &[usize],
) -> Result<(I::Model, I::Model)> {
    index_check(cert.len(), s)?;
    let images = piece_images(inst, cert)?;
    let base = &cert.resolution[0];
    let pick = |inside: bool| -> Vec<I::Model> {
        (0..cert.len())
            .filter(|i| s.contains(i) == inside)
            .map(|i| images[i].clone())
            .collect()
    };
    let fail = |e: Error| Error::VerificationFailed(e.to_string());
    let ms = assemble_inside(inst, notion, base, &pick(true), &cert.total)
        .map_err(fail)?
        .total;
    let mc = assemble_inside(inst, notion, base, &pick(false), &cert.total)
        .map_err(fail)?
        .total;
    let square = crate::class::by_inclusion(inst, base, &ms, &mc, &cert.total);
    if !notion.is_amalgam(inst, &square) {
        return Err(Error::VerificationFailed(format!(
            "total is not the amalgam of the two sub-amalgams: {}",
            crate::report::to_value(&square)
        )));
    }
    Ok((ms, mc))
}

/// Result of re-assembling a certificate's pieces in another order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReorderVerdict {
    Holds,
    /// Stage at which the permuted assembly broke; `len` means the totals differ.
    FailsAt {
        stage: usize,
    },
}

impl ReorderVerdict {
    pub fn is_holds(self) -> bool {
        self == ReorderVerdict::Holds
    }
}

/// Whether `total` is also the sequential amalgam of the `sigma`-permuted pieces.
pub fn check_reorder_invariance<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    cert: &Cert<I>,
    sigma: &[usize],
) -> ReorderVerdict {
    let mut sorted = sigma.to_vec();
    sorted.sort_unstable();
    if sorted != (0..cert.len()).collect::<Vec<_>>() {
        return ReorderVerdict::FailsAt { stage: 0 };
    }
    let Ok(images) = piece_images(inst, cert) else {
        return ReorderVerdict::FailsAt { stage: 0 };
    };
    let permuted: Vec<_> = sigma.iter().map(|&i| images[i].clone()).collect();
    match assemble_inside(inst, notion, &cert.resolution[0], &permuted, &cert.total) {
        Ok(c) if c.total == cert.total && verify_certificate(inst, notion, &c).is_ok() => {
            ReorderVerdict::Holds
        }
        Ok(_) => ReorderVerdict::FailsAt { stage: cert.len() },
        Err(Error::AmalgamConstructionFailed { index, .. }) => {
            ReorderVerdict::FailsAt { stage: index }
        }
        Err(_) => ReorderVerdict::FailsAt { stage: 0 },
    }
}

/// Split `n` over `base` into pieces `p` with `size(p) <= size(base) + piece_bound`.
pub fn decompose_into_small<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    base: &I::Model,
    n: &I::Model,
    piece_bound: usize,
) -> Result<Cert<I>> {
    if base == n || !inst.is_strong_sub(base, n) {
        return Err(Error::PreconditionViolated(
            "decomposition needs base < n".into(),
        ));
    }
    let limit = inst.size(base) + piece_bound;
    let mut cur = base.clone();
    let mut pieces = Vec::new();
    for _ in 0..=inst.size(n) {
        if cur == *n {
            let cert = assemble_inside(inst, notion, base, &pieces, n)?;
            return if cert.total == *n {
                Ok(cert)
            } else {
                Err(Error::NoDecomposition)
            };
        }
        let rest = decompose(notion, inst, base, &cur, n)?;
        let piece = inst
            .substructures(&rest, base)?
            .into_iter()
            .find(|p| p != base && inst.size(p) <= limit)
            .ok_or(Error::NoDecomposition)?;
        cur = oplus(inst, notion, &piece, &cur, base, n)?.ok_or(Error::NoDecomposition)?;
        pieces.push(piece);
    }
    Err(Error::NoDecomposition)
}

/// Concatenate a certificate whose first piece is itself split by `inner` (over
/// the same base, inside that piece).
pub fn flatten_initial<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    cert: &Cert<I>,
    inner: &Cert<I>,
) -> Result<Cert<I>> {
    let images = piece_images(inst, cert)?;
    let f0 = with_cod(&cert.maps[0], &cert.total);
    let mut pieces = Vec::new();
    for p in piece_images(inst, inner)? {
        let moved: Vec<_> = inst
            .generators(&p)
            .iter()
            .map(|x| apply(inst, &f0, x))
            .collect();
        pieces.push(inst.span_in(&cert.total, &moved)?);
    }
    pieces.extend(images[1..].iter().cloned());
    assemble_inside(inst, notion, &cert.resolution[0], &pieces, &cert.total)
}

/// Generic `μ` witness: the first index set, by increasing size, whose
/// sub-amalgam contains `a`. At most [`MU_SUBSET_CAP`] subsets are tried.
pub fn mu_witness<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    cert: &Cert<I>,
    a: &I::Element,
) -> Result<MuWitness<I::Model, I::Element>> {
    if !inst.contains(&cert.total, a) {
        return Err(Error::ElementOutsideTotal);
    }
    let images = piece_images(inst, cert)?;
    let base = &cert.resolution[0];
    let k = cert.len();
    let mut tried = 0;
    for size in 0..=k {
        for s in combinations(k, size) {
            tried += 1;
            if tried > MU_SUBSET_CAP {
                return Err(Error::SearchBoundExceeded(MU_SUBSET_CAP));
            }
            let parts: Vec<_> = s.iter().map(|&i| images[i].clone()).collect();
            let sub = assemble_inside(inst, notion, base, &parts, &cert.total)?.total;
            if inst.contains(&sub, a) {
                return Ok(MuWitness {
                    element: a.clone(),
                    subsequence: s,
                    sub_amalgam: sub,
                });
            }
        }
    }
    Err(Error::VerificationFailed(
        "total does not contain its own element".into(),
    ))
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Lift a resolution `inner` of `outer.span.m2` to one of `outer.n`: each stage
/// is `M* ⊕ inner[i]` over the base. `outer` must be by inclusion.
pub fn check_resolution_transfer<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    outer: &Diagram<I>,
    inner: &[I::Model],
) -> Result<bool> {
    let s = &outer.span;
    if !notion.is_amalgam(inst, outer) {
        return Err(Error::PreconditionViolated(
            "outer square is not an amalgam".into(),
        ));
    }
    let mut lifted: Vec<I::Model> = Vec::new();
    for (i, mi) in inner.iter().enumerate() {
        if !(inst.is_strong_sub(&s.m0, mi) && inst.is_strong_sub(mi, &s.m2)) {
            return Ok(false);
        }
        let ni = oplus(inst, notion, &s.m1, mi, &s.m0, &outer.n)
            .ok()
            .flatten()
            .ok_or(Error::RegularityFailure(i))?;
        if let Some(prev) = lifted.last() {
            if !inst.is_strong_sub(prev, &ni) {
                return Ok(false);
            }
        }
        lifted.push(ni);
    }
    Ok(match (inner.last(), lifted.last()) {
        (Some(m), Some(n)) if m == &s.m2 => n == &outer.n,
        _ => true,
    })
}

/// Cross terms `chain1[i] ⊕ chain2[j]` over `base` for parallel chains whose
/// diagonal terms sit inside `n`; each is checked to lie inside the diagonal
/// term at `max(i, j)`.
pub fn grid_amalgams<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    base: &I::Model,
    chain1: &[I::Model],
    chain2: &[I::Model],
    n: &I::Model,
) -> Result<Vec<Vec<I::Model>>> {
    if chain1.len() != chain2.len() {
        return Err(Error::PreconditionViolated(
            "chains of different length".into(),
        ));
    }
    let diag: Vec<_> = chain1
        .iter()
        .zip(chain2)
        .map(|(a, b)| oplus(inst, notion, a, b, base, n)?.ok_or(Error::NoDecomposition))
        .collect::<Result<_>>()?;
    let mut grid = Vec::new();
    for (i, a) in chain1.iter().enumerate() {
        let mut row = Vec::new();
        for (j, b) in chain2.iter().enumerate() {
            let top = &diag[i.max(j)];
            let m = oplus(inst, notion, a, b, base, top)?
                .ok_or_else(|| Error::VerificationFailed(format!("no cross term at ({i}, {j})")))?;
            row.push(m);
        }
        grid.push(row);
    }
    Ok(grid)
}

/// Every way to pick disjoint coordinate sets `(base, blocks)` from `0..n` with
/// `1..=max_blocks` nonempty blocks; blocks are listed by least element.
pub fn coordinate_blocks(n: usize, max_blocks: usize) -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
    fn rec(
        i: usize,
        n: usize,
        max: usize,
        base: &mut Vec<usize>,
        blocks: &mut Vec<Vec<usize>>,
        out: &mut Vec<(Vec<usize>, Vec<Vec<usize>>)>,
    ) {
        if i == n {
            if !blocks.is_empty() {
                out.push((base.clone(), blocks.clone()));
            }
            return;
        }
        rec(i + 1, n, max, base, blocks, out);
        base.push(i);
        rec(i + 1, n, max, base, blocks, out);
        base.pop();
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, max, base, blocks, out);
            blocks[b].pop();
        }
        if blocks.len() < max {
            blocks.push(vec![i]);
            rec(i + 1, n, max, base, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, max_blocks, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Reorder invariance under every permutation and subsequence reassembly for
/// every index subset, over decompositions `(base, pieces, n)` with `n` the
/// sum of the pieces.
pub fn check_sequential<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    decomps: &[(I::Model, Vec<I::Model>, I::Model)],
) -> Result<Vec<PropertyReport>> {
    if decomps.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut assembled = Tally::new("sequential-assembly");
    let mut reorder = Tally::new("reorder-invariance");
    let mut subseq = Tally::new("subsequence-reassembly");
    for (base, pieces, n) in decomps {
        let witness = || serde_json::json!({ "base": crate::report::to_value(base), "pieces": crate::report::to_value(pieces) });
        let cert = match assemble_inside(inst, notion, base, pieces, n) {
            Ok(c) if c.total == *n && verify_certificate(inst, notion, &c).is_ok() => c,
            _ => {
                assembled.record(false, witness);
                continue;
            }
        };
        assembled.pass();
        for sigma in permutations(pieces.len()) {
            let v = check_reorder_invariance(inst, notion, &cert, &sigma);
            reorder.record(
                v.is_holds(),
                || serde_json::json!({ "decomposition": witness(), "sigma": sigma, "verdict": v }),
            );
        }
        for size in 0..=pieces.len() {
            for s in combinations(pieces.len(), size) {
                let r = subseq_amalgam(inst, notion, &cert, &s);
                subseq.record(r.is_ok(), || {
                    serde_json::json!({ "decomposition": witness(), "subset": s, "error": r.as_ref().err().map(|e| e.to_string()) })
                });
            }
        }
    }
    Ok(vec![assembled.finish(), reorder.finish(), subseq.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::vec::{unit, DirectSum, VecSpace};

    fn lines(v: &VecSpace, n: usize) -> Vec<crate::instances::vec::Subspace> {
        (0..n).map(|i| v.span(n, &[unit(n, i)])).collect()
    }

    #[test]
    fn coordinate_build_has_cube_total() {
        let v = VecSpace::default();
        let cert = build_seq_amalgam(&v, &DirectSum, &v.zero(3), &lines(&v, 3)).unwrap();
        assert_eq!(cert.total.dim(), 3);
        assert_eq!(cert.resolution.len(), 4);
        verify_certificate(&v, &DirectSum, &cert).unwrap();
    }

    #[test]
    fn single_piece_is_trivial() {
        let v = VecSpace::default();
        let piece = v.span(2, &[unit(2, 0), unit(2, 1)]);
        let cert = build_seq_amalgam(&v, &DirectSum, &v.zero(2), &[piece]).unwrap();
        assert_eq!(cert.total.dim(), 2);
    }

    #[test]
    fn subsequences_of_coordinate_cert() {
        let v = VecSpace::default();
        let n = v.whole(3);
        let l = lines(&v, 3);
        let cert = assemble_inside(&v, &DirectSum, &v.zero(3), &l, &n).unwrap();
        assert_eq!(cert.total, n);
        let (s, c) = subseq_amalgam(&v, &DirectSum, &cert, &[0, 2]).unwrap();
        assert_eq!(s, v.span(3, &[unit(3, 0), unit(3, 2)]));
        assert_eq!(c, l[1]);
        assert_eq!(
            subseq_amalgam(&v, &DirectSum, &cert, &[0, 1, 2]).unwrap(),
            (n.clone(), v.zero(3))
        );
        assert_eq!(
            subseq_amalgam(&v, &DirectSum, &cert, &[]).unwrap(),
            (v.zero(3), n)
        );
    }

    #[test]
    fn permutations_of_three_lines() {
        let v = VecSpace::default();
        let cert = assemble_inside(&v, &DirectSum, &v.zero(3), &lines(&v, 3), &v.whole(3)).unwrap();
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        assert!(perms
            .iter()
            .all(|p| check_reorder_invariance(&v, &DirectSum, &cert, p).is_holds()));
    }

    #[test]
    fn small_pieces_of_cube() {
        let v = VecSpace::default();
        let cert = decompose_into_small(&v, &DirectSum, &v.zero(3), &v.whole(3), 1).unwrap();
        assert_eq!(cert.len(), 3);
        assert!(cert.pieces.iter().all(|p| p.dim() == 1));
        assert!(decompose_into_small(&v, &DirectSum, &v.whole(3), &v.whole(3), 1).is_err());
    }

    #[test]
    fn mu_of_coordinate_sum() {
        let v = VecSpace::default();
        let cert = assemble_inside(&v, &DirectSum, &v.zero(3), &lines(&v, 3), &v.whole(3)).unwrap();
        let w = mu_witness(&v, &DirectSum, &cert, &vec![1, 0, 1]).unwrap();
        assert_eq!(w.subsequence, vec![0, 2]);
        assert_eq!(
            mu_witness(&v, &DirectSum, &cert, &vec![0, 0, 0])
                .unwrap()
                .subsequence,
            Vec::<usize>::new()
        );
        let outside =
            assemble_inside(&v, &DirectSum, &v.zero(3), &lines(&v, 3)[..1], &v.whole(3)).unwrap();
        assert_eq!(
            mu_witness(&v, &DirectSum, &outside, &vec![0, 1, 0]),
            Err(Error::ElementOutsideTotal)
        );
    }

    #[test]
    fn resolution_transfer_in_gf2_4() {
        let v = VecSpace::default();
        let e = |i| unit(4, i);
        let star = v.span(4, &[e(0)]);
        let m = v.span(4, &[e(1), e(2), e(3)]);
        let outer = crate::class::by_inclusion(&v, &v.zero(4), &star, &m, &v.whole(4));
        let res = [v.span(4, &[e(1)]), v.span(4, &[e(1), e(2)]), m.clone()];
        assert!(check_resolution_transfer(&v, &DirectSum, &outer, &res).unwrap());
        assert!(check_resolution_transfer(&v, &DirectSum, &outer, &[m]).unwrap());
    }

    #[test]
    fn block_counts() {
        // one coordinate: it must form the single block
        assert_eq!(coordinate_blocks(1, 4).len(), 1);
        // two coordinates: two singleton blocks, one joint block, or one singleton
        // block with the other coordinate unused or in the base
        assert_eq!(coordinate_blocks(2, 4).len(), 1 + 1 + 2 * 2);
        assert!(coordinate_blocks(5, 4).iter().all(|(_, b)| b.len() <= 4));
    }

    #[test]
    fn combinatorics_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(permutations(4).len(), 24);
    }
}
