//! NPA and one-sided NPA moment relaxations as standard-form SDPs.
//!
//! Moment bases never contain answer-0 projectors: `M_{0,x}` is rewritten as
//! `I − Σ_{a≥1} M_{a,x}` so that the basis words are linearly independent.
//! Entries of a moment matrix whose products `s†t` canonicalize to the same
//! word are tied together by equality constraints (a star around the first
//! occurrence), and entries whose product vanishes are pinned to zero.
//!
//! One-sided relaxations have one block per Alice `(answer, question)` pair,
//! indexed `x · |A| + a`, each holding `Γ_{a,x}(s, t) = L(M_{a,x} s† t)` over
//! Bob words. Here the Alice answer-0 blocks are genuine.

mod sparse;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::algebra::{
    reduce_answer_zero, reduce_answer_zero_party, AlgebraSignature, GeneratorKind, Letter,
    Monomial, Party, Polynomial,
};
use crate::error::{Error, Result};
use crate::games::GamePolynomial;
use crate::scalar::{cone, creal, czero, root_of_unity, Real, C};

pub use sparse::{zero_blocks, Constraint, SdpProblem, SparseHermitian};

/// Default cap on the relaxation level.
pub const DEFAULT_DEGREE_CAP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisSide {
    Both,
    BobOnly,
}

/// Ordered list of distinct canonical words, identity first.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialBasis {
    entries: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    degree: usize,
    side: BasisSide,
}

impl MonomialBasis {
    fn generate(sig: &AlgebraSignature, degree: usize, side: BasisSide) -> Self {
        let mut letters = Vec::new();
        if side == BasisSide::Both {
            letters.extend(sig.basis_letters(Party::Alice));
        }
        letters.extend(sig.basis_letters(Party::Bob));
        let mut basis = Self {
            entries: vec![Monomial::identity()],
            index: HashMap::from([(Monomial::identity(), 0)]),
            degree,
            side,
        };
        let mut frontier = vec![Monomial::identity()];
        for _ in 0..degree {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &letters {
                    if let Some(m) = w.mul(&Monomial::from_letter(l), sig) {
                        if !basis.index.contains_key(&m) {
                            basis.index.insert(m.clone(), basis.entries.len());
                            basis.entries.push(m.clone());
                            next.push(m);
                        }
                    }
                }
            }
            frontier = next;
        }
        basis
    }

    pub fn entries(&self) -> &[Monomial] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn side(&self) -> BasisSide {
        self.side
    }
}

/// Words of degree ≤ `d` over the non-eliminated generators of both parties.
pub fn npa_basis(sig: &AlgebraSignature, d: usize) -> MonomialBasis {
    MonomialBasis::generate(sig, d, BasisSide::Both)
}

/// Words of degree ≤ `d` over Bob's non-eliminated generators.
pub fn bob_basis(sig: &AlgebraSignature, d: usize) -> MonomialBasis {
    MonomialBasis::generate(sig, d, BasisSide::BobOnly)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hierarchy {
    Npa,
    OneSided,
}

impl std::fmt::Display for Hierarchy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hierarchy::Npa => "npa",
            Hierarchy::OneSided => "onpa",
        })
    }
}

/// Meaning of one block: rows and columns are basis words, optionally
/// multiplied by the Alice projector `M_{a,x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockLabel {
    /// `(question, answer)` of the Alice projector, if any.
    pub alice: Option<(usize, usize)>,
    pub basis: Arc<MonomialBasis>,
}

/// Maps SDP positions back to words of the game algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelMap {
    pub signature: AlgebraSignature,
    pub hierarchy: Hierarchy,
    pub level: usize,
    pub blocks: Vec<BlockLabel>,
}

impl LabelMap {
    /// `(alice projector, row word, column word)` of a matrix position.
    pub fn label(&self, block: usize, row: usize, col: usize) -> (Option<(usize, usize)>, &Monomial, &Monomial) {
        let b = &self.blocks[block];
        (b.alice, &b.basis.entries[row], &b.basis.entries[col])
    }

    /// `M_{a,x}` for the block, or the identity.
    pub fn prefix<T: Real>(&self, block: usize) -> Polynomial<T> {
        match self.blocks[block].alice {
            None => Polynomial::identity(self.signature),
            Some((x, a)) => alice_projector(&self.signature, x, a),
        }
    }

    /// The polynomial `q` with `⟨A, Γ⟩ = L(q)`:
    /// `Σ conj(A_ij) · prefix · b_i† b_j`.
    pub fn matrix_polynomial<T: Real>(&self, a: &SparseHermitian<T>) -> Polynomial<T> {
        let sig = self.signature;
        let mut per_block: HashMap<usize, Polynomial<T>> = HashMap::new();
        for &(b, r, c, v) in a.entries() {
            let basis = &self.blocks[b].basis.entries;
            let acc = per_block.entry(b).or_insert_with(|| Polynomial::zero(sig));
            let word = |i: usize, j: usize| basis[i].adjoint(&sig).mul(&basis[j], &sig);
            if r == c {
                if let Some(m) = word(r, r) {
                    acc.add_term(m, creal(v.re));
                }
            } else {
                if let Some(m) = word(r, c) {
                    acc.add_term(m, v.conj());
                }
                if let Some(m) = word(c, r) {
                    acc.add_term(m, v);
                }
            }
        }
        let mut blocks: Vec<_> = per_block.into_iter().collect();
        blocks.sort_by_key(|(b, _)| *b);
        let mut out = Polynomial::zero(sig);
        for (b, p) in blocks {
            let q = self.prefix::<T>(b).multiply(&p).expect("same signature");
            out.add_scaled(&q, cone());
        }
        out
    }

    /// `prefix · Σ_j v_j b_j`.
    pub fn vector_polynomial<T: Real>(&self, block: usize, v: &[C<T>]) -> Polynomial<T> {
        let sig = self.signature;
        let mut p = Polynomial::zero(sig);
        for (w, &c) in self.blocks[block].basis.entries.iter().zip(v) {
            p.add_term(w.clone(), c);
        }
        self.prefix::<T>(block).multiply(&p).expect("same signature")
    }
}

/// `M_{a,x}` as a polynomial: a projector letter, or its Fourier expansion
/// `(1/d) Σ_j ω^{−aj} A_x^j` for observables.
pub fn alice_projector<T: Real>(sig: &AlgebraSignature, x: usize, a: usize) -> Polynomial<T> {
    match sig.kind {
        GeneratorKind::Projector => Polynomial::from_monomial(
            *sig,
            Monomial::from_letter(Letter::alice(x, a)),
            cone(),
        ),
        GeneratorKind::Observable => {
            let d = sig.alice_answers;
            let inv = T::one() / T::from_usize(d).unwrap();
            let mut p = Polynomial::constant(*sig, creal(inv));
            for j in 1..d {
                p.add_term(
                    Monomial::from_letter(Letter::alice(x, j)),
                    root_of_unity::<T>(d, -((a * j) as i64)) * inv,
                );
            }
            p
        }
    }
}

/// Entries of a moment block grouped by the canonical class of `b_i† b_j`.
struct EntryClasses {
    classes: Vec<EntryClass>,
    lookup: HashMap<Monomial, usize>,
    zeros: Vec<(usize, usize)>,
}

struct EntryClass {
    /// `min(w, w†)` over the products `w` in the class.
    key: Monomial,
    self_adjoint: bool,
    /// `(i, j, conj)`: `Γ(i, j) = L(key)`, or its conjugate when `conj`.
    members: Vec<(usize, usize, bool)>,
}

impl EntryClasses {
    fn new(basis: &MonomialBasis, sig: &AlgebraSignature) -> Self {
        let adj: Vec<Monomial> = basis.entries.iter().map(|b| b.adjoint(sig)).collect();
        let mut out = Self {
            classes: Vec::new(),
            lookup: HashMap::new(),
            zeros: Vec::new(),
        };
        let n = basis.len();
        for i in 0..n {
            for j in i..n {
                let Some(w) = adj[i].mul(&basis.entries[j], sig) else {
                    out.zeros.push((i, j));
                    continue;
                };
                let wa = w.adjoint(sig);
                let (key, conj) = if wa < w { (wa, true) } else { (w, false) };
                let k = match out.lookup.get(&key) {
                    Some(&k) => k,
                    None => {
                        let k = out.classes.len();
                        let self_adjoint = key == key.adjoint(sig);
                        out.lookup.insert(key.clone(), k);
                        out.classes.push(EntryClass {
                            key,
                            self_adjoint,
                            members: Vec::new(),
                        });
                        k
                    }
                };
                out.classes[k].members.push((i, j, conj));
            }
        }
        out
    }

    /// Position and coefficient placing `c · L(m)` into a functional.
    fn place<T: Real>(&self, m: &Monomial, c: C<T>, sig: &AlgebraSignature) -> Option<(usize, usize, C<T>)> {
        let ma = m.adjoint(sig);
        let key = if ma < *m { &ma } else { m };
        let class = &self.classes[*self.lookup.get(key)?];
        let (i, j, conj) = class.members[0];
        let at_ij_is_m = if conj { class.key.adjoint(sig) == *m } else { class.key == *m };
        Some((i, j, if at_ij_is_m { c } else { c.conj() }))
    }

    /// Moment equalities and zero entries for one block.
    fn constraints<T: Real>(&self, block: usize, out: &mut Vec<Constraint<T>>) {
        let one = T::one();
        let sign = |conj: bool| if conj { -one } else { one };
        let mut emit = |m: SparseHermitian<T>| {
            out.push(Constraint {
                matrix: m,
                rhs: T::zero(),
            })
        };
        for class in &self.classes {
            let (ri, rj, rc) = class.members[0];
            for &(i, j, _) in &class.members[1..] {
                let mut m = SparseHermitian::new();
                m.push_real_part(block, i, j, one);
                m.push_real_part(block, ri, rj, -one);
                emit(m);
            }
            if class.self_adjoint {
                for &(i, j, _) in &class.members {
                    if i != j {
                        let mut m = SparseHermitian::new();
                        m.push_imag_part(block, i, j, one);
                        emit(m);
                    }
                }
            } else {
                for &(i, j, c) in &class.members[1..] {
                    let mut m = SparseHermitian::new();
                    m.push_imag_part(block, i, j, sign(c));
                    m.push_imag_part(block, ri, rj, -sign(rc));
                    emit(m);
                }
            }
        }
        for &(i, j) in &self.zeros {
            let mut m = SparseHermitian::new();
            m.push_real_part(block, i, j, one);
            emit(m);
            if i != j {
                let mut m = SparseHermitian::new();
                m.push_imag_part(block, i, j, one);
                emit(m);
            }
        }
    }
}

fn check_level(level: usize, cap: usize) -> Result<()> {
    if level > cap {
        return Err(Error::DegreeOverflow { level, cap });
    }
    if level == 0 {
        return Err(Error::InvalidInput("relaxation level must be at least 1".into()));
    }
    Ok(())
}

fn finish<T: Real>(
    dims: Vec<usize>,
    objective: SparseHermitian<T>,
    constraints: Vec<Constraint<T>>,
    labels: LabelMap,
) -> Result<SdpProblem<T>> {
    let mut objective = objective;
    objective.compress(T::zero());
    let constraints = constraints
        .into_iter()
        .map(|mut c| {
            c.matrix.compress(T::zero());
            c
        })
        .filter(|c| !c.matrix.is_empty())
        .collect();
    Ok(SdpProblem::new(dims, objective, constraints)?
        .with_normalization(0)?
        .with_labels(labels))
}

/// Level-`d` NPA relaxation of `max L(P)` with the default degree cap.
pub fn build_npa<T: Real>(gp: &GamePolynomial<T>, d: usize) -> Result<SdpProblem<T>> {
    build_npa_with_cap(gp, d, DEFAULT_DEGREE_CAP)
}

pub fn build_npa_with_cap<T: Real>(gp: &GamePolynomial<T>, d: usize, cap: usize) -> Result<SdpProblem<T>> {
    check_level(d, cap)?;
    let sig = *gp.signature();
    let poly = reduce_answer_zero(gp.poly());
    let basis = Arc::new(npa_basis(&sig, d));
    let classes = EntryClasses::new(&basis, &sig);

    let mut objective = SparseHermitian::new();
    for (m, &c) in poly.terms() {
        let (i, j, c) = classes
            .place(m, c, &sig)
            .ok_or_else(|| Error::NotRepresentable(m.to_string()))?;
        objective.push_functional(0, i, j, c);
    }

    let mut norm = SparseHermitian::new();
    norm.push_real_part(0, 0, 0, T::one());
    let mut constraints = vec![Constraint {
        matrix: norm,
        rhs: T::one(),
    }];
    classes.constraints(0, &mut constraints);

    let labels = LabelMap {
        signature: sig,
        hierarchy: Hierarchy::Npa,
        level: d,
        blocks: vec![BlockLabel {
            alice: None,
            basis: basis.clone(),
        }],
    };
    finish(vec![basis.len()], objective, constraints, labels)
}

/// Level-`d` one-sided NPA relaxation with the default degree cap.
pub fn build_onesided<T: Real>(gp: &GamePolynomial<T>, d: usize) -> Result<SdpProblem<T>> {
    build_onesided_with_cap(gp, d, DEFAULT_DEGREE_CAP)
}

pub fn build_onesided_with_cap<T: Real>(
    gp: &GamePolynomial<T>,
    d: usize,
    cap: usize,
) -> Result<SdpProblem<T>> {
    check_level(d, cap)?;
    let sig = *gp.signature();
    let poly = reduce_answer_zero_party(gp.poly(), Party::Bob);
    let basis = Arc::new(bob_basis(&sig, d));
    let classes = EntryClasses::new(&basis, &sig);
    let na = sig.alice_answers;
    let nx = sig.alice_questions;
    let block = |x: usize, a: usize| x * na + a;

    let mut objective = SparseHermitian::new();
    for (m, &c) in poly.terms() {
        let alice = m.alice_part();
        let bob = Monomial::from_canonical(m.bob_part().to_vec());
        let place = |c: C<T>| {
            classes
                .place(&bob, c, &sig)
                .ok_or_else(|| Error::NotRepresentable(m.to_string()))
        };
        match alice {
            [] => {
                for a in 0..na {
                    let (i, j, c) = place(c)?;
                    objective.push_functional(block(0, a), i, j, c);
                }
            }
            [l] => {
                let x = l.question as usize;
                match sig.kind {
                    GeneratorKind::Projector => {
                        let (i, j, c) = place(c)?;
                        objective.push_functional(block(x, l.payload as usize), i, j, c);
                    }
                    GeneratorKind::Observable => {
                        for a in 0..na {
                            let w = root_of_unity::<T>(na, (a * l.payload as usize) as i64);
                            let (i, j, c) = place(c * w)?;
                            objective.push_functional(block(x, a), i, j, c);
                        }
                    }
                }
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "one-sided relaxation needs at most one Alice letter per monomial, found `{m}`"
                )))
            }
        }
    }

    let mut norm = SparseHermitian::new();
    for a in 0..na {
        norm.push_real_part(block(0, a), 0, 0, T::one());
    }
    let mut constraints = vec![Constraint {
        matrix: norm,
        rhs: T::one(),
    }];
    for x in 0..nx {
        for a in 0..na {
            classes.constraints(block(x, a), &mut constraints);
        }
    }
    // Σ_a Γ_{a,0} = Σ_a Γ_{a,x}, once per entry class.
    let one = T::one();
    for x in 1..nx {
        for class in &classes.classes {
            let (i, j, _) = class.members[0];
            let mut re = SparseHermitian::new();
            for a in 0..na {
                re.push_real_part(block(0, a), i, j, one);
                re.push_real_part(block(x, a), i, j, -one);
            }
            constraints.push(Constraint {
                matrix: re,
                rhs: T::zero(),
            });
            if !class.self_adjoint {
                let mut im = SparseHermitian::new();
                for a in 0..na {
                    im.push_imag_part(block(0, a), i, j, one);
                    im.push_imag_part(block(x, a), i, j, -one);
                }
                constraints.push(Constraint {
                    matrix: im,
                    rhs: T::zero(),
                });
            }
        }
    }

    let blocks = (0..nx)
        .flat_map(|x| (0..na).map(move |a| (x, a)))
        .map(|(x, a)| BlockLabel {
            alice: Some((x, a)),
            basis: basis.clone(),
        })
        .collect();
    let labels = LabelMap {
        signature: sig,
        hierarchy: Hierarchy::OneSided,
        level: d,
        blocks,
    };
    finish(vec![basis.len(); nx * na], objective, constraints, labels)
}

/// Dual quantities at a multiplier vector `y`.
#[derive(Clone, Debug)]
pub struct DualData<T: Real> {
    /// Multiplier of the normalization constraint: the certified bound.
    pub nu: T,
    /// `Σ_k y_k A_k − C` per block, which contains `ν·𝟙`.
    pub slack: Vec<DMatrix<C<T>>>,
    /// Index of the normalization constraint.
    pub normalization: usize,
}

/// Splits the dual into the bound `ν` and the slack `ν𝟙 + Σ_{k≠norm} y_k A_k − C`.
pub fn dual_data<T: Real>(p: &SdpProblem<T>, y: &[T]) -> Result<DualData<T>> {
    let k = p.normalization().ok_or(Error::MissingNormalization)?;
    if y.len() != p.constraints().len() {
        return Err(Error::InvalidInput(format!(
            "{} multipliers for {} constraints",
            y.len(),
            p.constraints().len()
        )));
    }
    Ok(DualData {
        nu: y[k],
        slack: p.dual_slack(y),
        normalization: k,
    })
}

/// Restricts an NPA moment matrix of level `d + 1` to one-sided blocks of
/// level `d`: `Γ_{a,x}(s, t) = Γ(M_{a,x} s, M_{a,x} t)`, with `M_{0,x}`
/// expanded as `s − Σ_{a≥1} M_{a,x} s`.
pub fn restrict_npa_to_onesided<T: Real>(
    npa: &SdpProblem<T>,
    gamma: &DMatrix<C<T>>,
    onesided: &SdpProblem<T>,
) -> Result<Vec<DMatrix<C<T>>>> {
    let (Some(nl), Some(ol)) = (npa.labels(), onesided.labels()) else {
        return Err(Error::InvalidInput("problems carry no labels".into()));
    };
    if nl.hierarchy != Hierarchy::Npa || ol.hierarchy != Hierarchy::OneSided {
        return Err(Error::InvalidInput("expected an NPA and a one-sided problem".into()));
    }
    if nl.signature != ol.signature {
        return Err(Error::SignatureMismatch(
            "NPA and one-sided problems use different signatures".into(),
        ));
    }
    let sig = nl.signature;
    let big = &nl.blocks[0].basis;
    if gamma.nrows() != big.len() || gamma.ncols() != big.len() {
        return Err(Error::InvalidInput("moment matrix does not match the NPA basis".into()));
    }
    let mut out = Vec::with_capacity(ol.blocks.len());
    for label in &ol.blocks {
        let (x, a) = label.alice.expect("one-sided blocks carry an Alice label");
        let prefix = reduce_answer_zero_party(&alice_projector::<T>(&sig, x, a), Party::Alice);
        let small = &label.basis;
        let mut v = DMatrix::from_element(big.len(), small.len(), czero::<T>());
        for (col, s) in small.entries().iter().enumerate() {
            for (w, &c) in prefix.terms() {
                let ws = w
                    .mul(s, &sig)
                    .ok_or_else(|| Error::NotRepresentable(format!("{w} {s}")))?;
                let row = big
                    .position(&ws)
                    .ok_or_else(|| Error::NotRepresentable(ws.to_string()))?;
                v[(row, col)] += c;
            }
        }
        out.push(v.adjoint() * gamma * v);
    }
    Ok(out)
}
