//! Exact computation in dihedral groups and in Coxeter groups given by a
//! defining graph.
//!
//! Elements of a Coxeter group are stored as canonical reduced words: the
//! lexicographically least word among all reduced expressions of the
//! element. Reduced expressions of one element are connected by braid moves,
//! and a word `w s` is not reduced exactly when some reduced expression of `w`
//! ends in `s`; both facts drive the solver. Braid classes are memoized per
//! group behind a lock, so a group can be shared across threads and always
//! answers with the same canonical words.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::graph::DefiningGraph;

pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxeterError {
    #[error("letter `{0}` is not a dihedral generator (expected `s` or `t`)")]
    BadLetter(char),
    #[error("dihedral modulus must be at least {min}, got {m}")]
    ModulusOutOfRange { m: u32, min: u32 },
    #[error("ball enumeration exceeded {cap} elements after {partial} were found")]
    BallCapExceeded { cap: usize, partial: usize },
    #[error("generator {gen} out of range for rank {rank}")]
    GeneratorOutOfRange { gen: usize, rank: usize },
}

// ---------------------------------------------------------------------------
// Dihedral groups

/// Element `ρ^rotation σ^reflection` of the dihedral group of order `2m`,
/// with `s = σ` and `t = ρ^{-1} σ`, so `st = ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DihedralElement {
    pub reflection: bool,
    pub rotation: u32,
    pub modulus: u32,
}

impl DihedralElement {
    pub fn identity(m: u32) -> Self {
        Self {
            reflection: false,
            rotation: 0,
            modulus: m,
        }
    }

    pub fn s(m: u32) -> Self {
        Self {
            reflection: true,
            rotation: 0,
            modulus: m,
        }
    }

    pub fn t(m: u32) -> Self {
        Self {
            reflection: true,
            rotation: m - 1,
            modulus: m,
        }
    }

    pub fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let m = self.modulus;
        let r2 = if self.reflection { (m - rhs.rotation) % m } else { rhs.rotation };
        Self {
            reflection: self.reflection ^ rhs.reflection,
            rotation: (self.rotation + r2) % m,
            modulus: m,
        }
    }

    pub fn is_identity(self) -> bool {
        !self.reflection && self.rotation == 0
    }

    pub fn pow(self, e: u32) -> Self {
        (0..e).fold(Self::identity(self.modulus), |acc, _| acc.mul(self))
    }

    pub fn order(self) -> u32 {
        let mut x = self;
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul(self);
            k += 1;
        }
        k
    }
}

/// Left-to-right product of the letters `s`, `t` in the dihedral group of order `2m`.
pub fn dihedral_eval(word: &str, m: u32) -> Result<DihedralElement, CoxeterError> {
    if m < 2 {
        return Err(CoxeterError::ModulusOutOfRange { m, min: 2 });
    }
    word.chars().try_fold(DihedralElement::identity(m), |acc, c| match c {
        's' => Ok(acc.mul(DihedralElement::s(m))),
        't' => Ok(acc.mul(DihedralElement::t(m))),
        other => Err(CoxeterError::BadLetter(other)),
    })
}

/// Image under the map sending every generator to one generator of `ℤ`:
/// lowercase letters count `+1`, uppercase (inverse) letters `-1`.
pub fn exponent_sum(word: &str) -> i64 {
    word.chars()
        .map(|c| {
            if c.is_lowercase() {
                1
            } else if c.is_uppercase() {
                -1
            } else {
                0
            }
        })
        .sum()
}

/// Alternating word of the given length starting with `first`.
pub fn alternating(first: char, second: char, len: usize) -> String {
    (0..len).map(|p| if p % 2 == 0 { first } else { second }).collect()
}

fn power_word(letter: char, e: usize) -> String {
    std::iter::repeat_n(letter, e).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DihedralCase {
    pub name: String,
    pub passed: bool,
}

/// Base-case checks for an edge label `m >= 3`, evaluated in `I₂(m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DihedralReport {
    pub m: u32,
    pub group_order: usize,
    pub cases: Vec<DihedralCase>,
}

impl DihedralReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }
}

/// Evaluates every dihedral non-equality used by the no-square lemmas.
///
/// Covers `ts != st`, `s != t`, `t s^p != s t^p` for all `p`, the alternating
/// words whose triviality would shrink the group (length `m - 1` for odd
/// `m`; lengths `m - 2` and `m` for even `m`), and the full twist statement:
/// with `E` the exponent sum of `τ`, no `t^p s^{E-p}` or `s^p t^{E-p}` equals `τ`.
pub fn verify_dihedral_lemmas(m: u32) -> Result<DihedralReport, CoxeterError> {
    if m < 3 {
        return Err(CoxeterError::ModulusOutOfRange { m, min: 3 });
    }
    let ev = |w: &str| dihedral_eval(w, m).expect("only s/t letters are generated");
    let mut cases = Vec::new();
    let mut push = |name: String, passed: bool| cases.push(DihedralCase { name, passed });

    push("ts != st".into(), ev("ts") != ev("st"));
    push("s != t".into(), ev("s") != ev("t"));
    push(
        "relation: alternating words of length m agree".into(),
        ev(&alternating('s', 't', m as usize)) == ev(&alternating('t', 's', m as usize)),
    );
    let period = 2 * m as usize;
    push(
        "no p with t s^p = s t^p".into(),
        (0..period).all(|p| {
            ev(&format!("t{}", power_word('s', p))) != ev(&format!("s{}", power_word('t', p)))
        }),
    );
    if m % 2 == 1 {
        push(
            "alternating s..t of length m-1 != 1".into(),
            !ev(&alternating('s', 't', m as usize - 1)).is_identity(),
        );
    } else {
        push(
            "alternating s..t of length m-2 != 1".into(),
            !ev(&alternating('s', 't', m as usize - 2)).is_identity(),
        );
        push(
            "alternating s..t of length m != 1".into(),
            !ev(&alternating('s', 't', m as usize)).is_identity(),
        );
    }
    let tau_len = if m % 2 == 1 { m } else { m + 1 } as usize;
    let tau = alternating('s', 't', tau_len);
    let target = exponent_sum(&tau) as usize;
    let tau_el = ev(&tau);
    push(
        "no p with t^p s^(E-p) = tau".into(),
        (0..=target).all(|p| ev(&format!("{}{}", power_word('t', p), power_word('s', target - p))) != tau_el),
    );
    push(
        "no p with s^p t^(E-p) = tau".into(),
        (0..=target).all(|p| ev(&format!("{}{}", power_word('s', p), power_word('t', target - p))) != tau_el),
    );

    let group_order = dihedral_closure_size(m);
    push("group order is 2m".into(), group_order == 2 * m as usize);
    Ok(DihedralReport {
        m,
        group_order,
        cases,
    })
}

fn dihedral_closure_size(m: u32) -> usize {
    let gens = [DihedralElement::s(m), DihedralElement::t(m)];
    let mut seen = HashSet::from([DihedralElement::identity(m)]);
    let mut queue = VecDeque::from([DihedralElement::identity(m)]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

// ---------------------------------------------------------------------------
// Coxeter groups

/// Symmetric matrix of `m(u, v)`; `None` is `∞`, the diagonal is `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterMatrix {
    entries: Vec<Vec<Option<u32>>>,
}

impl CoxeterMatrix {
    pub fn from_fn(rank: usize, mut f: impl FnMut(usize, usize) -> Option<u32>) -> Self {
        let mut entries = vec![vec![Some(1); rank]; rank];
        for i in 0..rank {
            for j in i + 1..rank {
                let m = f(i, j);
                debug_assert!(m.is_none_or(|m| m >= 2));
                entries[i][j] = m;
                entries[j][i] = m;
            }
        }
        Self { entries }
    }

    /// Edges give their label; non-edges give `∞`.
    pub fn from_graph(g: &DefiningGraph) -> Self {
        Self::from_fn(g.vertex_count(), |u, v| g.label(u, v))
    }

    /// The dihedral group of order `2m` on generators `0 = s`, `1 = t`.
    pub fn dihedral(m: u32) -> Self {
        Self::from_fn(2, |_, _| Some(m))
    }

    /// Type `A_n`: a path of 3s.
    pub fn type_a(n: usize) -> Self {
        Self::from_fn(n, |i, j| Some(if j == i + 1 { 3 } else { 2 }))
    }

    /// Type `B_n`: a path with a 4 on the first bond.
    pub fn type_b(n: usize) -> Self {
        Self::from_fn(n, |i, j| {
            Some(match (i, j) {
                (0, 1) => 4,
                _ if j == i + 1 => 3,
                _ => 2,
            })
        })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn m(&self, i: usize, j: usize) -> Option<u32> {
        self.entries[i][j]
    }
}

/// A Coxeter group element in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CoxeterElement {
    word: Word,
}

impl CoxeterElement {
    pub fn identity() -> Self {
        Self { word: Vec::new() }
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Letters occurring in the word, sorted. Every reduced expression of an
    /// element has the same support.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.word.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[derive(Default)]
struct Memo {
    canonical: HashMap<Word, Word>,
    classes: HashMap<Word, Arc<Vec<Word>>>,
}

/// A Coxeter group with a memoized solution to its word problem.
pub struct CoxeterGroup {
    matrix: CoxeterMatrix,
    memo: RwLock<Memo>,
}

impl std::fmt::Debug for CoxeterGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoxeterGroup").field("matrix", &self.matrix).finish()
    }
}

/// Elements of word length at most `radius`, by length then word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub radius: usize,
    pub elements: Vec<CoxeterElement>,
    /// True when the whole group lies in the ball.
    pub closed: bool,
}

pub const DEFAULT_BALL_CAP: usize = 200_000;

impl CoxeterGroup {
    pub fn new(matrix: CoxeterMatrix) -> Self {
        Self {
            matrix,
            memo: RwLock::new(Memo::default()),
        }
    }

    pub fn from_graph(g: &DefiningGraph) -> Self {
        Self::new(CoxeterMatrix::from_graph(g))
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    fn braid_neighbors(&self, w: &[usize], out: &mut Vec<Word>) {
        for p in 0..w.len().saturating_sub(1) {
            let (a, b) = (w[p], w[p + 1]);
            if a == b {
                continue;
            }
            let Some(m) = self.matrix.m(a, b) else { continue };
            let m = m as usize;
            if p + m > w.len() {
                continue;
            }
            let alternates = (0..m).all(|q| w[p + q] == if q % 2 == 0 { a } else { b });
            if alternates {
                let mut next = w.to_vec();
                for q in 0..m {
                    next[p + q] = if q % 2 == 0 { b } else { a };
                }
                out.push(next);
            }
        }
    }

    /// All reduced expressions of the element with reduced expression `w`,
    /// sorted; the first one is canonical.
    fn class_of_reduced(&self, w: &[usize]) -> Arc<Vec<Word>> {
        {
            let memo = self.memo.read().expect("memo lock poisoned");
            if let Some(c) = memo.canonical.get(w) {
                return Arc::clone(&memo.classes[c]);
            }
        }
        let mut seen: HashSet<Word> = HashSet::from([w.to_vec()]);
        let mut queue = VecDeque::from([w.to_vec()]);
        let mut buf = Vec::new();
        while let Some(x) = queue.pop_front() {
            buf.clear();
            self.braid_neighbors(&x, &mut buf);
            for y in buf.drain(..) {
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut class: Vec<Word> = seen.into_iter().collect();
        class.sort_unstable();
        debug_assert!(class.iter().all(|x| x.windows(2).all(|p| p[0] != p[1])));
        let class = Arc::new(class);
        let mut memo = self.memo.write().expect("memo lock poisoned");
        let canonical = class[0].clone();
        if let Some(existing) = memo.classes.get(&canonical) {
            return Arc::clone(existing);
        }
        for member in class.iter() {
            memo.canonical.insert(member.clone(), canonical.clone());
        }
        memo.classes.insert(canonical, Arc::clone(&class));
        class
    }

    fn canonical_of_reduced(&self, w: &[usize]) -> Word {
        self.class_of_reduced(w)[0].clone()
    }

    /// Multiplies the canonical reduced word `cur` by generator `s` on the right.
    fn push_letter(&self, cur: &[usize], s: usize) -> Word {
        let class = self.class_of_reduced(cur);
        if let Some(member) = class.iter().find(|x| x.last() == Some(&s)) {
            let shorter = &member[..member.len() - 1];
            self.canonical_of_reduced(shorter)
        } else {
            let mut longer = cur.to_vec();
            longer.push(s);
            self.canonical_of_reduced(&longer)
        }
    }

    fn check_letters(&self, word: &[usize]) -> Result<(), CoxeterError> {
        match word.iter().find(|&&x| x >= self.rank()) {
            Some(&gen) => Err(CoxeterError::GeneratorOutOfRange { gen, rank: self.rank() }),
            None => Ok(()),
        }
    }

    /// Canonical reduced form of an arbitrary word.
    pub fn reduce(&self, word: &[usize]) -> CoxeterElement {
        self.try_reduce(word).expect("letters must be generators of the group")
    }

    pub fn try_reduce(&self, word: &[usize]) -> Result<CoxeterElement, CoxeterError> {
        self.check_letters(word)?;
        let mut cur: Word = Vec::new();
        for &s in word {
            cur = self.push_letter(&cur, s);
        }
        Ok(CoxeterElement { word: cur })
    }

    pub fn multiply(&self, x: &CoxeterElement, y: &CoxeterElement) -> CoxeterElement {
        let mut cur = x.word.clone();
        for &s in &y.word {
            cur = self.push_letter(&cur, s);
        }
        CoxeterElement { word: cur }
    }

    pub fn inverse(&self, x: &CoxeterElement) -> CoxeterElement {
        let rev: Word = x.word.iter().rev().copied().collect();
        CoxeterElement {
            word: self.canonical_of_reduced(&rev),
        }
    }

    pub fn words_equal(&self, u: &[usize], v: &[usize]) -> bool {
        self.reduce(u) == self.reduce(v)
    }

    /// All reduced expressions of `x`.
    pub fn reduced_words(&self, x: &CoxeterElement) -> Vec<Word> {
        self.class_of_reduced(&x.word).as_ref().clone()
    }

    pub fn is_right_descent(&self, x: &CoxeterElement, s: usize) -> bool {
        self.class_of_reduced(&x.word).iter().any(|w| w.last() == Some(&s))
    }

    pub fn is_left_descent(&self, x: &CoxeterElement, s: usize) -> bool {
        self.class_of_reduced(&x.word).iter().any(|w| w.first() == Some(&s))
    }

    /// Minimal-length element of the left coset `x W_U`.
    pub fn min_coset_rep(&self, x: &CoxeterElement, u: &[usize]) -> CoxeterElement {
        self.min_double_coset_rep(&[], x, u)
    }

    /// Minimal-length element of the double coset `W_I x W_J`, obtained by
    /// stripping left descents in `I` and right descents in `J` until none remain.
    pub fn min_double_coset_rep(&self, left: &[usize], x: &CoxeterElement, right: &[usize]) -> CoxeterElement {
        let mut cur = x.word.clone();
        loop {
            let class = self.class_of_reduced(&cur);
            if let Some(w) = class.iter().find(|w| w.first().is_some_and(|a| left.contains(a))) {
                cur = self.canonical_of_reduced(&w[1..]);
                continue;
            }
            if let Some(w) = class.iter().find(|w| w.last().is_some_and(|a| right.contains(a))) {
                cur = self.canonical_of_reduced(&w[..w.len() - 1]);
                continue;
            }
            return CoxeterElement { word: cur };
        }
    }

    /// Whether `x ∈ W_I W_J`.
    pub fn in_parabolic_product(&self, x: &CoxeterElement, left: &[usize], right: &[usize]) -> bool {
        self.min_double_coset_rep(left, x, right).is_identity()
    }

    /// All elements of length `<= radius`, deduplicated by canonical form.
    pub fn enumerate_ball(&self, radius: usize, cap: usize) -> Result<Ball, CoxeterError> {
        let mut elements = vec![CoxeterElement::identity()];
        let mut layer = vec![CoxeterElement::identity()];
        let mut closed = false;
        for _ in 0..radius {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for x in &layer {
                for s in 0..self.rank() {
                    if self.is_right_descent(x, s) {
                        continue;
                    }
                    let y = CoxeterElement {
                        word: self.push_letter(&x.word, s),
                    };
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                closed = true;
                break;
            }
            next.sort();
            elements.extend(next.iter().cloned());
            if elements.len() > cap {
                return Err(CoxeterError::BallCapExceeded {
                    cap,
                    partial: elements.len(),
                });
            }
            layer = next;
        }
        if !closed && !layer.is_empty() {
            // the group is finite and exhausted iff no element extends further
            closed = layer
                .iter()
                .all(|x| (0..self.rank()).all(|s| self.is_right_descent(x, s)));
        }
        Ok(Ball {
            radius,
            elements,
            closed,
        })
    }
}

/// Whether the support of `x` lies in `u`, i.e. `x ∈ W_U`.
pub fn parabolic_member(x: &CoxeterElement, u: &[usize]) -> bool {
    x.word().iter().all(|a| u.contains(a))
}

/// One-shot reduction without a shared memo.
pub fn tits_reduce(word: &[usize], matrix: &CoxeterMatrix) -> CoxeterElement {
    CoxeterGroup::new(matrix.clone()).reduce(word)
}

pub fn words_equal(u: &[usize], v: &[usize], matrix: &CoxeterMatrix) -> bool {
    let group = CoxeterGroup::new(matrix.clone());
    group.words_equal(u, v)
}

pub fn enumerate_ball(matrix: &CoxeterMatrix, radius: usize) -> Result<Ball, CoxeterError> {
    CoxeterGroup::new(matrix.clone()).enumerate_ball(radius, DEFAULT_BALL_CAP)
}
