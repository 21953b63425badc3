//! Exponent vectors over the four variable families `q, p, λ, t`.

use std::cmp::Ordering;
use std::fmt;

/// Largest supported number of degrees of freedom.
pub const MAX_DIM: usize = 6;

const SLOTS: usize = 4 * MAX_DIM;

/// A single variable of `C[[t, λ, q, p]]`, indices are zero based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q(usize),
    P(usize),
    Lambda(usize),
    T(usize),
}

impl Var {
    fn slot(self) -> usize {
        match self {
            Var::Q(i) => i,
            Var::P(i) => MAX_DIM + i,
            Var::Lambda(i) => 2 * MAX_DIM + i,
            Var::T(i) => 3 * MAX_DIM + i,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Var::Q(i) | Var::P(i) | Var::Lambda(i) | Var::T(i) => i,
        }
    }

    /// Contribution of one power of this variable to the graded degree.
    pub fn weight(self) -> u32 {
        match self {
            Var::Q(_) | Var::P(_) => 1,
            Var::Lambda(_) => 2,
            Var::T(_) => 0,
        }
    }

    /// Textual prefix used by the series grammar.
    pub fn prefix(self) -> char {
        match self {
            Var::Q(_) => 'q',
            Var::P(_) => 'p',
            Var::Lambda(_) => 'l',
            Var::T(_) => 't',
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.prefix(), self.index() + 1)
    }
}

/// Exponent vector `t^d λ^c q^a p^b`.
///
/// Stored as a fixed array laid out `[q | p | λ | t]`, each block `MAX_DIM`
/// wide, so monomials of any dimension `n <= MAX_DIM` compare and hash
/// uniformly. Unused slots are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u8; SLOTS],
}

impl Monomial {
    pub const fn one() -> Self {
        Monomial { exps: [0; SLOTS] }
    }

    pub fn var(v: Var) -> Self {
        Self::one().with_exp(v, 1)
    }

    pub fn with_exp(mut self, v: Var, e: u8) -> Self {
        assert!(v.index() < MAX_DIM, "variable index out of range");
        self.exps[v.slot()] = e;
        self
    }

    /// Builds `q^a p^b` from exponent slices of equal length.
    pub fn qp(a: &[u8], b: &[u8]) -> Self {
        assert_eq!(a.len(), b.len());
        let mut m = Self::one();
        for (i, (&ai, &bi)) in a.iter().zip(b).enumerate() {
            m = m.with_exp(Var::Q(i), ai).with_exp(Var::P(i), bi);
        }
        m
    }

    pub fn exp(&self, v: Var) -> u8 {
        self.exps[v.slot()]
    }

    pub fn q(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn p(&self, i: usize) -> u8 {
        self.exps[MAX_DIM + i]
    }

    pub fn lambda(&self, i: usize) -> u8 {
        self.exps[2 * MAX_DIM + i]
    }

    pub fn t(&self, i: usize) -> u8 {
        self.exps[3 * MAX_DIM + i]
    }

    fn block_sum(&self, block: usize) -> u32 {
        self.exps[block * MAX_DIM..(block + 1) * MAX_DIM]
            .iter()
            .map(|&e| e as u32)
            .sum()
    }

    /// `|a| + |b| + 2|c|`; the `t` exponents carry degree zero.
    pub fn graded_degree(&self) -> u32 {
        self.block_sum(0) + self.block_sum(1) + 2 * self.block_sum(2)
    }

    pub fn qp_degree(&self) -> u32 {
        self.block_sum(0) + self.block_sum(1)
    }

    pub fn lambda_degree(&self) -> u32 {
        self.block_sum(2)
    }

    pub fn t_degree(&self) -> u32 {
        self.block_sum(3)
    }

    /// True when the monomial only involves the parameters `t, λ`.
    pub fn is_parameter_only(&self) -> bool {
        self.qp_degree() == 0
    }

    /// True when `q_i` and `p_i` appear with equal powers for every `i`,
    /// i.e. the monomial lies in the kernel of `{Σ α_i q_i p_i, -}`.
    pub fn is_normal(&self) -> bool {
        (0..MAX_DIM).all(|i| self.q(i) == self.p(i))
    }

    /// `b - a`, the lattice vector whose pairing with `α` is the eigenvalue
    /// of `{Σ α_i q_i p_i, -}` on this monomial.
    pub fn divisor_vector(&self, dim: usize) -> Vec<i32> {
        (0..dim)
            .map(|i| self.p(i) as i32 - self.q(i) as i32)
            .collect()
    }

    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Monomial::one();
        for s in 0..SLOTS {
            out.exps[s] = self.exps[s].checked_add(other.exps[s])?;
        }
        Some(out)
    }

    /// Removes one power of `v`; `None` if `v` does not divide the monomial.
    pub fn lower(&self, v: Var) -> Option<Monomial> {
        let s = v.slot();
        let e = self.exps[s].checked_sub(1)?;
        let mut out = *self;
        out.exps[s] = e;
        Some(out)
    }

    /// Largest variable index in use plus one; zero for the unit monomial.
    pub fn required_dim(&self) -> usize {
        (0..MAX_DIM)
            .rev()
            .find(|&i| self.q(i) != 0 || self.p(i) != 0 || self.lambda(i) != 0 || self.t(i) != 0)
            .map_or(0, |i| i + 1)
    }

    /// Nonzero factors in print order `q, p, λ, t`.
    pub fn factors(&self) -> impl Iterator<Item = (Var, u8)> + '_ {
        let families: [fn(usize) -> Var; 4] = [Var::Q, Var::P, Var::Lambda, Var::T];
        families.into_iter().flat_map(move |fam| {
            (0..MAX_DIM).filter_map(move |i| {
                let v = fam(i);
                let e = self.exp(v);
                (e > 0).then_some((v, e))
            })
        })
    }

    /// Flat exponent list `[q.. | p.. | l.. | t..]` of length `4 * dim`.
    pub fn to_flat(&self, dim: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(4 * dim);
        for block in 0..4 {
            for i in 0..dim {
                out.push(self.exps[block * MAX_DIM + i] as u32);
            }
        }
        out
    }

    pub fn from_flat(dim: usize, flat: &[u32]) -> Option<Monomial> {
        if flat.len() != 4 * dim || dim > MAX_DIM {
            return None;
        }
        let mut m = Monomial::one();
        for block in 0..4 {
            for i in 0..dim {
                m.exps[block * MAX_DIM + i] = u8::try_from(flat[block * dim + i]).ok()?;
            }
        }
        Some(m)
    }
}

impl Default for Monomial {
    fn default() -> Self {
        Monomial::one()
    }
}

/// Graded-lexicographic: lower graded degree first, then lexicographic on
/// `(q, p, λ, t)` with larger leading exponents first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.graded_degree()
            .cmp(&other.graded_degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in self.factors() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial({self})")
    }
}
