//! Enumeration of the half lattice `{j ∈ Zⁿ : j ≠ 0, first nonzero j_i > 0}`
//! inside the Euclidean ball of radius `2^K`.

use rayon::prelude::*;

use super::{ArithmeticError, Result};

/// Largest number of box points `(2^{K+1} + 1)^n` accepted.
pub const MAX_POINTS: f64 = 1e9;

pub(crate) fn check_feasible(n: usize, levels: u32) -> Result<()> {
    if n == 0 {
        return Err(ArithmeticError::InvalidInput(
            "dimension must be positive".into(),
        ));
    }
    if levels > 30 {
        return Err(ArithmeticError::Infeasible {
            n,
            levels,
            points: f64::INFINITY,
        });
    }
    let points = ((1u64 << (levels + 1)) as f64 + 1.0).powi(n as i32);
    if points > MAX_POINTS {
        return Err(ArithmeticError::Infeasible { n, levels, points });
    }
    Ok(())
}

/// Smallest `k` with `‖j‖² <= 4^k`.
pub(crate) fn level_of(norm2: u64) -> u32 {
    let mut k = 0;
    while norm2 > 1u64 << (2 * k) {
        k += 1;
    }
    k
}

/// `|⟨j, x⟩|`, snapped to zero when it is within rounding of cancelling.
pub(crate) fn small_divisor(j: &[i32], x: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut mag = 0.0;
    for (&ji, &xi) in j.iter().zip(x) {
        let t = ji as f64 * xi;
        dot += t;
        mag += t.abs();
    }
    let v = dot.abs();
    if v <= 8.0 * f64::EPSILON * mag {
        0.0
    } else {
        v
    }
}

/// Calls `visit(j, ‖j‖², level)` for every half-lattice point with first
/// coordinate `j0` and `‖j‖ <= 2^levels`.
fn visit_slice<F: FnMut(&[i32], u64, u32)>(n: usize, levels: u32, j0: i32, mut visit: F) {
    let bound = 1i64 << levels;
    let max2 = 1u64 << (2 * levels);
    let mut j = vec![0i32; n];
    j[0] = j0;
    let head2 = (j0 as i64 * j0 as i64) as u64;
    if n == 1 {
        if j0 > 0 && head2 <= max2 {
            visit(&j, head2, level_of(head2));
        }
        return;
    }
    // odometer over j[1..] in [-bound, bound]
    for x in j.iter_mut().skip(1) {
        *x = -(bound as i32);
    }
    loop {
        let norm2: u64 = head2
            + j[1..]
                .iter()
                .map(|&x| (x as i64 * x as i64) as u64)
                .sum::<u64>();
        let positive = j0 > 0 || j[1..].iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
        if positive && norm2 <= max2 {
            visit(&j, norm2, level_of(norm2));
        }
        let mut idx = n - 1;
        loop {
            if (j[idx] as i64) < bound {
                j[idx] += 1;
                break;
            }
            j[idx] = -(bound as i32);
            idx -= 1;
            if idx == 0 {
                return;
            }
        }
    }
}

/// Best candidate at a level: ordered by value, then norm, then `j`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Best {
    pub value: f64,
    pub norm2: u64,
    pub j: Vec<i32>,
}

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        (self.value, self.norm2, &self.j)
            .partial_cmp(&(other.value, other.norm2, &other.j))
            .is_some_and(|o| o.is_lt())
    }
}

fn offer(slot: &mut Option<Best>, cand: Best) {
    if slot.as_ref().is_none_or(|b| cand.better_than(b)) {
        *slot = Some(cand);
    }
}

/// Per-level minima of `|⟨j, x⟩|` (not yet prefix-minimised).
pub(crate) fn level_minima(x: &[f64], levels: u32) -> Result<Vec<Option<Best>>> {
    let n = x.len();
    check_feasible(n, levels)?;
    let slices: Vec<Vec<Option<Best>>> = (0..=(1i32 << levels))
        .into_par_iter()
        .map(|j0| {
            let mut per = vec![None; levels as usize + 1];
            visit_slice(n, levels, j0, |j, norm2, level| {
                let value = small_divisor(j, x);
                let slot: &mut Option<Best> = &mut per[level as usize];
                if slot.as_ref().is_none_or(|b| value <= b.value) {
                    offer(
                        slot,
                        Best {
                            value,
                            norm2,
                            j: j.to_vec(),
                        },
                    );
                }
            });
            per
        })
        .collect();
    let mut merged = vec![None; levels as usize + 1];
    for per in slices {
        for (slot, cand) in merged.iter_mut().zip(per) {
            if let Some(c) = cand {
                offer(slot, c);
            }
        }
    }
    Ok(merged)
}

/// Cached half-lattice points for repeated membership tests.
#[derive(Clone, Debug)]
pub struct HalfLattice {
    n: usize,
    levels: u32,
    coords: Vec<i32>,
    point_levels: Vec<u32>,
}

impl HalfLattice {
    pub fn new(n: usize, levels: u32) -> Result<Self> {
        check_feasible(n, levels)?;
        let mut coords = Vec::new();
        let mut point_levels = Vec::new();
        for j0 in 0..=(1i32 << levels) {
            visit_slice(n, levels, j0, |j, _, level| {
                coords.extend_from_slice(j);
                point_levels.push(level);
            });
        }
        Ok(HalfLattice {
            n,
            levels,
            coords,
            point_levels,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.point_levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_levels.is_empty()
    }

    /// `(point, level)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[i32], u32)> {
        self.coords
            .chunks_exact(self.n)
            .zip(self.point_levels.iter().copied())
    }

    /// Per-level minima of `|⟨j, x⟩|`, each with its first achiever.
    pub(crate) fn level_minima(&self, x: &[f64]) -> Vec<Option<(f64, usize)>> {
        let mut per: Vec<Option<(f64, usize)>> = vec![None; self.levels as usize + 1];
        for (idx, (j, level)) in self.iter().enumerate() {
            let v = small_divisor(j, x);
            let slot = &mut per[level as usize];
            let better = match *slot {
                None => true,
                Some((b, bi)) => v < b || (v == b && self.key(idx) < self.key(bi)),
            };
            if better {
                *slot = Some((v, idx));
            }
        }
        per
    }

    fn key(&self, idx: usize) -> (u64, &[i32]) {
        let j = self.point(idx);
        (j.iter().map(|&x| (x as i64 * x as i64) as u64).sum(), j)
    }

    pub(crate) fn point(&self, idx: usize) -> &[i32] {
        &self.coords[idx * self.n..(idx + 1) * self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels() {
        assert_eq!(level_of(1), 0);
        assert_eq!(level_of(2), 1);
        assert_eq!(level_of(4), 1);
        assert_eq!(level_of(5), 2);
        assert_eq!(level_of(16), 2);
    }

    #[test]
    fn half_lattice_counts() {
        // points of Z² with 0 < |j|² <= 4, half of them
        let l = HalfLattice::new(2, 1).unwrap();
        assert_eq!(l.len(), 6);
        assert!(l.iter().all(|(j, _)| j[0] > 0 || (j[0] == 0 && j[1] > 0)));
        let l1 = HalfLattice::new(1, 3).unwrap();
        assert_eq!(l1.len(), 8);
    }

    #[test]
    fn exact_cancellation_snaps() {
        assert_eq!(small_divisor(&[1, -2], &[1.0, 0.5]), 0.0);
        assert!(small_divisor(&[1, -1], &[1.0, 2f64.sqrt()]) > 0.4);
    }

    #[test]
    fn guard() {
        assert!(check_feasible(2, 12).is_ok());
        assert!(matches!(
            check_feasible(3, 10),
            Err(ArithmeticError::Infeasible { .. })
        ));
    }
}
