//! Partitions, strict partitions, boxed plane partitions and the MacMahon
//! generating function.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::QPoly;

/// Weakly decreasing parts; the length is part of the value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
}

/// Strictly decreasing parts (site indices of an `N`-particle state).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrictPartition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotWeak);
        }
        Ok(Partition { parts })
    }

    pub fn zero(n: usize) -> Self {
        Partition { parts: vec![0; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `mu = lambda + delta_N`.
    pub fn to_strict(&self) -> StrictPartition {
        let n = self.parts.len();
        StrictPartition {
            parts: self.parts.iter().enumerate().map(|(i, p)| p + n - 1 - i).collect(),
        }
    }

    /// `lambda-hat`: append `k` zero parts.
    pub fn hat(&self, k: usize) -> Partition {
        let mut parts = self.parts.clone();
        parts.extend(std::iter::repeat_n(0, k));
        Partition { parts }
    }

    /// `mu-hat = lambda-hat + delta_N` with `N = len + k`.
    pub fn strict_hat(&self, k: usize) -> StrictPartition {
        self.hat(k).to_strict()
    }

    pub fn fits_box(&self, ell: usize, lower: usize) -> bool {
        self.parts.iter().all(|&p| p <= ell && p >= lower)
    }
}

impl StrictPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::NotStrict);
        }
        Ok(StrictPartition { parts })
    }

    /// Sort arbitrary distinct sites into a strict partition.
    pub fn from_sites(sites: &[usize]) -> Result<Self> {
        let mut parts = sites.to_vec();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        if parts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Collision);
        }
        Ok(StrictPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `lambda = mu - delta_N`.
    pub fn to_partition(&self) -> Partition {
        let n = self.parts.len();
        Partition {
            parts: self.parts.iter().enumerate().map(|(i, p)| p + 1 + i - n).collect(),
        }
    }
}

/// Which way [`convert_partition`] goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    ToStrict,
    ToWeak,
}

/// Convert between `lambda` and `mu = lambda + delta_N` for a declared length `n`.
pub fn convert_partition(parts: &[usize], direction: Direction, n: usize) -> Result<Vec<usize>> {
    if parts.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: parts.len(),
        });
    }
    Ok(match direction {
        Direction::ToStrict => Partition::new(parts.to_vec())?.to_strict().parts,
        Direction::ToWeak => StrictPartition::new(parts.to_vec())?.to_partition().parts,
    })
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl fmt::Display for StrictPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Every `ell >= l_1 >= ... >= l_N >= lower`, lexicographically decreasing.
#[derive(Clone, Debug)]
pub struct PartitionsInBox {
    current: Option<Vec<usize>>,
    lower: usize,
}

pub fn iter_partitions_in_box(n: usize, ell: usize, lower: usize) -> PartitionsInBox {
    PartitionsInBox {
        current: (ell >= lower).then(|| vec![ell; n]),
        lower,
    }
}

impl Iterator for PartitionsInBox {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let cur = self.current.take()?;
        let out = Partition { parts: cur.clone() };
        // Decrement the rightmost part above the floor and flatten the tail to it.
        if let Some(i) = cur.iter().rposition(|&p| p > self.lower) {
            let mut nxt = cur;
            let v = nxt[i] - 1;
            for p in &mut nxt[i..] {
                *p = v;
            }
            self.current = Some(nxt);
        }
        Some(out)
    }
}

/// A plane partition stored densely on the full `rows x cols` rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanePartition {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<usize>,
}

impl PlanePartition {
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.cols + j]
    }

    pub fn volume(&self) -> usize {
        self.entries.iter().sum()
    }

    pub fn is_valid(&self, height: usize) -> bool {
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let v = self.get(i, j);
                v <= height && (i == 0 || self.get(i - 1, j) >= v) && (j == 0 || self.get(i, j - 1) >= v)
            })
        })
    }

    pub fn to_text(&self) -> String {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Plane partitions in the box `B(L, N, K)`, lexicographic on row-major entries.
#[derive(Clone, Debug)]
pub struct PlanePartitions {
    rows: usize,
    cols: usize,
    height: usize,
    current: Option<Vec<usize>>,
}

pub fn iter_plane_partitions(l: usize, n: usize, k: usize) -> PlanePartitions {
    PlanePartitions {
        rows: l,
        cols: n,
        height: k,
        current: Some(vec![0; l * n]),
    }
}

impl Iterator for PlanePartitions {
    type Item = PlanePartition;

    fn next(&mut self) -> Option<PlanePartition> {
        let cur = self.current.take()?;
        let out = PlanePartition {
            rows: self.rows,
            cols: self.cols,
            entries: cur.clone(),
        };
        let cols = self.cols;
        let bound = |e: &[usize], c: usize| {
            let (i, j) = (c / cols, c % cols);
            let mut b = self.height;
            if i > 0 {
                b = b.min(e[c - cols]);
            }
            if j > 0 {
                b = b.min(e[c - 1]);
            }
            b
        };
        // Later cells only bound cells after them, so resetting the tail to 0 stays valid.
        if let Some(c) = (0..cur.len()).rev().find(|&c| cur[c] < bound(&cur, c)) {
            let mut nxt = cur;
            nxt[c] += 1;
            for v in &mut nxt[c + 1..] {
                *v = 0;
            }
            self.current = Some(nxt);
        }
        Some(out)
    }
}

/// `Z_q(L, N, K) = prod_{j<=L, k<=N} (1 - q^(K+j+k-1)) / (1 - q^(j+k-1))`.
pub fn zq_product(l: usize, n: usize, k: usize) -> QPoly {
    let one = QPoly::one();
    let mut num = QPoly::one();
    let mut den = QPoly::one();
    for j in 1..=l {
        for i in 1..=n {
            num = &num * &(&one - &QPoly::q_pow((k + j + i - 1) as i64));
            den = &den * &(&one - &QPoly::q_pow((j + i - 1) as i64));
        }
    }
    num.exact_div(&den)
        .expect("boxed plane-partition product is polynomial")
}

/// MacMahon's count `A(L, N, K)` of plane partitions in `B(L, N, K)`.
pub fn macmahon_count(l: usize, n: usize, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..=l {
        for i in 1..=n {
            num *= BigInt::from(k + j + i - 1);
            den *= BigInt::from(j + i - 1);
        }
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_conversions() {
        let l = Partition::new(vec![5, 3, 2, 2]).unwrap();
        assert_eq!(l.to_strict().parts(), &[8, 5, 3, 2]);
        assert_eq!(Partition::zero(3).to_strict().parts(), &[2, 1, 0]);
        let l = Partition::new(vec![5, 5, 3, 2]).unwrap();
        assert_eq!(l.strict_hat(2).parts(), &[10, 9, 6, 4, 1, 0]);
        assert_eq!(
            convert_partition(&[8, 5, 3, 2], Direction::ToWeak, 4).unwrap(),
            vec![5, 3, 2, 2]
        );
        assert_eq!(convert_partition(&[2, 2], Direction::ToWeak, 2), Err(Error::NotStrict));
        assert!(matches!(
            convert_partition(&[2, 2], Direction::ToStrict, 3),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn box_listings() {
        let l: Vec<_> = iter_partitions_in_box(1, 2, 0).map(|p| p.parts().to_vec()).collect();
        assert_eq!(l, vec![vec![2], vec![1], vec![0]]);
        let l: Vec<_> = iter_partitions_in_box(2, 1, 0).map(|p| p.parts().to_vec()).collect();
        assert_eq!(l, vec![vec![1, 1], vec![1, 0], vec![0, 0]]);
        let l: Vec<_> = iter_partitions_in_box(2, 2, 1).map(|p| p.parts().to_vec()).collect();
        assert_eq!(l, vec![vec![2, 2], vec![2, 1], vec![1, 1]]);
        assert_eq!(iter_partitions_in_box(0, 3, 0).count(), 1);
    }

    #[test]
    fn small_boxes() {
        assert_eq!(iter_plane_partitions(1, 1, 1).count(), 2);
        assert_eq!(iter_plane_partitions(2, 2, 1).count(), 6);
        assert_eq!(iter_plane_partitions(2, 2, 2).count(), 20);
        assert_eq!(zq_product(1, 1, 1), QPoly::from_i64s(0, &[1, 1]));
        assert_eq!(zq_product(2, 2, 1), QPoly::from_i64s(0, &[1, 1, 2, 1, 1]));
        assert_eq!(zq_product(3, 2, 0), QPoly::one());
        assert_eq!(macmahon_count(2, 2, 2), BigInt::from(20));
        assert_eq!(macmahon_count(2, 2, 1), BigInt::from(6));
        assert_eq!(macmahon_count(1, 1, 1), BigInt::from(2));
    }
}
