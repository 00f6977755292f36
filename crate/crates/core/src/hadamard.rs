//! Constructive Hadamard matrices and Hadamard point sets.
//!
//! The registry covers Sylvester doubling, Paley type I (`q ≡ 3 mod 4`
//! prime) and Kronecker products of those. Orders outside the registry are
//! reported unavailable; nothing here assumes the Hadamard conjecture.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Exponent, PointConfiguration};

pub const DEFAULT_ORDER_CAP: usize = 1 << 12;

/// Square `±1` matrix with `H Hᵗ = N I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardMatrix {
    order: usize,
    entries: Vec<i8>,
    normalized: bool,
}

impl HadamardMatrix {
    fn from_entries(order: usize, entries: Vec<i8>) -> Self {
        debug_assert_eq!(entries.len(), order * order);
        let mut h = Self {
            order,
            entries,
            normalized: false,
        };
        h.normalized = h.check_normalized();
        h
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    fn check_normalized(&self) -> bool {
        (0..self.order).all(|k| self.get(0, k) == 1 && self.get(k, 0) == 1)
    }

    /// Flip column and row signs so the first row and column are all `+1`.
    pub fn normalize(mut self) -> Self {
        let n = self.order;
        for j in 0..n {
            if self.get(0, j) < 0 {
                for i in 0..n {
                    self.entries[i * n + j] = -self.entries[i * n + j];
                }
            }
        }
        for i in 0..n {
            if self.get(i, 0) < 0 {
                for j in 0..n {
                    self.entries[i * n + j] = -self.entries[i * n + j];
                }
            }
        }
        self.normalized = true;
        self
    }

    /// `H Hᵗ` in exact integer arithmetic.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.order;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.row(i)
                            .iter()
                            .zip(self.row(j))
                            .map(|(a, b)| i64::from(*a) * i64::from(*b))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_hadamard(&self) -> bool {
        let n = self.order as i64;
        self.gram()
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, v)| *v == if i == j { n } else { 0 }))
    }

    pub fn kronecker(&self, other: &HadamardMatrix) -> HadamardMatrix {
        let (a, b) = (self.order, other.order);
        let n = a * b;
        let mut entries = vec![0i8; n * n];
        for i in 0..a {
            for j in 0..a {
                let s = self.get(i, j);
                for k in 0..b {
                    for l in 0..b {
                        entries[(i * b + k) * n + (j * b + l)] = s * other.get(k, l);
                    }
                }
            }
        }
        HadamardMatrix::from_entries(n, entries)
    }

    /// One row per line, `+` for `+1` and `-` for `-1`.
    pub fn to_grid(&self) -> String {
        let mut out = String::with_capacity(self.order * (self.order + 1));
        for i in 0..self.order {
            for &v in self.row(i) {
                out.push(if v > 0 { '+' } else { '-' });
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`HadamardMatrix::to_grid`]; also checks orthogonality.
    pub fn from_grid(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let n = rows.len();
        if n == 0 {
            return Err(Error::MalformedGrid("empty grid".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != n {
                return Err(Error::MalformedGrid(format!("row {i} has length {} instead of {n}", row.chars().count())));
            }
            for c in row.chars() {
                entries.push(match c {
                    '+' => 1,
                    '-' => -1,
                    other => return Err(Error::MalformedGrid(format!("unexpected character '{other}'"))),
                });
            }
        }
        let h = HadamardMatrix::from_entries(n, entries);
        if !h.is_hadamard() {
            return Err(Error::MalformedGrid("rows are not orthogonal".into()));
        }
        Ok(h)
    }
}

/// Sylvester matrix of order `2^m`, capped at [`DEFAULT_ORDER_CAP`].
pub fn sylvester(m: u32) -> Result<HadamardMatrix> {
    sylvester_capped(m, DEFAULT_ORDER_CAP)
}

pub fn sylvester_capped(m: u32, cap: usize) -> Result<HadamardMatrix> {
    let order = if m < usize::BITS - 1 { 1usize << m } else { usize::MAX };
    if order > cap {
        return Err(Error::OrderOverflow { order, cap });
    }
    let base = HadamardMatrix::from_entries(2, vec![1, 1, 1, -1]);
    let mut h = HadamardMatrix::from_entries(1, vec![1]);
    while h.order < order {
        h = base.kronecker(&h);
    }
    Ok(h)
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn is_paley_prime(q: usize) -> bool {
    q % 4 == 3 && is_prime(q)
}

/// Paley type I matrix of order `q + 1` from the quadratic residues mod `q`.
pub fn paley(q: usize) -> Result<HadamardMatrix> {
    if !is_paley_prime(q) {
        return Err(Error::InvalidPrime(q));
    }
    let mut residue = vec![false; q];
    for x in 1..q {
        residue[x * x % q] = true;
    }
    let chi = |d: usize| -> i8 {
        if d == 0 {
            0
        } else if residue[d] {
            1
        } else {
            -1
        }
    };
    // H = I + S with S = [[0, 1ᵗ], [-1, Q]] and Q_ij = χ(j - i).
    let n = q + 1;
    let mut entries = vec![0i8; n * n];
    for j in 1..n {
        entries[j] = 1;
        entries[j * n] = -1;
    }
    for i in 0..q {
        for j in 0..q {
            entries[(i + 1) * n + (j + 1)] = chi((j + q - i) % q);
        }
    }
    for i in 0..n {
        entries[i * n + i] += 1;
    }
    Ok(HadamardMatrix::from_entries(n, entries).normalize())
}

fn construct(order: usize) -> Option<HadamardMatrix> {
    match order {
        0 => None,
        1 => Some(HadamardMatrix::from_entries(1, vec![1])),
        2 => sylvester(1).ok(),
        _ if !order.is_multiple_of(4) => None,
        _ => {
            if order.is_power_of_two() {
                return sylvester(order.trailing_zeros()).ok();
            }
            if is_paley_prime(order - 1) {
                return paley(order - 1).ok();
            }
            (2..order)
                .filter(|a| order.is_multiple_of(*a) && *a <= order / a)
                .find_map(|a| Some(construct(a)?.kronecker(&construct(order / a)?)))
                .map(HadamardMatrix::normalize)
        }
    }
}

/// Normalized matrix of the given order from the registry.
pub fn hadamard(order: usize) -> Result<HadamardMatrix> {
    hadamard_capped(order, DEFAULT_ORDER_CAP)
}

pub fn hadamard_capped(order: usize, cap: usize) -> Result<HadamardMatrix> {
    if order > cap {
        return Err(Error::OrderOverflow { order, cap });
    }
    construct(order).ok_or(Error::OrderUnavailable(order))
}

pub fn hadamard_order_available(order: usize) -> bool {
    hadamard_order_available_capped(order, DEFAULT_ORDER_CAP)
}

pub fn hadamard_order_available_capped(order: usize, cap: usize) -> bool {
    if order == 0 || order > cap {
        return false;
    }
    if order <= 2 {
        return true;
    }
    if !order.is_multiple_of(4) {
        return false;
    }
    order.is_power_of_two()
        || is_paley_prime(order - 1)
        || (2..order)
            .filter(|a| order.is_multiple_of(*a) && *a <= order / a)
            .any(|a| hadamard_order_available_capped(a, cap) && hadamard_order_available_capped(order / a, cap))
}

/// Rows of a normalized matrix with the leading `1` dropped, scaled to unit
/// l^p norm: `N` points of `R^{N-1}` summing to zero, carrying the uniform
/// barycentric certificate `1/N`.
pub fn hadamard_set(h: &HadamardMatrix, p: Exponent) -> Result<PointConfiguration> {
    if !h.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let n = h.order();
    if n < 2 {
        return Err(Error::InvalidDimension { min: 2, found: n });
    }
    let scale = ((n - 1) as f64).powf(-p.recip());
    let points = (0..n)
        .map(|i| h.row(i)[1..].iter().map(|&v| f64::from(v) * scale).collect())
        .collect();
    PointConfiguration::new(points, p)?.with_weights(vec![1.0 / n as f64; n])
}

/// Pairwise agreement counts of full rows and of rows with the first entry dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementCounts {
    pub order: usize,
    pub full: Vec<Vec<usize>>,
    pub truncated: Vec<Vec<usize>>,
}

impl AgreementCounts {
    /// Distinct full rows agree in exactly `N/2` places, truncated rows in `N/2 - 1`.
    pub fn is_regular(&self) -> bool {
        let n = self.order;
        if n < 2 {
            return true;
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                if i == j {
                    self.full[i][j] == n && self.truncated[i][j] == n - 1
                } else {
                    self.full[i][j] == n / 2 && self.truncated[i][j] + 1 == n / 2
                }
            })
        })
    }
}

pub fn row_agreement_counts(h: &HadamardMatrix) -> Result<AgreementCounts> {
    if !h.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let n = h.order();
    let count = |i: usize, j: usize, skip: usize| {
        h.row(i)[skip..]
            .iter()
            .zip(&h.row(j)[skip..])
            .filter(|(a, b)| a == b)
            .count()
    };
    Ok(AgreementCounts {
        order: n,
        full: (0..n).map(|i| (0..n).map(|j| count(i, j, 0)).collect()).collect(),
        truncated: (0..n).map(|i| (0..n).map(|j| count(i, j, 1)).collect()).collect(),
    })
}

/// Human-readable summary used by the CLI export.
pub fn describe(h: &HadamardMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# order {} normalized={}", h.order(), h.is_normalized());
    s.push_str(&h.to_grid());
    s
}
