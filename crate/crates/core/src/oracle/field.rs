//! Arithmetic in `F_p` for primes below `2^31`, and incremental row echelon.
//!
//! Field elements are stored as `u32`; a product plus an element stays below
//! `2^63`, so one reduction per multiply-add suffices.

use crate::error::{Error, Result};

pub const MERSENNE_31: u64 = (1 << 31) - 1;

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Reduction of a product of two field elements plus a field element.
pub trait Reduce: Copy + Send + Sync {
    fn p(&self) -> u64;
    /// `x mod p` for `x < 2^63`.
    fn reduce(&self, x: u64) -> u64;
}

#[derive(Clone, Copy, Debug)]
pub struct Mersenne31;

impl Reduce for Mersenne31 {
    #[inline(always)]
    fn p(&self) -> u64 {
        MERSENNE_31
    }

    #[inline(always)]
    fn reduce(&self, x: u64) -> u64 {
        let x = (x & MERSENNE_31) + (x >> 31);
        let x = (x & MERSENNE_31) + (x >> 31);
        if x >= MERSENNE_31 {
            x - MERSENNE_31
        } else {
            x
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Generic(pub u64);

impl Reduce for Generic {
    #[inline(always)]
    fn p(&self) -> u64 {
        self.0
    }

    #[inline(always)]
    fn reduce(&self, x: u64) -> u64 {
        x % self.0
    }
}

/// Field operations on top of a reducer.
#[derive(Clone, Copy, Debug)]
pub struct Field<R: Reduce>(pub R);

impl<R: Reduce> Field<R> {
    #[inline(always)]
    pub fn p(&self) -> u64 {
        self.0.p()
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.0.reduce(a * b)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p() {
            s - self.p()
        } else {
            s
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p() != 0);
        self.pow(a, self.p() - 2)
    }

    /// `n mod p` for a small integer.
    pub fn from_u64(&self, n: u64) -> u64 {
        n % self.p()
    }
}

/// Checks that `p` is a usable prime: odd and below `2^31`.
pub fn check_prime(p: u64) -> Result<()> {
    if p >= 1 << 31 {
        return Err(Error::invalid(format!("prime {p} must be below 2^31")));
    }
    if !is_prime(p) || p < 3 {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Rows in semi-echelon form: each pivot row has a leading 1 and zeros in
/// the pivot columns of all earlier rows.
pub struct Echelon<R: Reduce> {
    field: Field<R>,
    columns: usize,
    pivots: Vec<(usize, Vec<u32>)>,
    avx2: bool,
}

impl<R: Reduce> Echelon<R> {
    pub fn new(field: Field<R>, columns: usize) -> Self {
        Echelon {
            field,
            columns,
            pivots: Vec::new(),
            #[cfg(target_arch = "x86_64")]
            avx2: std::is_x86_feature_detected!("avx2"),
            #[cfg(not(target_arch = "x86_64"))]
            avx2: false,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.columns
    }

    /// Reduces `row` against the pivots and keeps it if it is independent.
    /// Entries must already be reduced mod `p`.
    pub fn insert(&mut self, row: Vec<u32>) -> bool {
        self.insert_block(vec![row]) == 1
    }

    /// Inserts several rows, returning how many were independent. Each old
    /// pivot row is streamed once for the whole block, which matters once
    /// the pivots no longer fit in cache.
    pub fn insert_block(&mut self, mut rows: Vec<Vec<u32>>) -> usize {
        if self.is_full() {
            return 0;
        }
        let old = self.pivots.len();
        for k in 0..old {
            let (pc, prow) = &self.pivots[k];
            for row in rows.iter_mut() {
                self.eliminate(row, *pc, prow);
            }
        }
        let mut added = 0;
        for mut row in rows {
            if self.is_full() {
                break;
            }
            for (pc, prow) in &self.pivots[old..] {
                self.eliminate(&mut row, *pc, prow);
            }
            if self.push(row) {
                added += 1;
            }
        }
        added
    }

    #[inline]
    fn eliminate(&self, row: &mut [u32], pc: usize, prow: &[u32]) {
        debug_assert_eq!(row.len(), prow.len());
        let f = row[pc] as u64;
        if f == 0 {
            return;
        }
        let nf = (self.field.p() - f) as u32;
        #[cfg(target_arch = "x86_64")]
        if self.avx2 {
            // SAFETY: the CPU supports AVX2, checked in `new`.
            unsafe { axpy_avx2(self.field.0, &mut row[pc..], &prow[pc..], nf) };
            return;
        }
        axpy(self.field.0, &mut row[pc..], &prow[pc..], nf);
    }

    /// Normalizes a fully reduced row and records it as a pivot.
    fn push(&mut self, mut row: Vec<u32>) -> bool {
        let Some(lead) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = self.field.inv(row[lead] as u64);
        for x in &mut row[lead..] {
            *x = self.field.mul(*x as u64, s) as u32;
        }
        self.pivots.push((lead, row));
        true
    }
}

/// `row += nf * prow`.
#[inline(always)]
fn axpy<R: Reduce>(red: R, row: &mut [u32], prow: &[u32], nf: u32) {
    for (x, &y) in row.iter_mut().zip(prow) {
        *x = red.reduce(*x as u64 + nf as u64 * y as u64) as u32;
    }
}

// The same loop compiled with AVX2 so it vectorizes on the usual hardware
// without requiring `-C target-cpu`.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn axpy_avx2<R: Reduce>(red: R, row: &mut [u32], prow: &[u32], nf: u32) {
    axpy(red, row, prow, nf)
}
