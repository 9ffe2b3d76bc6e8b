//! Bit-packed `2n`-row Pauli tableau shared by states and Clifford operators.
//!
//! Row `i < n` holds the image of `X_i` (a destabilizer for states), row
//! `n + i` the image of `Z_i` (a stabilizer for states). Each row is a
//! Hermitian Pauli tensor times `i^phase`.

use super::gf2::BitMatrix;
use super::pauli::{anticommutes, product_phase, words_for, Phase, PauliString};

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Tableau {
    pub n: usize,
    pub words: usize,
    pub x: Vec<u64>,
    pub z: Vec<u64>,
    pub phase: Vec<u8>,
}

impl Tableau {
    pub fn identity(n: usize) -> Self {
        let words = words_for(n);
        let mut t = Self {
            n,
            words,
            x: vec![0; 2 * n * words],
            z: vec![0; 2 * n * words],
            phase: vec![0; 2 * n],
        };
        for q in 0..n {
            t.x[q * words + q / 64] |= 1 << (q % 64);
            t.z[(n + q) * words + q / 64] |= 1 << (q % 64);
        }
        t
    }

    #[inline]
    pub fn rows(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn xr(&self, r: usize) -> &[u64] {
        &self.x[r * self.words..(r + 1) * self.words]
    }

    #[inline]
    pub fn zr(&self, r: usize) -> &[u64] {
        &self.z[r * self.words..(r + 1) * self.words]
    }

    #[inline]
    pub fn x_bit(&self, r: usize, q: usize) -> bool {
        (self.x[r * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, r: usize, q: usize) -> bool {
        (self.z[r * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn row_pauli(&self, r: usize) -> PauliString {
        PauliString::from_parts(
            self.n,
            self.xr(r),
            self.zr(r),
            Phase::from_exponent(self.phase[r] as u32),
        )
    }

    pub fn set_row(&mut self, r: usize, p: &PauliString) {
        let w = self.words;
        self.x[r * w..(r + 1) * w].copy_from_slice(p.x_words());
        self.z[r * w..(r + 1) * w].copy_from_slice(p.z_words());
        self.phase[r] = p.phase().exponent();
    }

    pub fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.x.copy_within(src * w..(src + 1) * w, dst * w);
        self.z.copy_within(src * w..(src + 1) * w, dst * w);
        self.phase[dst] = self.phase[src];
    }

    /// Overwrite row `r` with `(-1)^sign * Z_q`.
    pub fn set_row_z(&mut self, r: usize, q: usize, negative: bool) {
        let w = self.words;
        self.x[r * w..(r + 1) * w].fill(0);
        self.z[r * w..(r + 1) * w].fill(0);
        self.z[r * w + q / 64] |= 1 << (q % 64);
        self.phase[r] = if negative { 2 } else { 0 };
    }

    /// `row[target] <- row[target] * row[src]`.
    pub fn mul_row_into(&mut self, target: usize, src: usize) {
        let w = self.words;
        let k = product_phase(self.xr(target), self.zr(target), self.xr(src), self.zr(src));
        for i in 0..w {
            self.x[target * w + i] ^= self.x[src * w + i];
            self.z[target * w + i] ^= self.z[src * w + i];
        }
        self.phase[target] = ((self.phase[target] as u32 + self.phase[src] as u32 + k) % 4) as u8;
    }

    pub fn rows_anticommute(&self, a: usize, b: usize) -> bool {
        anticommutes(self.xr(a), self.zr(a), self.xr(b), self.zr(b))
    }

    pub fn h(&mut self, q: usize) {
        let (w, bit) = (q / 64, 1u64 << (q % 64));
        for r in 0..self.rows() {
            let i = r * self.words + w;
            let (xb, zb) = (self.x[i] & bit, self.z[i] & bit);
            if xb != 0 && zb != 0 {
                self.phase[r] ^= 2;
            }
            self.x[i] = (self.x[i] & !bit) | zb;
            self.z[i] = (self.z[i] & !bit) | xb;
        }
    }

    pub fn s(&mut self, q: usize) {
        let (w, bit) = (q / 64, 1u64 << (q % 64));
        for r in 0..self.rows() {
            let i = r * self.words + w;
            let (xb, zb) = (self.x[i] & bit, self.z[i] & bit);
            if xb != 0 && zb != 0 {
                self.phase[r] ^= 2;
            }
            self.z[i] ^= xb;
        }
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        let (wc, bc) = (control / 64, control % 64);
        let (wt, bt) = (target / 64, target % 64);
        for r in 0..self.rows() {
            let base = r * self.words;
            let xa = (self.x[base + wc] >> bc) & 1;
            let za = (self.z[base + wc] >> bc) & 1;
            let xb = (self.x[base + wt] >> bt) & 1;
            let zb = (self.z[base + wt] >> bt) & 1;
            if xa & zb & (xb ^ za ^ 1) == 1 {
                self.phase[r] ^= 2;
            }
            self.x[base + wt] ^= xa << bt;
            self.z[base + wc] ^= zb << bc;
        }
    }

    /// Image of the Pauli `(x, z, phase)` under the Clifford whose generator
    /// images are the rows of `self`.
    pub fn conjugate_raw(&self, x: &[u64], z: &[u64], phase: u8) -> (Vec<u64>, Vec<u64>, u8) {
        let w = self.words;
        let mut ox = vec![0u64; w];
        let mut oz = vec![0u64; w];
        let mut k = phase as u32;
        for q in 0..self.n {
            let xq = (x[q / 64] >> (q % 64)) & 1 == 1;
            let zq = (z[q / 64] >> (q % 64)) & 1 == 1;
            if xq && zq {
                // Y = i X Z
                k += 1;
            }
            if xq {
                k += self.accumulate(&mut ox, &mut oz, q);
            }
            if zq {
                k += self.accumulate(&mut ox, &mut oz, self.n + q);
            }
        }
        (ox, oz, (k % 4) as u8)
    }

    #[inline]
    fn accumulate(&self, ox: &mut [u64], oz: &mut [u64], r: usize) -> u32 {
        let k = product_phase(ox, oz, self.xr(r), self.zr(r)) + self.phase[r] as u32;
        for (i, (a, b)) in ox.iter_mut().zip(oz.iter_mut()).enumerate() {
            *a ^= self.x[r * self.words + i];
            *b ^= self.z[r * self.words + i];
        }
        k
    }

    /// The `2n x 2n` binary matrix `[x | z]`, one row per tableau row.
    pub fn binary_matrix(&self) -> BitMatrix {
        let n = self.n;
        let mut m = BitMatrix::zeros(2 * n, 2 * n);
        for r in 0..2 * n {
            for q in 0..n {
                if self.x_bit(r, q) {
                    m.set(r, q, true);
                }
                if self.z_bit(r, q) {
                    m.set(r, n + q, true);
                }
            }
        }
        m
    }

    /// Rows `i` and `n + i` anticommute; all other pairs commute.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..2 * n {
            for b in (a + 1)..2 * n {
                let expect = b == a + n;
                if self.rows_anticommute(a, b) != expect {
                    return false;
                }
            }
        }
        true
    }
}
