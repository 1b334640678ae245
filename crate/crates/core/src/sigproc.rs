//! Complex linear algebra, normalized DFT, cyclic convolution, and QPSK
//! symbol mapping.
//!
//! Everything here is a pure function of its inputs; values are immutable
//! after construction and safe to share across threads.
//!
//! The DFT is unitary (`1/sqrt(N)` scaling in both directions), so the
//! convolution theorem picks up a `sqrt(N)` factor:
//! `dft(a (*) b) = sqrt(N) * dft(a) .* dft(b)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::{Error, Result};

/// Dense complex vector. All elements are finite and the length is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    elements: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(elements: Vec<Complex64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument {
                context: "ComplexVector::new",
                reason: "length must be positive".into(),
            });
        }
        if !elements
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite("ComplexVector"));
        }
        Ok(Self { elements })
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "ComplexVector length must be positive");
        Self {
            elements: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Unit impulse `e_k` of the given length.
    pub fn impulse(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.elements[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        assert!(len > 0, "ComplexVector length must be positive");
        Self {
            elements: (0..len).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.elements.iter()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.elements
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Elementwise (Hadamard) product; lengths must match.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                context: "hadamard",
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Self {
            elements: self
                .elements
                .iter()
                .zip(other.elements.iter())
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            elements: self.elements.iter().map(|z| z * factor).collect(),
        }
    }

    /// Zero-pad (or error if the target is shorter than the source).
    pub fn zero_padded(&self, len: usize) -> Result<Self> {
        if len < self.len() {
            return Err(Error::DimensionMismatch {
                context: "zero_padded",
                expected: self.len(),
                actual: len,
            });
        }
        let mut elements = self.elements.clone();
        elements.resize(len, Complex64::new(0.0, 0.0));
        Ok(Self { elements })
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.elements[i]
    }
}

/// Dense or diagonal complex matrix in row-major order.
///
/// Diagonal storage elides the off-diagonal entries; reads of elided entries
/// return zero exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<Complex64>),
    Diagonal(Vec<Complex64>),
}

impl ComplexMatrix {
    pub fn dense(rows: usize, cols: usize, elements: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || elements.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::dense",
                expected: rows * cols,
                actual: elements.len(),
            });
        }
        if !elements
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite("ComplexMatrix"));
        }
        Ok(Self {
            rows,
            cols,
            storage: Storage::Dense(elements),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            storage: Storage::Dense(vec![Complex64::new(0.0, 0.0); rows * cols]),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![Complex64::new(1.0, 0.0); n]).expect("identity diagonal is finite")
    }

    /// Square matrix known to be diagonal; off-diagonal storage is elided.
    pub fn diagonal(diag: Vec<Complex64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument {
                context: "ComplexMatrix::diagonal",
                reason: "diagonal must be non-empty".into(),
            });
        }
        if !diag.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("ComplexMatrix"));
        }
        let n = diag.len();
        Ok(Self {
            rows: n,
            cols: n,
            storage: Storage::Diagonal(diag),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.storage, Storage::Diagonal(_))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        match &self.storage {
            Storage::Dense(data) => data[r * self.cols + c],
            Storage::Diagonal(diag) => {
                if r == c {
                    diag[r]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn set(&mut self, r: usize, c: usize, value: Complex64) {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        match &mut self.storage {
            Storage::Dense(data) => data[r * self.cols + c] = value,
            Storage::Diagonal(diag) => {
                if r == c {
                    diag[r] = value;
                } else if value != Complex64::new(0.0, 0.0) {
                    panic!("cannot set off-diagonal entry of a diagonal matrix");
                }
            }
        }
    }

    /// Row `r` as a vector of `cols` entries (materializes zeros for
    /// diagonal storage).
    pub fn row(&self, r: usize) -> Vec<Complex64> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn matvec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                actual: x.len(),
            });
        }
        let out = match &self.storage {
            Storage::Diagonal(diag) => diag
                .iter()
                .zip(x.iter())
                .map(|(d, v)| d * v)
                .collect::<Vec<_>>(),
            Storage::Dense(data) => (0..self.rows)
                .map(|r| {
                    let row = &data[r * self.cols..(r + 1) * self.cols];
                    row.iter().zip(x.iter()).map(|(m, v)| m * v).sum()
                })
                .collect(),
        };
        ComplexVector::new(out)
    }
}

/// Supported constellations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Qpsk,
}

/// Unit-magnitude source symbols on the N subcarriers.
#[derive(Debug, Clone)]
pub struct SymbolVector {
    symbols: ComplexVector,
    modulation: Modulation,
}

impl SymbolVector {
    pub fn symbols(&self) -> &ComplexVector {
        &self.symbols
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Gray-maps a bit sequence of length `2N` onto `N` unit-power QPSK symbols.
///
/// A pair `(b0, b1)` maps the in-phase sign from `b0` and the quadrature
/// sign from `b1`: bit 0 is `+`, bit 1 is `-`, so `(0,0) -> (1+i)/sqrt(2)`.
pub fn qpsk_map(bits: &[bool]) -> Result<SymbolVector> {
    if bits.is_empty() || !bits.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument {
            context: "qpsk_map",
            reason: format!("bit count must be even and positive, got {}", bits.len()),
        });
    }
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let symbols = bits
        .chunks_exact(2)
        .map(|pair| {
            let re = if pair[0] { -amp } else { amp };
            let im = if pair[1] { -amp } else { amp };
            Complex64::new(re, im)
        })
        .collect();
    Ok(SymbolVector {
        symbols: ComplexVector::new(symbols)?,
        modulation: Modulation::Qpsk,
    })
}

/// Maximum-likelihood QPSK decision: the quadrant of the received sample,
/// returned as the Gray bit pair that [`qpsk_map`] would have used.
pub fn qpsk_demap(sample: Complex64) -> (bool, bool) {
    (sample.re < 0.0, sample.im < 0.0)
}

/// Unitary forward DFT: `X_k = (1/sqrt(N)) sum_n x_n exp(-2 pi i k n / N)`.
pub fn dft(x: &ComplexVector) -> ComplexVector {
    transform(x, TransformDirection::Forward)
}

/// Unitary inverse DFT; `idft(dft(x)) == x` up to rounding.
pub fn idft(x: &ComplexVector) -> ComplexVector {
    transform(x, TransformDirection::Inverse)
}

#[derive(Clone, Copy)]
enum TransformDirection {
    Forward,
    Inverse,
}

fn transform(x: &ComplexVector, dir: TransformDirection) -> ComplexVector {
    let n = x.len();
    let sign = match dir {
        TransformDirection::Forward => -1.0,
        TransformDirection::Inverse => 1.0,
    };
    let mut data: Vec<Complex64> = x.as_slice().to_vec();
    if n.is_power_of_two() && n > 1 {
        fft_in_place(&mut data, sign);
    } else {
        data = direct_dft(x.as_slice(), sign);
    }
    let scale = 1.0 / (n as f64).sqrt();
    for z in &mut data {
        *z *= scale;
    }
    ComplexVector::new(data).expect("transform of finite input is finite")
}

/// Direct O(N^2) reference transform, used for non-power-of-two lengths.
fn direct_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, v) in x.iter().enumerate() {
                let angle = sign * 2.0 * PI * (k as f64) * (m as f64) / (n as f64);
                acc += v * Complex64::new(angle.cos(), angle.sin());
            }
            acc
        })
        .collect()
}

/// Iterative radix-2 Cooley-Tukey, unscaled.
fn fft_in_place(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = sign * 2.0 * PI / (len as f64);
        let w_len = Complex64::new(angle.cos(), angle.sin());
        for chunk in data.chunks_mut(len) {
            let mut w = Complex64::new(1.0, 0.0);
            let half = len / 2;
            for i in 0..half {
                let u = chunk[i];
                let v = chunk[i + half] * w;
                chunk[i] = u + v;
                chunk[i + half] = u - v;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}

/// Cyclic convolution: `(a (*) b)[n] = sum_m a[m] b[(n - m) mod N]`.
pub fn cyclic_convolve(a: &ComplexVector, b: &ComplexVector) -> Result<ComplexVector> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "cyclic_convolve",
            expected: n,
            actual: b.len(),
        });
    }
    let out = (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                acc += a[m] * b[(k + n - m) % n];
            }
            acc
        })
        .collect();
    ComplexVector::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vector(rng: &mut impl Rng, n: usize) -> ComplexVector {
        ComplexVector::from_fn(n, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn rel_err(a: &ComplexVector, b: &ComplexVector) -> f64 {
        let num: f64 = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        num / b.norm().max(1e-300)
    }

    #[test]
    fn qpsk_map_gray_corners() {
        let s = qpsk_map(&[false, false, true, true]).unwrap();
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.symbols()[0].re, amp, epsilon = 0.0);
        assert_abs_diff_eq!(s.symbols()[0].im, amp, epsilon = 0.0);
        assert_abs_diff_eq!(s.symbols()[1].re, -amp, epsilon = 0.0);
        assert_abs_diff_eq!(s.symbols()[1].im, -amp, epsilon = 0.0);
    }

    #[test]
    fn qpsk_map_unit_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bits: Vec<bool> = (0..128).map(|_| rng.gen()).collect();
        let s = qpsk_map(&bits).unwrap();
        for z in s.symbols().iter() {
            assert!((z.norm_sqr() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn qpsk_map_rejects_odd_bit_count() {
        assert!(qpsk_map(&[true, false, true]).is_err());
        assert!(qpsk_map(&[]).is_err());
    }

    #[test]
    fn qpsk_demap_inverts_map() {
        for bits in [[false, false], [false, true], [true, false], [true, true]] {
            let s = qpsk_map(&bits).unwrap();
            assert_eq!(qpsk_demap(s.symbols()[0]), (bits[0], bits[1]));
        }
    }

    #[test]
    fn dft_of_impulse_is_flat() {
        let x = ComplexVector::impulse(4, 0);
        let y = dft(&x);
        for k in 0..4 {
            assert_abs_diff_eq!(y[k].re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(y[k].im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn idft_inverts_dft_n64() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_vector(&mut rng, 64);
        let back = idft(&dft(&x));
        assert!(rel_err(&back, &x) <= 1e-12);
    }

    // Independent O(N^2) summation oracle for the fast path.
    fn oracle_dft(x: &ComplexVector) -> ComplexVector {
        let n = x.len();
        let scale = 1.0 / (n as f64).sqrt();
        ComplexVector::from_fn(n, |k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                let angle = -2.0 * PI * (k as f64) * (m as f64) / (n as f64);
                acc += x[m] * Complex64::new(angle.cos(), angle.sin());
            }
            acc * scale
        })
    }

    #[test]
    fn dft_matches_direct_summation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_vector(&mut rng, 8);
        let fast = dft(&x);
        let slow = oracle_dft(&x);
        assert!(rel_err(&fast, &slow) <= 1e-12);
    }

    #[test]
    fn dft_handles_non_power_of_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3usize, 5, 6, 12] {
            let x = random_vector(&mut rng, n);
            let back = idft(&dft(&x));
            assert!(rel_err(&back, &x) <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn convolve_with_impulse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = random_vector(&mut rng, 8);
        let a = ComplexVector::impulse(8, 0);
        let c = cyclic_convolve(&a, &b).unwrap();
        assert!(rel_err(&c, &b) <= 1e-15);
    }

    #[test]
    fn convolve_with_shifted_impulse_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_vector(&mut rng, 8);
        let a = ComplexVector::impulse(8, 1);
        let c = cyclic_convolve(&a, &b).unwrap();
        for k in 0..8 {
            let expected = b[(k + 8 - 1) % 8];
            assert_abs_diff_eq!(c[k].re, expected.re, epsilon = 1e-15);
            assert_abs_diff_eq!(c[k].im, expected.im, epsilon = 1e-15);
        }
    }

    #[test]
    fn convolve_rejects_length_mismatch() {
        let a = ComplexVector::zeros(4);
        let b = ComplexVector::zeros(5);
        assert!(cyclic_convolve(&a, &b).is_err());
    }

    #[test]
    fn convolution_theorem_n8() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_vector(&mut rng, 8);
        let b = random_vector(&mut rng, 8);
        let lhs = dft(&cyclic_convolve(&a, &b).unwrap());
        let rhs = dft(&a)
            .hadamard(&dft(&b))
            .unwrap()
            .scale(Complex64::new((8.0f64).sqrt(), 0.0));
        assert!(rel_err(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn diagonal_matvec_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let n = rng.gen_range(1..24);
            let diag: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let d = ComplexMatrix::diagonal(diag.clone()).unwrap();
            let mut dense = ComplexMatrix::zeros(n, n);
            for (i, z) in diag.iter().enumerate() {
                dense.set(i, i, *z);
            }
            let x = random_vector(&mut rng, n);
            let yd = d.matvec(&x).unwrap();
            let ye = dense.matvec(&x).unwrap();
            assert!(rel_err(&yd, &ye) <= 1e-14);
        }
    }

    #[test]
    fn diagonal_off_diagonal_reads_are_exact_zero() {
        let d = ComplexMatrix::diagonal(vec![Complex64::new(1.0, 2.0); 3]).unwrap();
        assert_eq!(d.get(0, 1), Complex64::new(0.0, 0.0));
        assert_eq!(d.get(2, 0), Complex64::new(0.0, 0.0));
        assert!(d.is_diagonal());
    }

    #[test]
    fn rejects_non_finite_elements() {
        assert!(ComplexVector::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::dense(1, 1, vec![Complex64::new(0.0, f64::INFINITY)]).is_err());
    }

    proptest! {
        #[test]
        fn unitarity_preserves_norm(seed in 0u64..500, idx in 0usize..4) {
            let n = [2usize, 4, 8, 64][idx];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_vector(&mut rng, n);
            let y = dft(&x);
            let rel = (y.norm() - x.norm()).abs() / x.norm().max(1e-12);
            prop_assert!(rel <= 1e-12);
        }

        #[test]
        fn convolution_theorem_all_sizes(seed in 0u64..200, idx in 0usize..4) {
            let n = [2usize, 4, 8, 64][idx];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_vector(&mut rng, n);
            let b = random_vector(&mut rng, n);
            let lhs = dft(&cyclic_convolve(&a, &b).unwrap());
            let rhs = dft(&a).hadamard(&dft(&b)).unwrap()
                .scale(Complex64::new((n as f64).sqrt(), 0.0));
            prop_assert!(rel_err(&lhs, &rhs) <= 1e-12);
        }
    }
}
