use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::fourier::BooleanFunction;
use crate::scalar::Scalar;

/// Largest register a density matrix may be built for (`4^12` complex entries).
pub const MAX_DENSITY_QUBITS: usize = 12;

/// A `2^n × 2^n` density matrix stored row-major.
///
/// Basis state `x` has qubit `q` in `|1⟩` when bit `q` of `x` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n: usize,
    dimension: usize,
    data: Vec<Complex<T>>,
}

/// Result of [`DensityMatrix::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    /// Hermitian and unit trace within `1e-10`, smallest eigenvalue at least `-1e-9`.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_error <= 1e-10 && self.trace_error <= 1e-10 && self.min_eigenvalue >= -1e-9
    }
}

impl<T: Scalar> DensityMatrix<T> {
    /// `|0^n⟩⟨0^n|`.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dimension = 1usize << n;
        let mut data = vec![Complex::new(T::zero(), T::zero()); dimension * dimension];
        data[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n, dimension, data })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn from_pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        let dimension = amplitudes.len();
        if dimension < 2 || !dimension.is_power_of_two() {
            return Err(invalid(format!("state length {dimension} is not 2^n")));
        }
        let n = dimension.trailing_zeros() as usize;
        check_qubits(n)?;
        let norm: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::tolerance() {
            return Err(invalid(format!("state has squared norm {norm}")));
        }
        let mut data = Vec::with_capacity(dimension * dimension);
        for r in amplitudes {
            for c in amplitudes {
                data.push(r * c.conj());
            }
        }
        Ok(Self { n, dimension, data })
    }

    /// Wraps row-major entries, checking the shape only.
    pub fn from_entries(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n)?;
        let dimension = 1usize << n;
        if data.len() != dimension * dimension {
            return Err(invalid(format!(
                "{} entries do not form a {dimension}x{dimension} matrix",
                data.len()
            )));
        }
        Ok(Self { n, dimension, data })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let mut rho = Self::zero_state(n)?;
        rho.data[0] = Complex::new(T::zero(), T::zero());
        let weight = T::one() / T::of(rho.dimension as f64);
        for i in 0..rho.dimension {
            rho.data[i * rho.dimension + i] = Complex::new(weight, T::zero());
        }
        Ok(rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dimension + col]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dimension).map(|i| self.entry(i, i)).fold(
            Complex::new(T::zero(), T::zero()),
            |acc, z| acc + z,
        )
    }

    /// Computational-basis measurement probabilities `⟨s|ρ|s⟩`.
    pub fn probabilities(&self) -> Vec<T> {
        (0..self.dimension)
            .map(|i| self.entry(i, i).re.max(T::zero()))
            .collect()
    }

    /// Hermiticity, trace and positivity measured in double precision.
    pub fn validate(&self) -> StateDiagnostics {
        let d = self.dimension;
        let mut hermiticity_error = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let diff = self.entry(r, c) - self.entry(c, r).conj();
                hermiticity_error = hermiticity_error.max(diff.norm().to_f64_lossless());
            }
        }
        let trace = self.trace();
        let trace_error = Complex::new(
            trace.re.to_f64_lossless() - 1.0,
            trace.im.to_f64_lossless(),
        )
        .norm();
        let matrix = DMatrix::from_fn(d, d, |r, c| {
            let z = self.entry(r, c);
            Complex::new(z.re.to_f64_lossless(), z.im.to_f64_lossless())
        });
        // Symmetrize so the eigensolver sees an exactly Hermitian input.
        let hermitian = (&matrix + matrix.adjoint()) * Complex::new(0.5, 0.0);
        let min_eigenvalue = hermitian
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        StateDiagnostics {
            hermiticity_error,
            trace_error,
            min_eigenvalue,
        }
    }

    /// `ρ ↦ UρU†` with `U` acting on `qubit`.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &[[Complex<T>; 2]; 2]) -> Result<()> {
        self.check_qubit(qubit)?;
        let d = self.dimension;
        let bit = 1usize << qubit;
        for lo in (0..d).filter(|i| i & bit == 0) {
            let hi = lo | bit;
            for c in 0..d {
                let a = self.data[lo * d + c];
                let b = self.data[hi * d + c];
                self.data[lo * d + c] = u[0][0] * a + u[0][1] * b;
                self.data[hi * d + c] = u[1][0] * a + u[1][1] * b;
            }
        }
        for r in 0..d {
            let row = &mut self.data[r * d..(r + 1) * d];
            for lo in (0..d).filter(|j| j & bit == 0) {
                let hi = lo | bit;
                let (a, b) = (row[lo], row[hi]);
                row[lo] = a * u[0][0].conj() + b * u[0][1].conj();
                row[hi] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
        Ok(())
    }

    /// `ρ ↦ UρU†` with `U` acting on `(first, second)`; local basis index is
    /// `bit(first) + 2·bit(second)`.
    pub fn apply_two_qubit(
        &mut self,
        first: usize,
        second: usize,
        u: &[[Complex<T>; 4]; 4],
    ) -> Result<()> {
        self.check_qubit(first)?;
        self.check_qubit(second)?;
        if first == second {
            return Err(invalid("two-qubit gate on a single qubit"));
        }
        let d = self.dimension;
        let (b0, b1) = (1usize << first, 1usize << second);
        let bases: Vec<usize> = (0..d).filter(|i| i & (b0 | b1) == 0).collect();
        let local = |base: usize| [base, base | b0, base | b1, base | b0 | b1];
        let zero = Complex::new(T::zero(), T::zero());
        for &base in &bases {
            let idx = local(base);
            for c in 0..d {
                let old: [Complex<T>; 4] = std::array::from_fn(|k| self.data[idx[k] * d + c]);
                for (k, &row) in idx.iter().enumerate() {
                    self.data[row * d + c] = (0..4).fold(zero, |acc, m| acc + u[k][m] * old[m]);
                }
            }
        }
        for r in 0..d {
            for &base in &bases {
                let idx = local(base);
                let old: [Complex<T>; 4] = std::array::from_fn(|k| self.data[r * d + idx[k]]);
                for (k, &col) in idx.iter().enumerate() {
                    self.data[r * d + col] =
                        (0..4).fold(zero, |acc, m| acc + old[m] * u[k][m].conj());
                }
            }
        }
        Ok(())
    }

    /// Phase oracle `|x⟩ ↦ f(x)|x⟩`, i.e. `ρ_{xy} ↦ f(x) f(y) ρ_{xy}`.
    pub fn apply_phase_oracle(&mut self, f: &BooleanFunction) -> Result<()> {
        if f.n() != self.n {
            return Err(invalid(format!(
                "oracle over {} bits applied to {} qubits",
                f.n(),
                self.n
            )));
        }
        let d = self.dimension;
        for r in 0..d {
            for c in 0..d {
                if f.value(r) != f.value(c) {
                    let z = &mut self.data[r * d + c];
                    *z = -*z;
                }
            }
        }
        Ok(())
    }

    /// Single-qubit depolarizing channel `D_λ[ρ] = (1 − λ)ρ + λ I/2` on `qubit`.
    pub fn depolarize_qubit(&mut self, qubit: usize, lambda: T) -> Result<()> {
        self.check_qubit(qubit)?;
        check_rate(lambda)?;
        let d = self.dimension;
        let bit = 1usize << qubit;
        let keep = T::one() - lambda;
        let half = T::of(0.5);
        for r in (0..d).filter(|i| i & bit == 0) {
            for c in (0..d).filter(|j| j & bit == 0) {
                let (r1, c1) = (r | bit, c | bit);
                let p00 = self.data[r * d + c];
                let p11 = self.data[r1 * d + c1];
                let mixed = (p00 + p11) * half * lambda;
                self.data[r * d + c] = p00 * keep + mixed;
                self.data[r1 * d + c1] = p11 * keep + mixed;
                self.data[r * d + c1] *= keep;
                self.data[r1 * d + c] *= keep;
            }
        }
        Ok(())
    }

    /// Applies `D_λ` to every qubit.
    pub fn depolarize_all_in_place(&mut self, lambda: T) -> Result<()> {
        check_rate(lambda)?;
        if lambda == T::zero() {
            return Ok(());
        }
        for q in 0..self.n {
            self.depolarize_qubit(q, lambda)?;
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n {
            return Err(invalid(format!(
                "qubit {qubit} out of range for {} qubits",
                self.n
            )));
        }
        Ok(())
    }
}

/// `D_λ^{⊗n}[ρ]`.
pub fn depolarize_all<T: Scalar>(rho: &DensityMatrix<T>, lambda: T) -> Result<DensityMatrix<T>> {
    let mut out = rho.clone();
    out.depolarize_all_in_place(lambda)?;
    Ok(out)
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSITY_QUBITS {
        return Err(invalid(format!(
            "qubit count {n} outside 1..={MAX_DENSITY_QUBITS}"
        )));
    }
    Ok(())
}

fn check_rate<T: Scalar>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(invalid(format!("noise rate {lambda} outside [0, 1]")));
    }
    Ok(())
}
