//! Linear SLH models with identity scattering and their cascade composition.
//!
//! Each [`Oscillator`] is one mode `x_j = (q_j, p_j)` with coupling
//! `L_j = K_j x_j` (`K_j` complex, `m x 2`) and Hamiltonian
//! `H_j = ½ x_jᵀ R_j x_j`. A [`CascadeSystem`] feeds the output of oscillator
//! `j` into the input of oscillator `j + 1`; index 0 sees the input field
//! first. The composed `(K, R)` act on `ξ` in q-first ordering.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mats::{
    self, dagger, ensure_finite, ensure_finite_complex, imag_part, max_abs, max_asymmetry,
    real_part, require_symmetric, symplectic_form, to_complex, ComplexMatrix, RealMatrix,
    SYMMETRY_TOL,
};

/// One-mode open oscillator `(S = I, L = K x, H = ½ xᵀ R x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Oscillator {
    k: ComplexMatrix,
    r: RealMatrix,
}

impl Oscillator {
    pub fn new(k: ComplexMatrix, r: RealMatrix) -> Result<Self> {
        if k.ncols() != 2 || k.nrows() == 0 {
            return Err(Error::Shape(format!(
                "oscillator coupling must be m x 2, got {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        if r.shape() != (2, 2) {
            return Err(Error::Shape(format!(
                "oscillator Hamiltonian must be 2x2, got {}x{}",
                r.nrows(),
                r.ncols()
            )));
        }
        ensure_finite_complex(&k, "oscillator coupling")?;
        ensure_finite(&r, "oscillator Hamiltonian")?;
        require_symmetric(&r, SYMMETRY_TOL, "oscillator Hamiltonian")?;
        Ok(Oscillator { k, r: mats::symmetrize(&r) })
    }

    pub fn channels(&self) -> usize {
        self.k.nrows()
    }

    pub fn coupling(&self) -> &ComplexMatrix {
        &self.k
    }

    pub fn hamiltonian(&self) -> &RealMatrix {
        &self.r
    }
}

/// Cascade `G_n ◁ ... ◁ G_2 ◁ G_1` with its composed coupling and Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSystem {
    oscillators: Vec<Oscillator>,
    channels: usize,
    k: ComplexMatrix,
    r: RealMatrix,
}

fn uniform_channels(oscillators: &[Oscillator]) -> Result<usize> {
    let first = oscillators
        .first()
        .ok_or_else(|| Error::Arity("a cascade needs at least one oscillator".into()))?;
    let m = first.channels();
    if let Some((j, o)) = oscillators.iter().enumerate().find(|(_, o)| o.channels() != m) {
        return Err(Error::Shape(format!(
            "oscillator {} has {} channels, expected {m}",
            j + 1,
            o.channels()
        )));
    }
    Ok(m)
}

/// Composes a cascade from its oscillators via the permutation `P_n`:
///
/// * `K = [K_1 ... K_n] P_nᵀ`
/// * `R = P_n M P_nᵀ` with `M_jj = R_j`, `M_jk = Im(K_j† K_k)` for `j > k`
///   and `M_jk = M_kjᵀ` for `j < k`.
pub fn compose_cascade(oscillators: &[Oscillator]) -> Result<CascadeSystem> {
    let m = uniform_channels(oscillators)?;
    let n = oscillators.len();
    let p = mats::permutation_matrix(n)?;

    let mut stacked = ComplexMatrix::zeros(m, 2 * n);
    for (j, o) in oscillators.iter().enumerate() {
        stacked.view_mut((0, 2 * j), (m, 2)).copy_from(&o.k);
    }
    let k = stacked * to_complex(&p.transpose());

    let mut big_m = RealMatrix::zeros(2 * n, 2 * n);
    for (j, oj) in oscillators.iter().enumerate() {
        big_m.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&oj.r);
        for (l, ol) in oscillators.iter().enumerate().take(j) {
            let cross = imag_part(&(dagger(&oj.k) * &ol.k));
            big_m.view_mut((2 * j, 2 * l), (2, 2)).copy_from(&cross);
            big_m.view_mut((2 * l, 2 * j), (2, 2)).copy_from(&cross.transpose());
        }
    }
    let r = &p * big_m * p.transpose();

    Ok(CascadeSystem { oscillators: oscillators.to_vec(), channels: m, k, r })
}

/// Selector `E` with `ξ_sub = E ξ` for a block of `len` consecutive modes
/// starting at mode `offset` inside an `n`-mode q-first vector.
fn mode_embedding(offset: usize, len: usize, n: usize) -> RealMatrix {
    let mut e = RealMatrix::zeros(2 * len, 2 * n);
    for i in 0..len {
        e[(i, offset + i)] = 1.0;
        e[(len + i, n + offset + i)] = 1.0;
    }
    e
}

/// Series product `G2 ◁ G1`: the output of `first` drives `second`.
///
/// Evaluated directly from the SLH rule with `S = I`:
/// `L = L_2 + L_1`, `H = H_2 + H_1 + Im(L_2† L_1)`. The imaginary part of the
/// quadratic form `ξᵀ C ξ` contributes `Im C + (Im C)ᵀ` to `R` (up to a
/// c-number shift of the Hamiltonian).
pub fn series_product(first: &CascadeSystem, second: &CascadeSystem) -> Result<CascadeSystem> {
    if first.channels != second.channels {
        return Err(Error::Shape(format!(
            "cannot cascade a {}-channel system into a {}-channel system",
            first.channels, second.channels
        )));
    }
    let (n1, n2) = (first.modes(), second.modes());
    let n = n1 + n2;
    let e1 = mode_embedding(0, n1, n);
    let e2 = mode_embedding(n1, n2, n);
    let (e1c, e2c) = (to_complex(&e1), to_complex(&e2));

    let k = &first.k * &e1c + &second.k * &e2c;
    let cross = imag_part(&(e2c.transpose() * dagger(&second.k) * &first.k * &e1c));
    let r = e1.transpose() * &first.r * &e1
        + e2.transpose() * &second.r * &e2
        + &cross
        + cross.transpose();

    let mut oscillators = first.oscillators.clone();
    oscillators.extend(second.oscillators.iter().cloned());
    Ok(CascadeSystem { oscillators, channels: first.channels, k, r })
}

impl CascadeSystem {
    pub fn new(oscillators: Vec<Oscillator>) -> Result<Self> {
        compose_cascade(&oscillators)
    }

    /// Number of oscillators (modes).
    pub fn modes(&self) -> usize {
        self.oscillators.len()
    }

    /// Number of field channels `m`.
    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn oscillators(&self) -> &[Oscillator] {
        &self.oscillators
    }

    /// Composed coupling matrix `K` (`m x 2n`, q-first).
    pub fn coupling(&self) -> &ComplexMatrix {
        &self.k
    }

    /// Composed Hamiltonian matrix `R` (`2n x 2n`, q-first).
    pub fn hamiltonian(&self) -> &RealMatrix {
        &self.r
    }

    /// Columns `(q_j, p_j)` of the composed coupling, i.e. the block acting on
    /// mode `j` alone.
    pub fn coupling_column_pair(&self, j: usize) -> ComplexMatrix {
        let n = self.modes();
        let mut out = ComplexMatrix::zeros(self.channels, 2);
        out.set_column(0, &self.k.column(j));
        out.set_column(1, &self.k.column(n + j));
        out
    }
}

/// Drift/diffusion/output matrices of the linear QSDE
/// `dξ = A ξ dt + B [dA; dA#]`, `dY = C ξ dt + D dA`.
#[derive(Debug, Clone, PartialEq)]
pub struct QsdeMatrices {
    /// `A = Σ (R + Im(K†K))`
    pub drift: RealMatrix,
    /// `B = iΣ [-K†, Kᵀ]`, `2n x 2m`.
    pub diffusion: ComplexMatrix,
    /// `C = K`
    pub output: ComplexMatrix,
    /// `D = I_m`
    pub feedthrough: RealMatrix,
    /// `½ B B†`, real part.
    pub noise_quadratic: RealMatrix,
    /// `Σ Re(K†K) Σᵀ`, the same matrix by a second route.
    pub noise_quadratic_closed_form: RealMatrix,
}

/// Builds the QSDE matrices of a cascade.
pub fn qsde_matrices(sys: &CascadeSystem) -> Result<QsdeMatrices> {
    let n = sys.modes();
    let m = sys.channels;
    let sigma = symplectic_form(n)?;
    let sigma_c = to_complex(&sigma);
    let k_dag = dagger(&sys.k);
    let ktk = &k_dag * &sys.k;

    let herm_defect = max_abs_complex_diff(&ktk, &dagger(&ktk));
    if herm_defect > 1e-10 * (1.0 + mats::max_abs_complex(&ktk)) {
        return Err(Error::Symmetry(format!("K†K is not Hermitian ({herm_defect:.3e})")));
    }

    let drift = &sigma * (&sys.r + imag_part(&ktk));

    let mut stacked = ComplexMatrix::zeros(2 * n, 2 * m);
    stacked.view_mut((0, 0), (2 * n, m)).copy_from(&(-&k_dag));
    stacked.view_mut((0, m), (2 * n, m)).copy_from(&sys.k.transpose());
    let diffusion = (&sigma_c * stacked).map(|z| z * Complex64::i());

    let bbd = &diffusion * dagger(&diffusion) * Complex64::new(0.5, 0.0);
    let noise_quadratic = mats::symmetrize(&real_part(&bbd));
    let noise_quadratic_closed_form =
        mats::symmetrize(&(&sigma * real_part(&ktk) * sigma.transpose()));

    Ok(QsdeMatrices {
        drift,
        diffusion,
        output: sys.k.clone(),
        feedthrough: RealMatrix::identity(m, m),
        noise_quadratic,
        noise_quadratic_closed_form,
    })
}

fn max_abs_complex_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    mats::max_abs_complex(&(a - b))
}

impl QsdeMatrices {
    pub fn modes(&self) -> usize {
        self.drift.nrows() / 2
    }

    /// Max-norm of `AΣ + ΣAᵀ + 2 Im(B F B†)` with `F = diag(I_m, 0)` the Itô
    /// table of `[dA; dA#]`. Zero iff the QSDE preserves the canonical
    /// commutation relations.
    pub fn commutation_defect(&self) -> f64 {
        let n = self.modes();
        let m = self.diffusion.ncols() / 2;
        let sigma = symplectic_form(n).expect("non-empty system");
        let b_in = self.diffusion.columns(0, m).into_owned();
        let ito = &b_in * dagger(&b_in);
        max_abs(&(&self.drift * &sigma + &sigma * self.drift.transpose() + imag_part(&ito) * 2.0))
    }
}

/// Monic characteristic polynomial `det(λI - A)`, coefficients in descending
/// degree, expanded from the eigenvalues.
pub fn char_poly(a: &RealMatrix) -> Result<Vec<f64>> {
    let roots = mats::eigenvalues(a)?;
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for root in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * root;
        }
        coeffs = next;
    }
    Ok(coeffs.into_iter().map(|c| c.re).collect())
}

/// `max |R - Rᵀ|` of the composed Hamiltonian.
pub fn hamiltonian_asymmetry(sys: &CascadeSystem) -> f64 {
    max_asymmetry(&sys.r)
}
