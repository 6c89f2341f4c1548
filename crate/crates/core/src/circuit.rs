//! The parallel conjugation circuit `D ∘ U^{⊗k} ∘ E` and its pieces.
//!
//! Slots: the encoder maps `P` (one qudit) to `I` (`k` qudits), the `k`
//! copies of `U` map `I` to `O`, and the decoder maps `O` to `F`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::su_normalize;
use crate::linalg::{
    apply_local, hermitian_eig, min_eigenvalue, partial_trace, permute_subsystems, ComplexMatrix,
    SubsystemShape, C64, ONE, ZERO,
};
use crate::symmetric::{antisym_basis_sparse, antisym_projector, SparseVector};

/// Tolerance for accepting a matrix as unitary or as a density operator.
pub const INPUT_TOL: f64 = 1e-8;

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(k+1)/(d(d-k))`.
pub fn theory_fidelity(d: usize, k: usize) -> f64 {
    (k + 1) as f64 / (d * (d - k)) as f64
}

pub(crate) fn check_dk(d: usize, k: usize) -> Result<()> {
    if d < 2 || k == 0 || k >= d {
        return Err(Error::OutOfRange(format!(
            "need d >= 2 and 1 <= k <= d-1, got d={d}, k={k}"
        )));
    }
    Ok(())
}

/// `|M⟩⟩ = Σ_a |a⟩ ⊗ M|a⟩`, so entry `a·rows + b` is `M[b, a]`.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut v = vec![ZERO; rows * cols];
    for a in 0..cols {
        for b in 0..rows {
            v[a * rows + b] = m[(b, a)];
        }
    }
    v
}

/// Choi operator `Σ_ij |i⟩⟨j| ⊗ C(|i⟩⟨j|)` of a map, input factors first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    pub matrix: ComplexMatrix,
    pub in_dims: SubsystemShape,
    pub out_dims: SubsystemShape,
}

impl ChoiOperator {
    pub fn new(
        matrix: ComplexMatrix,
        in_dims: SubsystemShape,
        out_dims: SubsystemShape,
    ) -> Result<Self> {
        let side = in_dims.total() * out_dims.total();
        if matrix.rows() != side || matrix.cols() != side {
            return Err(Error::Dimension(format!(
                "Choi matrix is {}x{}, expected side {side}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            matrix,
            in_dims,
            out_dims,
        })
    }

    /// `|U⟩⟩⟨⟨U|` for a single qudit map.
    pub fn unitary(u: &ComplexMatrix) -> Self {
        let v = vectorize(u);
        Self {
            matrix: ComplexMatrix::outer(&v, &v),
            in_dims: SubsystemShape::uniform(u.cols(), 1),
            out_dims: SubsystemShape::uniform(u.rows(), 1),
        }
    }

    pub fn from_kraus(
        kraus: &KrausSet,
        in_dims: SubsystemShape,
        out_dims: SubsystemShape,
    ) -> Result<Self> {
        let side = in_dims.total() * out_dims.total();
        let mut matrix = ComplexMatrix::zeros(side, side);
        for k in kraus.operators() {
            if k.rows() != out_dims.total() || k.cols() != in_dims.total() {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    out_dims.total(),
                    in_dims.total()
                )));
            }
            let v = vectorize(k);
            matrix += &ComplexMatrix::outer(&v, &v);
        }
        Ok(Self {
            matrix,
            in_dims,
            out_dims,
        })
    }

    fn joint_shape(&self) -> SubsystemShape {
        self.in_dims.join(&self.out_dims)
    }

    fn input_factors(&self) -> Vec<usize> {
        (0..self.in_dims.len()).collect()
    }

    fn output_factors(&self) -> Vec<usize> {
        (self.in_dims.len()..self.in_dims.len() + self.out_dims.len()).collect()
    }

    /// `C(ρ) = tr_in[(ρᵀ ⊗ 1) C]`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (din, dout) = (self.in_dims.total(), self.out_dims.total());
        if rho.rows() != din || rho.cols() != din {
            return Err(Error::Dimension(format!(
                "input is {}x{}, expected side {din}",
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(dout, dout);
        for i in 0..din {
            for j in 0..din {
                let w = rho[(i, j)];
                if w == ZERO {
                    continue;
                }
                for b in 0..dout {
                    for c in 0..dout {
                        out[(b, c)] += w * self.matrix[(i * dout + b, j * dout + c)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `max |tr_out C - 1_in|`.
    pub fn tp_residual(&self) -> f64 {
        let reduced = partial_trace(&self.matrix, &self.joint_shape(), &self.output_factors())
            .expect("shape checked at construction");
        reduced.max_abs_diff(&ComplexMatrix::identity(self.in_dims.total()))
    }

    /// Largest negative eigenvalue magnitude, zero when PSD.
    pub fn psd_residual(&self) -> Result<f64> {
        Ok((-min_eigenvalue(&self.matrix)?).max(0.0))
    }

    pub fn is_channel(&self, tol: f64) -> Result<bool> {
        Ok(self.matrix.hermitian_deviation() <= tol
            && self.tp_residual() <= tol
            && self.psd_residual()? <= tol)
    }

    /// Choi of `X ↦ Σ K_iᵀ X K̄_i`, obtained by exchanging input and output.
    pub fn transposed_channel(&self) -> Result<ChoiOperator> {
        let shape = self.joint_shape();
        let order: Vec<usize> = self
            .output_factors()
            .into_iter()
            .chain(self.input_factors())
            .collect();
        Ok(Self {
            matrix: permute_subsystems(&self.matrix, &shape, &order)?,
            in_dims: self.out_dims.clone(),
            out_dims: self.in_dims.clone(),
        })
    }

    /// Input dimension × output dimension; reports both totals.
    pub fn dims(&self) -> (usize, usize) {
        (self.in_dims.total(), self.out_dims.total())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if let Some(first) = operators.first() {
            let (r, c) = (first.rows(), first.cols());
            if operators.iter().any(|k| k.rows() != r || k.cols() != c) {
                return Err(Error::Dimension("Kraus operators differ in shape".into()));
            }
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `max |Σ K†K - 1|`.
    pub fn tp_residual(&self) -> f64 {
        let Some(first) = self.operators.first() else {
            return f64::INFINITY;
        };
        let mut sum = ComplexMatrix::zeros(first.cols(), first.cols());
        for k in &self.operators {
            sum += &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(first.cols()))
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.operators.first().map_or(0, ComplexMatrix::rows);
        let mut out = ComplexMatrix::zeros(rows, rows);
        for k in &self.operators {
            out += &(&(k * rho) * &k.adjoint());
        }
        out
    }
}

/// Check that `sigma` is a `d`-dimensional density operator.
pub fn validate_state(sigma: &ComplexMatrix, d: usize) -> Result<()> {
    if sigma.rows() != d || sigma.cols() != d {
        return Err(Error::InvalidState(format!(
            "expected a {d}x{d} matrix, got {}x{}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    let herm = sigma.hermitian_deviation();
    if herm > INPUT_TOL {
        return Err(Error::InvalidState(format!(
            "not Hermitian (deviation {herm:e})"
        )));
    }
    let tr = sigma.trace();
    if (tr - ONE).norm() > INPUT_TOL {
        return Err(Error::InvalidState(format!("trace {tr} is not 1")));
    }
    let min = min_eigenvalue(&sigma.hermitian_part())?;
    if min < -INPUT_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

pub fn maximally_mixed(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d).scale_real(1.0 / d as f64)
}

/// Encoder `E = (d / C(d,k+1)) A(d,k+1)` on `P ⊗ I` with its Kraus form
/// `K_i = √(d/C(d,k+1)) |ψ_i⟩^{T_P}`.
pub fn encoder(d: usize, k: usize) -> Result<(ChoiOperator, KrausSet)> {
    check_dk(d, k)?;
    let norm = d as f64 / binomial(d, k + 1);
    let choi = ChoiOperator::new(
        antisym_projector(d, k + 1).scale_real(norm),
        SubsystemShape::uniform(d, 1),
        SubsystemShape::uniform(d, k),
    )?;
    let kraus = KrausSet::new(encoder_kraus(d, k)?)?;
    Ok((choi, kraus))
}

fn encoder_kraus(d: usize, k: usize) -> Result<Vec<ComplexMatrix>> {
    let dk = d.pow(k as u32);
    let s = (d as f64 / binomial(d, k + 1)).sqrt();
    Ok(antisym_basis_sparse(d, k + 1)?
        .iter()
        .map(|psi| {
            let mut m = ComplexMatrix::zeros(dk, d);
            for &(idx, x) in &psi.entries {
                m[(idx % dk, idx / dk)] = C64::new(s * x, 0.0);
            }
            m
        })
        .collect())
}

/// Decoder `D = (C(d,k)/C(d,k+1)) A(d,k+1) + (1 - A(d,k)) ⊗ σ` on `O ⊗ F`.
pub fn decoder(d: usize, k: usize, sigma: &ComplexMatrix) -> Result<ChoiOperator> {
    check_dk(d, k)?;
    validate_state(sigma, d)?;
    let dk = d.pow(k as u32);
    let mut m = antisym_projector(d, k + 1).scale_real(binomial(d, k) / binomial(d, k + 1));
    let complement = &ComplexMatrix::identity(dk) - &antisym_projector(d, k);
    m += &crate::linalg::kron(&complement, sigma);
    ChoiOperator::new(
        m,
        SubsystemShape::uniform(d, k),
        SubsystemShape::uniform(d, 1),
    )
}

/// Decoder with `σ = 1/d`.
pub fn default_decoder(d: usize, k: usize) -> Result<ChoiOperator> {
    decoder(d, k, &maximally_mixed(d))
}

/// Operator-sum form of [`decoder`]: `√(C(d,k)/C(d,k+1)) |ψ_i⟩^{T_O}` for the
/// antisymmetric branch and `√s_l |v_l⟩⟨b| (1 - A(d,k))` for the `σ` branch,
/// where `σ = Σ_l s_l |v_l⟩⟨v_l|`.
pub fn decoder_kraus(d: usize, k: usize, sigma: &ComplexMatrix) -> Result<KrausSet> {
    check_dk(d, k)?;
    validate_state(sigma, d)?;
    let dk = d.pow(k as u32);
    let s = (binomial(d, k) / binomial(d, k + 1)).sqrt();
    let mut ops: Vec<ComplexMatrix> = antisym_basis_sparse(d, k + 1)?
        .iter()
        .map(|psi| {
            let mut m = ComplexMatrix::zeros(d, dk);
            for &(idx, x) in &psi.entries {
                m[(idx % d, idx / d)] = C64::new(s * x, 0.0);
            }
            m
        })
        .collect();
    let complement = &ComplexMatrix::identity(dk) - &antisym_projector(d, k);
    let eig = hermitian_eig(&sigma.hermitian_part())?;
    for (l, &sl) in eig.values.iter().enumerate() {
        if sl <= 0.0 {
            continue;
        }
        let amp = sl.sqrt();
        for b in 0..dk {
            let row_b: Vec<C64> = (0..dk).map(|c| complement[(b, c)]).collect();
            if row_b.iter().all(|z| z.norm() < 1e-15) {
                continue;
            }
            ops.push(ComplexMatrix::from_fn(d, dk, |f, c| {
                amp * eig.vectors[(f, l)] * row_b[c]
            }));
        }
    }
    KrausSet::new(ops)
}

/// `V = √d |ψ_{A_d}⟩^{T_1}`, a `d^{d-1} × d` isometry with
/// `V† U^{⊗(d-1)} V = Ū` for `U ∈ SU(d)`.
pub fn exact_conjugation_isometry(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("need d >= 2, got {d}")));
    }
    let rest = d.pow(d as u32 - 1);
    let psi = &antisym_basis_sparse(d, d)?[0];
    let s = (d as f64).sqrt();
    let mut v = ComplexMatrix::zeros(rest, d);
    for &(idx, x) in &psi.entries {
        v[(idx % rest, idx / rest)] = C64::new(s * x, 0.0);
    }
    Ok(v)
}

/// Validate unitarity and rescale to determinant one.
pub fn normalize_unitary(u: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    if u.rows() != d || u.cols() != d {
        return Err(Error::Dimension(format!(
            "expected a {d}x{d} unitary, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let deviation = u.unitarity_deviation();
    if deviation > INPUT_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(su_normalize(u))
}

/// `U^{⊗k} M` for `M` with `d^k` rows, applied factor by factor.
fn tensor_power_times(u: &ComplexMatrix, k: usize, m: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    let shape = SubsystemShape::uniform(d, k);
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for c in 0..m.cols() {
        let mut col: Vec<C64> = (0..m.rows()).map(|r| m[(r, c)]).collect();
        for f in 0..k {
            col = apply_local(&col, &shape, f, u);
        }
        for (r, z) in col.into_iter().enumerate() {
            out[(r, c)] = z;
        }
    }
    out
}

/// `φᵀ Y` for a real sparse vector `φ`.
fn sparse_row_times(phi: &SparseVector, y: &ComplexMatrix) -> Vec<C64> {
    let mut w = vec![ZERO; y.cols()];
    for &(idx, x) in &phi.entries {
        for (a, wa) in w.iter_mut().enumerate() {
            *wa += y[(idx, a)] * x;
        }
    }
    w
}

/// Choi operator of `D ∘ U^{⊗k} ∘ E` with `σ = 1/d`.
pub fn apply_circuit(d: usize, k: usize, u: &ComplexMatrix) -> Result<ChoiOperator> {
    apply_circuit_with(d, k, u, &maximally_mixed(d))
}

/// Choi operator of `D ∘ U^{⊗k} ∘ E`, composed Kraus operator by Kraus
/// operator. The decoder's `σ` branch is summed in closed form: it
/// contributes `Gᵀ ⊗ σ` with `G = Σ_i Y_i† (1 - A(d,k)) Y_i`, `Y_i = U^{⊗k} K_i`.
pub fn apply_circuit_with(
    d: usize,
    k: usize,
    u: &ComplexMatrix,
    sigma: &ComplexMatrix,
) -> Result<ChoiOperator> {
    check_dk(d, k)?;
    validate_state(sigma, d)?;
    let u = normalize_unitary(u, d)?;
    let ys: Vec<ComplexMatrix> = encoder_kraus(d, k)?
        .iter()
        .map(|kr| tensor_power_times(&u, k, kr))
        .collect();

    let mut choi = ComplexMatrix::zeros(d * d, d * d);
    let s = (binomial(d, k) / binomial(d, k + 1)).sqrt();
    for psi in antisym_basis_sparse(d, k + 1)? {
        for y in &ys {
            // (L Y)[f, a] = s Σ_b ψ[b·d + f] Y[b, a]
            let mut ly = ComplexMatrix::zeros(d, d);
            for &(idx, x) in &psi.entries {
                let (b, f) = (idx / d, idx % d);
                for a in 0..d {
                    ly[(f, a)] += y[(b, a)] * (s * x);
                }
            }
            let v = vectorize(&ly);
            choi += &ComplexMatrix::outer(&v, &v);
        }
    }

    let mut g = ComplexMatrix::identity(d);
    for phi in antisym_basis_sparse(d, k)? {
        for y in &ys {
            let w = sparse_row_times(&phi, y);
            for a in 0..d {
                for b in 0..d {
                    g[(a, b)] -= w[a].conj() * w[b];
                }
            }
        }
    }
    choi += &crate::linalg::kron(&g.transpose(), sigma);

    ChoiOperator::new(
        choi,
        SubsystemShape::uniform(d, 1),
        SubsystemShape::uniform(d, 1),
    )
}

/// `F = ⟨⟨U|C|U⟩⟩ / d²`.
pub fn channel_fidelity(c: &ChoiOperator, u: &ComplexMatrix) -> Result<f64> {
    let (din, dout) = c.dims();
    if din != dout || u.rows() != din || u.cols() != din {
        return Err(Error::Dimension(format!(
            "fidelity of a {din}->{dout} channel against a {}x{} unitary",
            u.rows(),
            u.cols()
        )));
    }
    let v = vectorize(u);
    let cv = c.matrix.mul_vec(&v);
    let num: C64 = v.iter().zip(&cv).map(|(a, b)| a.conj() * b).sum();
    Ok(num.re / (din * din) as f64)
}

/// Fidelity of the circuit's output channel to `Ū`.
pub fn conjugation_fidelity(d: usize, k: usize, u: &ComplexMatrix) -> Result<f64> {
    let c = apply_circuit(d, k, u)?;
    channel_fidelity(&c, &u.conj())
}

/// Outcome of the probabilistic inversion demo.
#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    pub d: usize,
    pub k: usize,
    pub samples: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Exact probability of the heralding outcome.
    pub success_probability: f64,
    /// Binomial standard deviation of the rate at `1/d²`.
    pub binomial_stderr: f64,
    pub conditional_fidelity: f64,
    pub theory_fidelity: f64,
}

/// Generalized Bell vector `(X^a Z^b ⊗ 1)|Φ⁺⟩/√d` as a `d × d` coefficient
/// array `[x][y]`.
fn bell_vector(d: usize, a: usize, b: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d * d];
    let norm = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        let phase = C64::from_polar(norm, 2.0 * std::f64::consts::PI * (b * j) as f64 / d as f64);
        v[((j + a) % d) * d + j] = phase;
    }
    v
}

/// Teleportation-style transposition of a `d → d` channel.
///
/// Registers `R, X, A, B` start in `|Φ⁺⟩_{RX}|Φ⁺⟩_{AB}/d`; the channel acts on
/// `B`, then `(X, B)` is measured in the generalized Bell basis. Returns the
/// probability of every outcome (`a·d + b` order, `0` heralding success) and
/// the unnormalized operator left on `(R, A)` for each.
fn transposition_gadget(c: &ChoiOperator) -> Result<Vec<(f64, ComplexMatrix)>> {
    let (d, dout) = c.dims();
    if d != dout {
        return Err(Error::Dimension("gadget needs a d -> d channel".into()));
    }
    let inv_d = 1.0 / d as f64;
    // state[(r, x, a, b), (r', x', a', b')] = δ_rx δ_r'x' C[(a, b), (a', b')] / d²
    let mut outcomes = Vec::with_capacity(d * d);
    for ma in 0..d {
        for mb in 0..d {
            let phi = bell_vector(d, ma, mb);
            let mut out = ComplexMatrix::zeros(d * d, d * d);
            for r in 0..d {
                for a in 0..d {
                    for rp in 0..d {
                        for ap in 0..d {
                            let mut acc = ZERO;
                            for b in 0..d {
                                for bp in 0..d {
                                    let w = phi[r * d + b].conj() * phi[rp * d + bp];
                                    if w == ZERO {
                                        continue;
                                    }
                                    acc += w * c.matrix[(a * d + b, ap * d + bp)];
                                }
                            }
                            out[(r * d + a, rp * d + ap)] = acc * inv_d * inv_d;
                        }
                    }
                }
            }
            let p = out.trace().re;
            outcomes.push((p, out));
        }
    }
    Ok(outcomes)
}

/// Run the conjugation circuit, then the transposition gadget, to turn `k`
/// uses of `U` into `U⁻¹` with probability `1/d²`.
///
/// The heralding outcome is sampled `samples` times from the exact outcome
/// distribution; the conditional channel is obtained exactly by projection.
pub fn inversion_simulation(
    d: usize,
    k: usize,
    u: &ComplexMatrix,
    samples: usize,
    seed: u64,
) -> Result<InversionReport> {
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be positive".into()));
    }
    let u_su = normalize_unitary(u, d)?;
    let circuit = apply_circuit(d, k, &u_su)?;
    let outcomes = transposition_gadget(&circuit)?;
    let weights: Vec<f64> = outcomes.iter().map(|(p, _)| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidState(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let successes = (0..samples).filter(|_| dist.sample(&mut rng) == 0).count();

    let (p0, ref conditional) = outcomes[0];
    let choi = ChoiOperator::new(
        conditional.scale_real(d as f64 / p0),
        SubsystemShape::uniform(d, 1),
        SubsystemShape::uniform(d, 1),
    )?;
    let inverse = u_su.adjoint();
    let conditional_fidelity = channel_fidelity(&choi, &inverse)?;
    let q = 1.0 / (d * d) as f64;
    Ok(InversionReport {
        d,
        k,
        samples,
        successes,
        success_rate: successes as f64 / samples as f64,
        success_probability: p0,
        binomial_stderr: (q * (1.0 - q) / samples as f64).sqrt(),
        conditional_fidelity,
        theory_fidelity: theory_fidelity(d, k),
    })
}
