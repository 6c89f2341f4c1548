//! Performance operator, primal and dual feasible points, and the optimality
//! certificate for parallel conjugation.
//!
//! Every operator on the full comb lives on the factors
//! `P, I_1..I_k, O_1..O_k, F`, each of dimension `d`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{
    check_dk, conjugation_fidelity, default_decoder, encoder, theory_fidelity, vectorize,
    ChoiOperator,
};
use crate::error::{Error, Result};
use crate::haar::HaarSampler;
use crate::linalg::{
    gram_schmidt_hs, hermitian_eigenvalues, kron, kron_all, min_eigenvalue, partial_trace,
    permute_subsystems, ComplexMatrix, SubsystemShape, C64, DEFAULT_RANK_TOL,
};
use crate::schur_weyl::matrix_units;
use crate::symmetric::{perm_operator, Permutation};
use crate::young::{max_c, multiplicity, partitions, to_f64};

pub use crate::haar::haar_unitary;

/// Default cap on the side of any comb operator.
pub const DEFAULT_SIZE_CAP: usize = 4096;
/// Environment variable overriding [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_ENV: &str = "CONJUCIRC_SIZE_CAP";

/// Residuals at or below this count as satisfied in a certificate.
pub const CERTIFICATE_TOL: f64 = 1e-9;

pub fn size_cap() -> usize {
    std::env::var(SIZE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// Side `d^{2k+2}` of the comb operators.
pub fn comb_side(d: usize, k: usize) -> usize {
    d.checked_pow(2 * k as u32 + 2).unwrap_or(usize::MAX)
}

fn check_cap(d: usize, k: usize) -> Result<usize> {
    let side = comb_side(d, k);
    let cap = size_cap();
    if side > cap {
        return Err(Error::SizeCap { side, cap });
    }
    Ok(side)
}

fn comb_shape(d: usize, k: usize) -> SubsystemShape {
    SubsystemShape::uniform(d, 2 * k + 2)
}

fn output_factor(k: usize) -> usize {
    2 * k + 1
}

fn input_factors(k: usize) -> Vec<usize> {
    (1..=k).collect()
}

fn middle_output_factors(k: usize) -> Vec<usize> {
    (k + 1..=2 * k).collect()
}

/// Order taking `[P, I.., F, O..]` to `[P, I.., O.., F]`.
fn pifo_to_piof(k: usize) -> Vec<usize> {
    let mut order = vec![0];
    order.extend(1..=k);
    order.extend(k + 2..=2 * k + 1);
    order.push(k + 1);
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct Superchannel {
    pub matrix: ComplexMatrix,
    pub shape: SubsystemShape,
    pub d: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperchannelResiduals {
    /// `max(0, -λ_min(S))`.
    pub psd: f64,
    /// `max |tr_F S - C ⊗ 1_O|` with `C = tr_{OF} S / d^k`.
    pub output_marginal: f64,
    /// `max |tr_I C - 1_P|`.
    pub input_marginal: f64,
}

impl SuperchannelResiduals {
    pub fn max(&self) -> f64 {
        self.psd.max(self.output_marginal).max(self.input_marginal)
    }
}

impl Superchannel {
    pub fn new(matrix: ComplexMatrix, d: usize, k: usize) -> Result<Self> {
        let shape = comb_shape(d, k);
        if matrix.rows() != shape.total() || matrix.cols() != shape.total() {
            return Err(Error::Dimension(format!(
                "superchannel is {}x{}, expected side {}",
                matrix.rows(),
                matrix.cols(),
                shape.total()
            )));
        }
        Ok(Self {
            matrix,
            shape,
            d,
            k,
        })
    }

    /// `E_{PI} ⊗ D_{OF}`.
    pub fn from_encoder_decoder(
        e: &ChoiOperator,
        dec: &ChoiOperator,
        d: usize,
        k: usize,
    ) -> Result<Self> {
        Self::new(kron(&e.matrix, &dec.matrix), d, k)
    }

    /// The comb `C_{PI}` fed into the input slot, `tr_{OF} S / d^k`.
    pub fn encoder_marginal(&self) -> Result<ComplexMatrix> {
        let mut traced = middle_output_factors(self.k);
        traced.push(output_factor(self.k));
        let c = partial_trace(&self.matrix, &self.shape, &traced)?;
        Ok(c.scale_real(1.0 / self.d.pow(self.k as u32) as f64))
    }

    /// Affine residuals only; the PSD residual is left at zero.
    pub fn marginal_residuals(&self) -> Result<SuperchannelResiduals> {
        let (d, k) = (self.d, self.k);
        let tr_f = partial_trace(&self.matrix, &self.shape, &[output_factor(k)])?;
        let c = self.encoder_marginal()?;
        let expected = kron(&c, &ComplexMatrix::identity(d.pow(k as u32)));
        let c_shape = SubsystemShape::uniform(d, k + 1);
        let tr_i = partial_trace(&c, &c_shape, &input_factors(k))?;
        Ok(SuperchannelResiduals {
            psd: 0.0,
            output_marginal: tr_f.max_abs_diff(&expected),
            input_marginal: tr_i.max_abs_diff(&ComplexMatrix::identity(d)),
        })
    }

    /// All residuals, with a full eigensolve for positivity.
    pub fn residuals(&self) -> Result<SuperchannelResiduals> {
        let mut r = self.marginal_residuals()?;
        r.psd = (-min_eigenvalue(&self.matrix)?).max(0.0);
        Ok(r)
    }
}

/// `E ⊗ D` from the circuit module with `σ = 1/d`.
pub fn optimal_superchannel(d: usize, k: usize) -> Result<Superchannel> {
    check_dk(d, k)?;
    check_cap(d, k)?;
    let (e, _) = encoder(d, k)?;
    let dec = default_decoder(d, k)?;
    Superchannel::from_encoder_decoder(&e, &dec, d, k)
}

/// Orthonormal basis of the operators on `(C^d)^{⊗n}` commuting with every
/// `U^{⊗n}`, from Gram–Schmidt over the permutation operators.
pub fn commutant_basis(d: usize, n: usize) -> Result<Vec<ComplexMatrix>> {
    if n == 0 || d == 0 {
        return Err(Error::OutOfRange(format!(
            "need d, n >= 1, got d={d}, n={n}"
        )));
    }
    let ops: Vec<ComplexMatrix> = Permutation::all(n)
        .par_iter()
        .map(|p| perm_operator(p, d))
        .collect();
    Ok(gram_schmidt_hs(&ops, DEFAULT_RANK_TOL))
}

/// `Σ_{λ ⊢ n, H(λ) ≤ d} d_λ²`.
pub fn commutant_dimension(d: usize, n: usize) -> usize {
    partitions(n, d)
        .iter()
        .map(|l| {
            let dim = crate::young::irrep_dim(l) as usize;
            dim * dim
        })
        .sum()
}

/// `Ω = (1/d²) Σ_i B_i ⊗ B̄_i` with `{B_i}` an orthonormal basis of the
/// commutant of `U^{⊗(k+1)}`; `B_i` acts on `(P, I)`, `B̄_i` on `(F, O)`.
///
/// `tr(SΩ)` is the Haar-average fidelity of the superchannel `S` for
/// `U^{⊗k} ↦ Ū`.
pub fn performance_operator(d: usize, k: usize) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(Error::OutOfRange("need k >= 1".into()));
    }
    let side = check_cap(d, k)?;
    let basis = commutant_basis(d, k + 1)?;
    let mut pifo = ComplexMatrix::zeros(side, side);
    for b in &basis {
        pifo += &kron(b, &b.conj());
    }
    let omega = permute_subsystems(&pifo, &comb_shape(d, k), &pifo_to_piof(k))?;
    Ok(omega.scale_real(1.0 / (d * d) as f64))
}

/// The same operator assembled as `(1/d²) Σ_λ Σ_pq E^λ_pq ⊗ E^λ_pq / m_λ`.
pub fn performance_operator_from_units(d: usize, k: usize) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(Error::OutOfRange("need k >= 1".into()));
    }
    let side = check_cap(d, k)?;
    let mut pifo = ComplexMatrix::zeros(side, side);
    for lambda in partitions(k + 1, d) {
        let m = multiplicity(&lambda, d)
            .to_string()
            .parse::<f64>()
            .expect("finite multiplicity");
        for row in matrix_units(&lambda, d)? {
            for e in &row {
                pifo.add_scaled(&kron(e, &e.conj()), C64::new(1.0 / m, 0.0));
            }
        }
    }
    let omega = permute_subsystems(&pifo, &comb_shape(d, k), &pifo_to_piof(k))?;
    Ok(omega.scale_real(1.0 / (d * d) as f64))
}

/// Monte Carlo estimate of `Ω` with entrywise standard errors.
#[derive(Debug, Clone)]
pub struct MonteCarloOmega {
    pub mean: ComplexMatrix,
    /// Row-major, same shape as `mean`.
    pub stderr: Vec<f64>,
    pub samples: usize,
}

impl MonteCarloOmega {
    /// Largest `|Ω_ij - mean_ij| / stderr_ij`, with `floor` guarding
    /// entries whose sample variance vanishes.
    pub fn max_z_score(&self, omega: &ComplexMatrix, floor: f64) -> f64 {
        omega
            .data()
            .iter()
            .zip(self.mean.data())
            .zip(&self.stderr)
            .map(|((a, b), s)| (a - b).norm() / s.max(floor))
            .fold(0.0, f64::max)
    }
}

const MC_CHUNK: usize = 256;

/// Haar average of `(1/d²) |Ū⟩⟩⟨⟨Ū|_{PF} ⊗ (|U^{⊗k}⟩⟩⟨⟨U^{⊗k}|)ᵀ_{IO}`.
///
/// Sample `i` uses stream `i` of `seed`; sums run in fixed-size chunks so the
/// result does not depend on the thread count.
pub fn mc_performance_operator(
    d: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloOmega> {
    if samples < 2 {
        return Err(Error::OutOfRange("need at least 2 samples".into()));
    }
    if k == 0 {
        return Err(Error::OutOfRange("need k >= 1".into()));
    }
    let side = check_cap(d, k)?;
    let scale = 1.0 / (d * d) as f64;
    let chunks: Vec<(Vec<C64>, Vec<f64>)> = (0..samples.div_ceil(MC_CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut sum = vec![C64::new(0.0, 0.0); side * side];
            let mut sq = vec![0.0; side * side];
            for i in chunk * MC_CHUNK..((chunk + 1) * MC_CHUNK).min(samples) {
                let u = HaarSampler::stream(seed, i as u64).unitary(d);
                let ub = u.conj();
                let power = kron_all(std::iter::repeat_n(&ub, k));
                // [P, F, I.., O..] ordering of the integrand vector
                let v: Vec<C64> = {
                    let a = vectorize(&ub);
                    let b = vectorize(&power);
                    a.iter()
                        .flat_map(|x| b.iter().map(move |y| x * y))
                        .collect()
                };
                for (r, vr) in v.iter().enumerate() {
                    for (c, vc) in v.iter().enumerate() {
                        let x = vr * vc.conj() * scale;
                        sum[r * side + c] += x;
                        sq[r * side + c] += x.norm_sqr();
                    }
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![C64::new(0.0, 0.0); side * side];
    let mut sq = vec![0.0; side * side];
    for (s, q) in &chunks {
        for (a, b) in sum.iter_mut().zip(s) {
            *a += b;
        }
        for (a, b) in sq.iter_mut().zip(q) {
            *a += b;
        }
    }
    let n = samples as f64;
    let mean_pfio = ComplexMatrix::new(side, side, sum.iter().map(|x| x / n).collect())?;
    let var: Vec<f64> = sq
        .iter()
        .zip(mean_pfio.data())
        .map(|(q, m)| ((q / n - m.norm_sqr()) * n / (n - 1.0)).max(0.0))
        .collect();
    let var_pfio = ComplexMatrix::new(side, side, var.iter().map(|&v| C64::new(v, 0.0)).collect())?;

    // [P, F, I.., O..] -> [P, I.., O.., F]
    let mut order = vec![0];
    order.extend(2..2 * k + 2);
    order.push(1);
    let shape = comb_shape(d, k);
    let mean = permute_subsystems(&mean_pfio, &shape, &order)?;
    let var = permute_subsystems(&var_pfio, &shape, &order)?;
    let stderr = var.data().iter().map(|v| (v.re / n).sqrt()).collect();
    Ok(MonteCarloOmega {
        mean,
        stderr,
        samples,
    })
}

/// `tr(SΩ)`.
pub fn primal_value(s: &Superchannel, omega: &ComplexMatrix) -> Result<f64> {
    if omega.rows() != s.matrix.rows() || omega.cols() != s.matrix.cols() {
        return Err(Error::Dimension(format!(
            "superchannel side {} against performance operator side {}",
            s.matrix.rows(),
            omega.rows()
        )));
    }
    Ok(s.matrix.trace_product(omega).re)
}

/// Link product `tr_{IO}[S (1_P ⊗ Cᵀ_{IO} ⊗ 1_F)]`: the Choi operator of the
/// `P → F` channel obtained by plugging the channel `C: I → O` into `S`.
pub fn link_product(s: &Superchannel, c: &ChoiOperator) -> Result<ChoiOperator> {
    let (d, k) = (s.d, s.k);
    let dk = d.pow(k as u32);
    if c.dims() != (dk, dk) {
        return Err(Error::Dimension(format!(
            "expected a channel on {dk} dimensions, got {:?}",
            c.dims()
        )));
    }
    let x = dk * dk;
    let idx = |p: usize, io: usize, f: usize| (p * x + io) * d + f;
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for p in 0..d {
        for f in 0..d {
            for pp in 0..d {
                for fp in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..x {
                        for b in 0..x {
                            let cv = c.matrix[(a, b)];
                            if cv.norm_sqr() == 0.0 {
                                continue;
                            }
                            acc += s.matrix[(idx(p, a, f), idx(pp, b, fp))] * cv;
                        }
                    }
                    out[(p * d + f, pp * d + fp)] = acc;
                }
            }
        }
    }
    ChoiOperator::new(
        out,
        SubsystemShape::uniform(d, 1),
        SubsystemShape::uniform(d, 1),
    )
}

/// Dual feasible point `Ŝ = Σ_{α ⊢ k} (d/m_α) Σ_kl τ_P ⊗ E^α_kl ⊗ E^α_kl ⊗ τ_F`
/// with `τ = 1/d`, and the constant `c` with `Ω ≤ c Ŝ`.
#[derive(Debug, Clone)]
pub struct DualOperator {
    pub matrix: ComplexMatrix,
    pub constant_c: BigRational,
    pub d: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualResiduals {
    /// `max |Ŝ - W ⊗ 1_F|` with `W = tr_F Ŝ / d`.
    pub factorization: f64,
    /// `max |tr_O W - ρ ⊗ 1_I|` with `ρ = tr_{IO} W / d^k`.
    pub output_marginal: f64,
    /// `|tr ρ - 1|`.
    pub normalization: f64,
}

impl DualResiduals {
    pub fn max(&self) -> f64 {
        self.factorization
            .max(self.output_marginal)
            .max(self.normalization)
    }
}

/// `(1/d) max_{λ ⊢ k+1, H(λ) ≤ d} c(λ)`, exactly.
pub fn dual_constant(d: usize, k: usize) -> Result<BigRational> {
    check_dk(d, k)?;
    let best = max_c(k + 1, d)?;
    Ok(best.value / BigRational::from_integer((d as u64).into()))
}

pub fn dual_operator(d: usize, k: usize) -> Result<DualOperator> {
    check_dk(d, k)?;
    check_cap(d, k)?;
    let dk = d.pow(k as u32);
    let mut x = ComplexMatrix::zeros(dk * dk, dk * dk);
    for alpha in partitions(k, d) {
        let m = multiplicity(&alpha, d)
            .to_string()
            .parse::<f64>()
            .expect("finite multiplicity");
        let weight = d as f64 / m;
        for row in matrix_units(&alpha, d)? {
            for e in &row {
                x.add_scaled(&kron(e, e), C64::new(weight, 0.0));
            }
        }
    }
    let tau = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    let matrix = kron_all([&tau, &x, &tau]);
    Ok(DualOperator {
        matrix,
        constant_c: dual_constant(d, k)?,
        d,
        k,
    })
}

impl DualOperator {
    pub fn c(&self) -> f64 {
        to_f64(&self.constant_c)
    }

    /// `W = tr_F Ŝ / d` on `P, I, O`.
    pub fn w(&self) -> Result<ComplexMatrix> {
        let shape = comb_shape(self.d, self.k);
        Ok(
            partial_trace(&self.matrix, &shape, &[output_factor(self.k)])?
                .scale_real(1.0 / self.d as f64),
        )
    }

    pub fn residuals(&self) -> Result<DualResiduals> {
        let (d, k) = (self.d, self.k);
        let w = self.w()?;
        let factorization = self
            .matrix
            .max_abs_diff(&kron(&w, &ComplexMatrix::identity(d)));
        let w_shape = SubsystemShape::uniform(d, 2 * k + 1);
        let tr_o = partial_trace(&w, &w_shape, &middle_output_factors(k))?;
        let pi_shape = SubsystemShape::uniform(d, k + 1);
        let rho = partial_trace(&tr_o, &pi_shape, &input_factors(k))?
            .scale_real(1.0 / d.pow(k as u32) as f64);
        let expected = kron(&rho, &ComplexMatrix::identity(d.pow(k as u32)));
        Ok(DualResiduals {
            factorization,
            output_marginal: tr_o.max_abs_diff(&expected),
            normalization: (rho.trace().re - 1.0).abs(),
        })
    }

    /// `λ_min(c Ŝ - Ω)`.
    pub fn min_eig_gap(&self, omega: &ComplexMatrix) -> Result<f64> {
        let mut gap = self.matrix.scale_real(self.c());
        gap.add_scaled(omega, C64::new(-1.0, 0.0));
        min_eigenvalue(&gap)
    }
}

/// Result of [`certify`]. Residual names are stable keys.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub d: usize,
    pub k: usize,
    pub primal_value: f64,
    pub theory_value: f64,
    /// Exact rational, e.g. `"3/8"`.
    pub dual_c: String,
    pub dual_c_value: f64,
    /// `λ_min(cŜ - Ω)`; absent when the size cap was exceeded.
    pub min_eig_gap: Option<f64>,
    pub feasibility_residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    /// False when the size cap forced a partial report.
    pub complete: bool,
    pub valid: bool,
}

/// Certify optimality of `E ⊗ D` at tolerance [`CERTIFICATE_TOL`].
pub fn certify(d: usize, k: usize) -> Result<CertificateReport> {
    certify_with_tol(d, k, CERTIFICATE_TOL)
}

/// Primal value, exact dual constant, `λ_min(cŜ - Ω)` and every
/// feasibility residual. Beyond the size cap the primal value is taken from
/// the circuit fidelity and no eigenvalue gap is reported.
pub fn certify_with_tol(d: usize, k: usize, tol: f64) -> Result<CertificateReport> {
    check_dk(d, k)?;
    let c = dual_constant(d, k)?;
    let c_value = to_f64(&c);
    let theory_value = theory_fidelity(d, k);
    let mut residuals = BTreeMap::new();

    if check_cap(d, k).is_err() {
        let primal_value = conjugation_fidelity(d, k, &haar_unitary(d, 0))?;
        residuals.insert(
            "primal_dual_gap".to_string(),
            (primal_value - c_value).abs(),
        );
        return Ok(CertificateReport {
            d,
            k,
            primal_value,
            theory_value,
            dual_c: c.to_string(),
            dual_c_value: c_value,
            min_eig_gap: None,
            feasibility_residuals: residuals,
            tolerance: tol,
            complete: false,
            valid: false,
        });
    }

    let (e, _) = encoder(d, k)?;
    let dec = default_decoder(d, k)?;
    let s = Superchannel::from_encoder_decoder(&e, &dec, d, k)?;
    let omega = performance_operator(d, k)?;
    let primal_value = primal_value(&s, &omega)?;

    // S = E ⊗ D, so its extreme eigenvalues are products of the factors'.
    let ev_e = hermitian_eigenvalues(&e.matrix)?;
    let ev_d = hermitian_eigenvalues(&dec.matrix)?;
    let (e_lo, e_hi) = (ev_e[0], ev_e[ev_e.len() - 1]);
    let (d_lo, d_hi) = (ev_d[0], ev_d[ev_d.len() - 1]);
    let s_min = [e_lo * d_lo, e_lo * d_hi, e_hi * d_lo, e_hi * d_hi]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut sr = s.marginal_residuals()?;
    sr.psd = (-s_min).max(0.0);

    let dual = dual_operator(d, k)?;
    let dr = dual.residuals()?;
    let gap = dual.min_eig_gap(&omega)?;

    residuals.insert("superchannel_psd".to_string(), sr.psd);
    residuals.insert(
        "superchannel_output_marginal".to_string(),
        sr.output_marginal,
    );
    residuals.insert("superchannel_input_marginal".to_string(), sr.input_marginal);
    residuals.insert("dual_factorization".to_string(), dr.factorization);
    residuals.insert("dual_output_marginal".to_string(), dr.output_marginal);
    residuals.insert("dual_normalization".to_string(), dr.normalization);
    residuals.insert(
        "primal_dual_gap".to_string(),
        (primal_value - c_value).abs(),
    );

    let valid = gap >= -tol && residuals.values().all(|&r| r <= tol);
    Ok(CertificateReport {
        d,
        k,
        primal_value,
        theory_value,
        dual_c: c.to_string(),
        dual_c_value: c_value,
        min_eig_gap: Some(gap),
        feasibility_residuals: residuals,
        tolerance: tol,
        complete: true,
        valid,
    })
}

/// Sample mean and standard error of the circuit fidelity over Haar draws.
pub fn mc_average_fidelity(d: usize, k: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::OutOfRange("need at least 2 samples".into()));
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = HaarSampler::stream(seed, i as u64).special_unitary(d);
            conjugation_fidelity(d, k, &u)
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}
