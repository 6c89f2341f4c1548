//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

#![allow(clippy::needless_range_loop)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;

use conjucirc::circuit::{
    apply_circuit, conjugation_fidelity, exact_conjugation_isometry, inversion_simulation,
    theory_fidelity, ChoiOperator,
};
use conjucirc::haar::HaarSampler;
use conjucirc::linalg::{kron_all, ComplexMatrix, C64};
use conjucirc::performance::{
    certify, dual_constant, link_product, mc_performance_operator, optimal_superchannel,
    performance_operator, primal_value,
};
use conjucirc::schur_weyl::{branch_index, branching_embed, matrix_unit, matrix_units};
use conjucirc::young::{
    c_lambda_brute, c_lambda_closed, irrep_dim, multiplicity, partitions, vershik_sum,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tensor_power(u: &ComplexMatrix, n: usize) -> ComplexMatrix {
    kron_all(std::iter::repeat_n(u, n))
}

fn fidelity_theorem() -> Outcome {
    let mut worst = 0.0f64;
    for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2)] {
        for i in 0..20 {
            let u = HaarSampler::stream(1001, i).special_unitary(d);
            let f = conjugation_fidelity(d, k, &u).map_err(|e| e.to_string())?;
            let err = (f - theory_fidelity(d, k)).abs();
            worst = worst.max(err);
            ensure(err <= 1e-9, || format!("d={d} k={k} sample {i}: F={f}"))?;
        }
    }
    Ok(format!("100 samples, max deviation {worst:.2e}"))
}

fn exactness() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=4 {
        let v = exact_conjugation_isometry(d).map_err(|e| e.to_string())?;
        for i in 0..20 {
            let u = HaarSampler::stream(2002, i).special_unitary(d);
            let out = &(&v.adjoint() * &tensor_power(&u, d - 1)) * &v;
            let err = out.max_abs_diff(&u.conj());
            worst = worst.max(err);
            ensure(err <= 1e-10, || format!("d={d} sample {i}: error {err:e}"))?;
        }
    }
    Ok(format!("60 samples, max error {worst:.2e}"))
}

fn primal() -> Outcome {
    let mut parts = Vec::new();
    for (d, k) in [(2, 1), (3, 1), (3, 2)] {
        let s = optimal_superchannel(d, k).map_err(|e| e.to_string())?;
        let omega = performance_operator(d, k).map_err(|e| e.to_string())?;
        let p = primal_value(&s, &omega).map_err(|e| e.to_string())?;
        let err = (p - theory_fidelity(d, k)).abs();
        ensure(err <= 1e-9, || format!("d={d} k={k}: tr(SΩ)={p}"))?;
        parts.push(format!("({d},{k})={p:.12}"));
    }
    Ok(parts.join(" "))
}

fn dual_constant_exact() -> Outcome {
    let mut count = 0;
    for d in 2..=8usize {
        for k in 1..d {
            let c = dual_constant(d, k).map_err(|e| e.to_string())?;
            let expected = BigRational::new(((k + 1) as u64).into(), ((d * (d - k)) as u64).into());
            ensure(c == expected, || {
                format!("d={d} k={k}: c={c}, expected {expected}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs equal in exact rationals"))
}

fn dual_inequality() -> Outcome {
    let mut parts = Vec::new();
    for (d, k) in [(2, 1), (3, 1), (3, 2)] {
        let r = certify(d, k).map_err(|e| e.to_string())?;
        let gap = r.min_eig_gap.ok_or("no eigenvalue gap computed")?;
        let worst = r
            .feasibility_residuals
            .values()
            .cloned()
            .fold(0.0, f64::max);
        ensure(r.valid && gap >= -1e-9 && worst <= 1e-9, || {
            format!(
                "d={d} k={k}: gap={gap:e}, residuals {:?}",
                r.feasibility_residuals
            )
        })?;
        parts.push(format!("({d},{k}) gap={gap:.1e} res={worst:.1e}"));
    }
    Ok(parts.join(" "))
}

fn c_lambda_identities() -> Outcome {
    let mut count = 0;
    for n in 1..=8 {
        for d in 1..=8 {
            for lambda in partitions(n, d) {
                let a = c_lambda_closed(&lambda, d).map_err(|e| e.to_string())?;
                let b = c_lambda_brute(&lambda, d).map_err(|e| e.to_string())?;
                ensure(a == b, || {
                    format!("λ={lambda} d={d}: closed {a} vs brute {b}")
                })?;
                count += 1;
            }
        }
    }
    let mut shapes = 0;
    for n in 1..=10usize {
        for lambda in partitions(n, n) {
            let v = vershik_sum(&lambda);
            ensure(v == BigRational::from_integer((n as u64).into()), || {
                format!("λ={lambda}: sum {v}")
            })?;
            shapes += 1;
        }
    }
    Ok(format!("{count} (λ,d) pairs, {shapes} Vershik shapes"))
}

fn representation_core() -> Outcome {
    let mut worst = 0.0f64;
    for n in [3, 4] {
        for d in [2usize, 3] {
            let side = d.pow(n as u32);
            let mut total = ComplexMatrix::zeros(side, side);
            let all: Vec<_> = partitions(n, d)
                .into_iter()
                .map(|l| {
                    let u = matrix_units(&l, d).expect("within size guard");
                    (l, u)
                })
                .collect();
            for (li, (l, units)) in all.iter().enumerate() {
                let m = multiplicity(l, d).to_string().parse::<f64>().unwrap();
                let dim = units.len();
                for i in 0..dim {
                    total += &units[i][i];
                    for j in 0..dim {
                        let tr_err = (units[i][j].trace()
                            - C64::new(if i == j { m } else { 0.0 }, 0.0))
                        .norm();
                        worst = worst.max(tr_err);
                        for (lj, (_, other)) in all.iter().enumerate() {
                            for (kk, row) in other.iter().enumerate() {
                                for (q, e) in row.iter().enumerate() {
                                    let prod = &units[i][j] * e;
                                    let err = if li == lj && j == kk {
                                        prod.max_abs_diff(&units[i][q])
                                    } else {
                                        prod.max_abs()
                                    };
                                    worst = worst.max(err);
                                }
                            }
                        }
                    }
                }
            }
            worst = worst.max(total.max_abs_diff(&ComplexMatrix::identity(side)));

            for alpha in partitions(n - 1, d) {
                let dim = irrep_dim(&alpha) as usize;
                for i in 0..dim {
                    for j in 0..dim {
                        let left = branching_embed(&alpha, i, j, d).map_err(|e| e.to_string())?;
                        let mut right = ComplexMatrix::zeros(side, side);
                        for lambda in alpha.additions(d) {
                            let r = branch_index(&lambda, &alpha, i).unwrap();
                            let c = branch_index(&lambda, &alpha, j).unwrap();
                            right += &matrix_unit(&lambda, r, c, d).map_err(|e| e.to_string())?;
                        }
                        worst = worst.max(left.max_abs_diff(&right));
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max violation {worst:e}"))?;

    for n in 1..=6usize {
        for d in 1..=5usize {
            let sum: BigUint = partitions(n, n)
                .iter()
                .map(|l| multiplicity(l, d) * BigUint::from(irrep_dim(l)))
                .sum();
            ensure(sum == BigUint::from(d).pow(n as u32), || {
                format!("n={n} d={d}: Σ d_λ m_λ = {sum}")
            })?;
        }
    }
    Ok(format!(
        "max relation/branching violation {worst:.2e}; dimension count exact"
    ))
}

fn inversion() -> Outcome {
    let mut parts = Vec::new();
    for (d, k) in [(2, 1), (3, 1), (3, 2)] {
        let u = HaarSampler::stream(3003, d as u64 * 10 + k as u64).special_unitary(d);
        let r = inversion_simulation(d, k, &u, 10_000, 42 + (d * 10 + k) as u64)
            .map_err(|e| e.to_string())?;
        let q = 1.0 / (d * d) as f64;
        let z = (r.success_rate - q).abs() / r.binomial_stderr;
        let ferr = (r.conditional_fidelity - theory_fidelity(d, k)).abs();
        ensure(z <= 3.0 && ferr <= 1e-9, || {
            format!(
                "d={d} k={k}: rate {} (z={z:.2}), fidelity {}",
                r.success_rate, r.conditional_fidelity
            )
        })?;
        parts.push(format!("({d},{k}) rate={:.4} z={z:.2}", r.success_rate));
    }
    Ok(parts.join(" "))
}

fn cross_paths() -> Outcome {
    let mut worst = 0.0f64;
    for (d, k) in [(2, 1), (3, 1), (3, 2)] {
        let s = optimal_superchannel(d, k).map_err(|e| e.to_string())?;
        for i in 0..3 {
            let u = HaarSampler::stream(4004, i).special_unitary(d);
            let input = ChoiOperator::unitary(&tensor_power(&u, k));
            let linked = link_product(&s, &input).map_err(|e| e.to_string())?;
            let direct = apply_circuit(d, k, &u).map_err(|e| e.to_string())?;
            worst = worst.max(linked.matrix.max_abs_diff(&direct.matrix));
        }
    }
    ensure(worst <= 1e-9, || {
        format!("link product vs Kraus chain: {worst:e}")
    })?;
    let omega = performance_operator(2, 1).map_err(|e| e.to_string())?;
    let mc = mc_performance_operator(2, 1, 10_000, 5005).map_err(|e| e.to_string())?;
    let z = mc.max_z_score(&omega, 1e-12);
    ensure(z <= 5.0, || {
        format!("Monte Carlo Ω off by {z:.2} standard errors")
    })?;
    Ok(format!(
        "composition paths differ by {worst:.2e}; Ω within {z:.2} standard errors"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("fidelity theorem", fidelity_theorem),
        ("exactness at k=d-1", exactness),
        ("primal value", primal),
        ("dual constant", dual_constant_exact),
        ("dual matrix inequality", dual_inequality),
        ("c(λ) closed form and Vershik identity", c_lambda_identities),
        ("representation-theory core", representation_core),
        ("inversion demo", inversion),
        ("cross-path consistency", cross_paths),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
