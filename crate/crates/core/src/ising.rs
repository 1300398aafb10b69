//! Named function families (hypergraph Ising, weighted parity,
//! ForceOdd) and every constructive approximation built from them:
//! series composition of Ising edges, chain stretching with explicit
//! error budgets, integer approximation of constants through powers of
//! e and 2, the ForceOdd power construction, the parity decomposition
//! of permissive self-dual functions, delta-pinning, and the ternary
//! ferromagnetic factorization.

use crate::fourier::transform;
use crate::pps::{PpsAtom, PpsFormula};
use crate::table::{bit_at, FunctionTable};
use crate::{Error, Result, MAX_ARITY};

/// Caps on the stretch-plan search, beyond which double precision
/// cannot faithfully realize the requested error.
pub const MAX_CHAIN_LEN: u32 = 201;
pub const MAX_STRANDS: u64 = 1_000_000;

/// `hising(k, lambda)`: 1 on the two constant tuples, `lambda`
/// elsewhere.
pub fn hising(k: usize, lambda: f64) -> Result<FunctionTable> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Precondition(format!(
            "hypergraph Ising weight {lambda} must be a non-negative real"
        )));
    }
    if k > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity: k,
            max: MAX_ARITY,
        });
    }
    let n = 1usize << k;
    let values: Vec<f64> = (0..n)
        .map(|idx| {
            if idx == 0 || idx == n - 1 {
                1.0
            } else {
                lambda
            }
        })
        .collect();
    FunctionTable::non_negative(k, values)
}

/// `parity(k, lambda)`: 1 on even Hamming weight, `lambda` on odd.
pub fn parity_fn(k: usize, lambda: f64) -> Result<FunctionTable> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Precondition(format!(
            "parity weight {lambda} must be a non-negative real"
        )));
    }
    if k > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity: k,
            max: MAX_ARITY,
        });
    }
    let values: Vec<f64> = (0..1usize << k)
        .map(|idx| {
            if idx.count_ones() % 2 == 0 {
                1.0
            } else {
                lambda
            }
        })
        .collect();
    FunctionTable::non_negative(k, values)
}

/// Indicator of odd Hamming weight.
pub fn force_odd(k: usize) -> Result<FunctionTable> {
    if k > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity: k,
            max: MAX_ARITY,
        });
    }
    let values: Vec<f64> = (0..1usize << k)
        .map(|idx| if idx.count_ones() % 2 == 1 { 1.0 } else { 0.0 })
        .collect();
    FunctionTable::non_negative(k, values)
}

/// Series composition: for `lambda` in (0,1) returns
/// `lambda' = lambda / (1 - sqrt(1 - lambda^2)) > 1` and checks that
/// two `hising(2, lambda')` edges in series, scaled by
/// `1/(1 + lambda'^2)`, reproduce `hising(2, lambda)`.
pub fn antiferro_to_ferro_series(lambda: f64, tol: f64) -> Result<f64> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Precondition(
            "series construction needs lambda in (0,1); lambda = 0 is the equality function"
                .to_string(),
        ));
    }
    let lambda_p = lambda / (1.0 - (1.0 - lambda * lambda).sqrt());
    let edge = hising(2, lambda_p)?;
    let scale = 1.0 / (1.0 + lambda_p * lambda_p);
    let mut series = vec![0.0; 4];
    for (idx, slot) in series.iter_mut().enumerate() {
        let x = bit_at(idx, 0, 2);
        let y = bit_at(idx, 1, 2);
        let mut acc = 0.0;
        for w in [false, true] {
            acc += edge.eval(&[x, w])? * edge.eval(&[w, y])?;
        }
        *slot = scale * acc;
    }
    let series = FunctionTable::non_negative(2, series)?;
    let target = hising(2, lambda)?;
    if series.linf_distance(&target)? > tol {
        return Err(Error::VerificationFailed(format!(
            "series of two weight-{lambda_p} edges missed hising(2, {lambda})"
        )));
    }
    Ok(lambda_p)
}

/// Closed forms for the chain recurrences:
/// `m_l = y^(-l/2) ((y+1)^l + (y-1)^l) / 2` and the same with a minus
/// sign for `b_l`.
pub fn chain_values(y: f64, ell: u32) -> Result<(f64, f64)> {
    if y <= 0.0 || ell == 0 {
        return Err(Error::Precondition(format!(
            "chain closed forms need y > 0 and l >= 1, got y = {y}, l = {ell}"
        )));
    }
    let e = ell as i32;
    let scale = y.powf(-(ell as f64) / 2.0);
    let plus = (y + 1.0).powi(e);
    let minus = (y - 1.0).powi(e);
    Ok((scale * (plus + minus) / 2.0, scale * (plus - minus) / 2.0))
}

/// An explicit chain-stretching plan: `strands` parallel chains of
/// `chain_len` edges, scaled by `scale`, realizing a binary symmetric
/// table within `achieved_error` of the target Ising edge.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchPlan {
    pub antiferro: bool,
    pub chain_len: u32,
    pub strands: u64,
    /// Natural log of the scaling constant; the constant itself
    /// underflows a double for longer plans.
    pub log_scale: f64,
    pub achieved_error: f64,
    pub realized: FunctionTable,
}

impl StretchPlan {
    /// The scaling constant `c`, possibly 0 after underflow.
    pub fn scale(&self) -> f64 {
        self.log_scale.exp()
    }
}

fn trivial_plan(antiferro: bool) -> StretchPlan {
    StretchPlan {
        antiferro,
        chain_len: 0,
        strands: 0,
        log_scale: 0.0,
        achieved_error: 0.0,
        realized: FunctionTable::all_ones(2).expect("arity 2 is in range"),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::Precondition(format!(
            "approximation error {eps} must lie in (0,1)"
        )));
    }
    Ok(())
}

/// Antiferromagnetic stretch: realizes `hising(2, lambda_tgt)` with
/// `lambda_tgt > 1` from chains of `hising(2, lambda_src)` edges,
/// `lambda_src > 1`.  Diagonal entries come out exactly 1; the
/// off-diagonal overshoots the target by less than `eps`.
pub fn stretch_plan_antiferro(lambda_src: f64, lambda_tgt: f64, eps: f64) -> Result<StretchPlan> {
    if lambda_src <= 1.0 {
        return Err(Error::Precondition(format!(
            "source weight {lambda_src} must exceed 1"
        )));
    }
    if lambda_tgt < 1.0 {
        return Err(Error::Precondition(format!(
            "target weight {lambda_tgt} must be at least 1"
        )));
    }
    check_eps(eps)?;
    if lambda_tgt == 1.0 {
        return Ok(trivial_plan(true));
    }

    let y = 1.0 / lambda_src;
    let growth = (1.0 + y) / (1.0 - y);
    let bound = 1.0 + 2.0 * lambda_tgt / eps;
    let mut ell = 1u32;
    while growth.powi(ell as i32) <= bound {
        ell += 2; // smallest odd chain length
        if ell > MAX_CHAIN_LEN {
            return Err(Error::PlanOutOfRange(format!(
                "no odd chain length up to {MAX_CHAIN_LEN} reaches error {eps}"
            )));
        }
    }
    // off-diagonal / diagonal ratio of one chain
    let ratio = 1.0 + 2.0 / (growth.powi(ell as i32) - 1.0);
    let mut strands = 1u64;
    while ratio.powi(strands as i32) <= lambda_tgt {
        strands += 1;
        if strands > MAX_STRANDS {
            return Err(Error::PlanOutOfRange(format!(
                "no strand count up to {MAX_STRANDS} reaches the target weight"
            )));
        }
    }
    let off = ratio.powi(strands as i32);
    let achieved_error = off - lambda_tgt;
    if !(achieved_error > 0.0 && achieved_error < eps) {
        return Err(Error::VerificationFailed(format!(
            "antiferro stretch realized error {achieved_error}, requested {eps}"
        )));
    }
    let (m, _) = chain_values(y, ell)?;
    Ok(StretchPlan {
        antiferro: true,
        chain_len: ell,
        strands,
        log_scale: -(strands as f64) * m.ln(),
        achieved_error,
        realized: FunctionTable::symmetric(&[1.0, off, 1.0])?,
    })
}

/// Ferromagnetic stretch: realizes `hising(2, lambda_tgt)` with
/// `lambda_tgt` in (0,1) from chains of `hising(2, lambda_src)` edges,
/// `lambda_src` in (0,1).  Off-diagonal entries come out exactly
/// `lambda_tgt`; the diagonal overshoots 1 by less than `eps`.
pub fn stretch_plan_ferro(lambda_src: f64, lambda_tgt: f64, eps: f64) -> Result<StretchPlan> {
    if !(0.0 < lambda_src && lambda_src < 1.0) {
        return Err(Error::Precondition(format!(
            "source weight {lambda_src} must lie in (0,1)"
        )));
    }
    if lambda_tgt == 1.0 {
        check_eps(eps)?;
        return Ok(trivial_plan(false));
    }
    if !(0.0 < lambda_tgt && lambda_tgt < 1.0) {
        return Err(Error::Precondition(format!(
            "target weight {lambda_tgt} must lie in (0,1); 0 is the equality function, \
             available outright"
        )));
    }
    check_eps(eps)?;

    let y = 1.0 / lambda_src;
    let growth = (y + 1.0) / (y - 1.0);
    let bound = 1.0 + 2.0 / eps;
    let mut ell = 1u32;
    while growth.powi(ell as i32) <= bound {
        ell += 1;
        if ell > MAX_CHAIN_LEN {
            return Err(Error::PlanOutOfRange(format!(
                "no chain length up to {MAX_CHAIN_LEN} reaches error {eps}"
            )));
        }
    }
    // diagonal / off-diagonal ratio of one chain
    let ratio = 1.0 + 2.0 / (growth.powi(ell as i32) - 1.0);
    let cap = 1.0 / lambda_tgt;
    let mut strands = 1u64;
    while ratio.powi(strands as i32) <= cap {
        strands += 1;
        if strands > MAX_STRANDS {
            return Err(Error::PlanOutOfRange(format!(
                "no strand count up to {MAX_STRANDS} reaches the target weight"
            )));
        }
    }
    let diag = lambda_tgt * ratio.powi(strands as i32);
    let achieved_error = diag - 1.0;
    if !(achieved_error > 0.0 && achieved_error < eps) {
        return Err(Error::VerificationFailed(format!(
            "ferro stretch realized error {achieved_error}, requested {eps}"
        )));
    }
    let (_, b) = chain_values(y, ell)?;
    Ok(StretchPlan {
        antiferro: false,
        chain_len: ell,
        strands,
        log_scale: lambda_tgt.ln() - (strands as f64) * b.ln(),
        achieved_error,
        realized: FunctionTable::symmetric(&[diag, lambda_tgt, diag])?,
    })
}

/// Integer pair approximating a real: `|a + b ln 2 - z| < delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletApprox {
    pub a: i64,
    pub b: i64,
    pub achieved_error: f64,
}

/// Finds integers `(a, b)` with `|a + b ln 2 - z| < delta` via the
/// continued-fraction convergents of `ln 2` (denominators up to 1e9).
pub fn dirichlet_const(z: f64, delta: f64) -> Result<DirichletApprox> {
    if delta <= 0.0 || delta.is_nan() || !z.is_finite() {
        return Err(Error::Precondition(format!(
            "need a finite target and delta > 0, got z = {z}, delta = {delta}"
        )));
    }
    let alpha = std::f64::consts::LN_2;

    // Convergents p/q of alpha by the Euclidean expansion.
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (0i64, 1i64); // a_0 = 0
    let mut x = alpha;
    let mut chosen: Option<(i64, i64, f64)> = None;
    loop {
        let d = (p as f64 - q as f64 * alpha).abs();
        if d > 0.0 && d < delta {
            chosen = Some((p, q, d));
            break;
        }
        x = 1.0 / (x - x.floor());
        let term = x.floor() as i64;
        let p_next = term * p + p_prev;
        let q_next = term * q + q_prev;
        if q_next > 1_000_000_000 {
            break;
        }
        (p_prev, q_prev) = (p, q);
        (p, q) = (p_next, q_next);
    }
    let (p, q, d) = chosen.ok_or_else(|| {
        Error::PlanOutOfRange(format!(
            "delta {delta} below the resolution of denominator-1e9 convergents"
        ))
    })?;

    if (z / d).abs() > 1e15 {
        return Err(Error::PlanOutOfRange(format!(
            "multiplier {z}/{d} exceeds exact integer range"
        )));
    }
    let n = (z / d).floor() as i64;
    let (a, b) = if p as f64 > q as f64 * alpha {
        (p * n, -q * n)
    } else {
        (-p * n, q * n)
    };
    let achieved_error = (a as f64 + b as f64 * alpha - z).abs();
    if achieved_error >= delta {
        return Err(Error::VerificationFailed(format!(
            "Dirichlet pair ({a}, {b}) missed {z} by {achieved_error} >= {delta}"
        )));
    }
    Ok(DirichletApprox {
        a,
        b,
        achieved_error,
    })
}

/// Flat formula expressing ForceOdd of even arity `k` (2..=8) over
/// ForceOdd_4 and equality atoms.
pub fn force_odd_from_fo4(k: usize) -> Result<PpsFormula> {
    if !k.is_multiple_of(2) || !(2..=8).contains(&k) {
        return Err(Error::Precondition(format!(
            "the ForceOdd recursion is defined for even arities 2..=8, got {k}"
        )));
    }
    let fo4 = force_odd(4)?;
    let eq = FunctionTable::equality();

    // ForceOdd_2(x, y) = sum_{w,z} FO4(x, y, w, z) EQ(x, w) EQ(x, z)
    let fo2_atoms = |y: usize, z: usize, w1: usize, w2: usize| {
        vec![
            PpsAtom {
                table: fo4.clone(),
                args: vec![y, z, w1, w2],
            },
            PpsAtom {
                table: eq.clone(),
                args: vec![y, w1],
            },
            PpsAtom {
                table: eq.clone(),
                args: vec![y, w2],
            },
        ]
    };

    if k == 2 {
        return PpsFormula::new(2, 2, fo2_atoms(0, 1, 2, 3));
    }
    if k == 4 {
        return PpsFormula::new(
            4,
            0,
            vec![PpsAtom {
                table: fo4,
                args: vec![0, 1, 2, 3],
            }],
        );
    }

    // k >= 6:
    // ForceOdd_k(x_1..x_k) =
    //   sum_{y,z} FO4(x_1, x_2, x_3, y) FO2(y, z) FO_{k-2}(z, x_4..x_k)
    // with FO2 expanded in place and the recursive formula flattened;
    // all bound-variable sets are disjoint so the sums commute.
    let sub = force_odd_from_fo4(k - 2)?;
    let (y, z, w1, w2) = (k, k + 1, k + 2, k + 3);
    let mut atoms = vec![PpsAtom {
        table: fo4.clone(),
        args: vec![0, 1, 2, y],
    }];
    atoms.extend(fo2_atoms(y, z, w1, w2));
    let sub_free = sub.free_arity();
    for atom in sub.atoms() {
        let args = atom
            .args
            .iter()
            .map(|&v| {
                if v == 0 {
                    z // the sub-formula's first free variable
                } else if v < sub_free {
                    v + 2 // x_{v+3} overall
                } else {
                    k + 4 + (v - sub_free)
                }
            })
            .collect();
        atoms.push(PpsAtom {
            table: atom.table.clone(),
            args,
        });
    }
    PpsFormula::new(k, 4 + sub.bound_count(), atoms)
}

/// Formula expressing the weighted parity function through ForceOdd:
/// `parity(k, lambda)(x) = lambda * sum_y FO_k(x_1..x_{k-1}, y)
/// hising(2, 1/lambda)(y, x_k)`.
pub fn parity_from_forceodd(k: usize, lambda: f64) -> Result<PpsFormula> {
    if !(2..=MAX_ARITY).contains(&k) {
        return Err(Error::ArityOutOfRange {
            arity: k,
            max: MAX_ARITY,
        });
    }
    if lambda <= 0.0 || lambda.is_nan() {
        return Err(Error::Precondition(
            "the parity expression needs lambda > 0".into(),
        ));
    }
    let y = k; // single bound variable
    let mut args: Vec<usize> = (0..k - 1).collect();
    args.push(y);
    PpsFormula::new(
        k,
        1,
        vec![
            PpsAtom {
                table: FunctionTable::constant(lambda)?,
                args: vec![],
            },
            PpsAtom {
                table: force_odd(k)?,
                args,
            },
            PpsAtom {
                table: hising(2, 1.0 / lambda)?,
                args: vec![y, k - 1],
            },
        ],
    )
}

/// The ForceOdd_4 power construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceOddApprox {
    /// Power applied to the normalized base function.
    pub exponent: u32,
    pub achieved_error: f64,
    /// `base^exponent`, within `achieved_error` of ForceOdd_4.
    pub power: FunctionTable,
    /// The unnormalized symmetric function built from the two Ising
    /// weights (four edges to the center, six pairwise edges).
    pub raw: FunctionTable,
}

/// Builds the 4-ary self-dual function from Ising edges with weights
/// `lambda = sqrt(16 + sqrt(255))` and `lambda' = 2`, normalizes by
/// the odd-weight value, and powers it until within `eps` of
/// ForceOdd_4 in the sup norm.
pub fn force_odd4_approx(eps: f64) -> Result<ForceOddApprox> {
    check_eps(eps)?;
    let lambda_p: f64 = 2.0;
    let lambda = (lambda_p.powi(4) + (lambda_p.powi(8) - 1.0).sqrt()).sqrt();

    // f(x) = (sum_y prod_i hising(x_i, y)) * prod_{i<j} hising'(x_i, x_j)
    //      = (lambda^w + lambda^(4-w)) * lambda'^(w (4-w))  at weight w
    let weights: Vec<f64> = (0..=4)
        .map(|w| (lambda.powi(w) + lambda.powi(4 - w)) * lambda_p.powi(w * (4 - w)))
        .collect();
    let raw = FunctionTable::symmetric(&weights)?;

    let odd = weights[1];
    let base = raw.scale(1.0 / odd)?;
    let target = force_odd(4)?;
    let per_step = base
        .values()
        .iter()
        .zip(target.values())
        .map(|(g, t)| if *t == 0.0 { *g } else { 0.0 })
        .fold(0.0, f64::max);
    debug_assert!(per_step < 1.0);

    let mut exponent = 1u32;
    let mut err = per_step;
    while err >= eps {
        exponent += 1;
        err = per_step.powi(exponent as i32);
        if exponent as u64 > MAX_STRANDS {
            return Err(Error::PlanOutOfRange(format!(
                "power construction did not reach error {eps}"
            )));
        }
    }
    let power = base.powi(exponent);
    let achieved_error = power.linf_distance(&target)?;
    Ok(ForceOddApprox {
        exponent,
        achieved_error,
        power,
        raw,
    })
}

/// One factor of the parity decomposition: a weighted parity function
/// supported on the coordinates where `support` is one.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityFactor {
    pub support: Vec<bool>,
    pub lambda: f64,
}

impl ParityFactor {
    /// Expands the factor to a full table of the given arity:
    /// `lambda` on assignments of even weight inside the support,
    /// `1/lambda` on odd weight.
    pub fn to_table(&self, arity: usize) -> Result<FunctionTable> {
        if self.support.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: self.support.len(),
            });
        }
        let mask: usize = self
            .support
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| 1usize << (arity - 1 - i))
            .sum();
        let values: Vec<f64> = (0..1usize << arity)
            .map(|idx| {
                if (idx & mask).count_ones().is_multiple_of(2) {
                    self.lambda
                } else {
                    1.0 / self.lambda
                }
            })
            .collect();
        FunctionTable::non_negative(arity, values)
    }
}

/// Writes a permissive self-dual function as an entrywise product of
/// weighted parity factors, one per even-weight spectrum position of
/// its logarithm (the empty-support factor carries the overall scale).
pub fn sd_parity_decompose(f: &FunctionTable, tol: f64) -> Result<Vec<ParityFactor>> {
    if !f.is_permissive() {
        return Err(Error::Precondition(
            "parity decomposition needs a permissive function".into(),
        ));
    }
    let k = f.arity();
    for idx in 0..f.len() {
        if (f.get(idx) - f.get(!idx & (f.len() - 1))).abs() > tol {
            return Err(Error::Precondition(
                "parity decomposition needs a self-dual function".into(),
            ));
        }
    }
    let log_f = FunctionTable::signed(k, f.values().iter().map(|v| v.ln()).collect())?;
    let spectrum = transform(&log_f);
    let mut factors = Vec::new();
    for idx in 0..f.len() {
        if idx.count_ones() % 2 == 0 {
            factors.push(ParityFactor {
                support: crate::table::bits_of(idx, k),
                lambda: spectrum.get(idx).exp(),
            });
        }
    }
    Ok(factors)
}

/// Entrywise product of parity factors (the reconstruction side of the
/// decomposition).
pub fn parity_factor_product(arity: usize, factors: &[ParityFactor]) -> Result<FunctionTable> {
    let mut acc = FunctionTable::all_ones(arity)?;
    for factor in factors {
        acc = acc.product(&factor.to_table(arity)?)?;
    }
    Ok(acc)
}

/// `H_j = F + 2^-j`: the permissive self-dual approximation of a
/// self-dual function.
pub fn permissive_lift(f: &FunctionTable, j: u32) -> Result<FunctionTable> {
    for idx in 0..f.len() {
        if (f.get(idx) - f.get(!idx & (f.len() - 1))).abs() > 0.0 {
            return Err(Error::Precondition(
                "permissive lift needs a self-dual function".into(),
            ));
        }
    }
    let shift = 0.5f64.powi(j as i32);
    FunctionTable::non_negative(f.arity(), f.values().iter().map(|v| v + shift).collect())
}

/// Delta-pinning sequence: powers of the normalized diagonal (or of
/// the two-step reduction when the diagonal is balanced) converging to
/// a point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPinSequence {
    /// Which point mass the sequence converges to.
    pub target_bit: bool,
    /// Terms `h_1, ..., h_n` in order.
    pub terms: Vec<FunctionTable>,
}

pub fn delta_pin(f: &FunctionTable, n: u32, tol: f64) -> Result<DeltaPinSequence> {
    let k = f.arity();
    if k == 0 || n == 0 {
        return Err(Error::Precondition(
            "delta-pinning needs arity >= 1 and at least one term".into(),
        ));
    }
    let last = f.len() - 1;
    let (h0, h1) = if (f.get(0) - f.get(last)).abs() > tol {
        (f.get(0), f.get(last))
    } else {
        // Balanced diagonal: find a witness a with f(a) != f(!a), glue
        // the a-pattern into a binary function g, then sum one side out.
        let witness = (0..f.len())
            .find(|&idx| (f.get(idx) - f.get(!idx & last)).abs() > tol)
            .ok_or_else(|| {
                Error::Precondition("function is self-dual; no pinning witness exists".into())
            })?;
        let g = |u: bool, v: bool| {
            let mut idx = 0usize;
            for pos in 0..k {
                let bit = if bit_at(witness, pos, k) { v } else { u };
                idx = (idx << 1) | usize::from(bit);
            }
            f.get(idx)
        };
        (
            g(false, false) + g(false, true),
            g(true, false) + g(true, true),
        )
    };
    let target_bit = h1 > h0;
    let denom = h0.max(h1);
    let base = [h0 / denom, h1 / denom];
    let terms = (1..=n)
        .map(|m| {
            FunctionTable::non_negative(1, vec![base[0].powi(m as i32), base[1].powi(m as i32)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeltaPinSequence { target_bit, terms })
}

/// Outcome of the ternary ferromagnetic factorization.  Argument
/// positions are 0-based (x, y, z) = (0, 1, 2).
#[derive(Debug, Clone, PartialEq)]
pub enum TernaryFactorization {
    /// `f = hising(l_xy)(x,y) hising(l_xz)(x,z) hising(l_yz)(y,z)`.
    Product {
        lambda_xy: f64,
        lambda_xz: f64,
        lambda_yz: f64,
    },
    /// The all-zero function.
    Zero,
    /// `f = EQ(x,y) EQ(y,z)`.
    DoubleEquality,
    /// `f = EQ(eq.0, eq.1) * hising(2, lambda)(ising.0, ising.1)`.
    EqualityIsing {
        eq: (usize, usize),
        ising: (usize, usize),
        lambda: f64,
    },
}

impl TernaryFactorization {
    /// Expands the factorization back to a ternary table.
    pub fn to_table(&self) -> Result<FunctionTable> {
        let pair_product = |pairs: &[((usize, usize), FunctionTable)]| -> Result<FunctionTable> {
            let mut acc = FunctionTable::all_ones(3)?;
            for ((i, j), table) in pairs {
                acc = acc.product(&crate::pps::atom_table(table, 3, &[*i, *j])?)?;
            }
            Ok(acc)
        };
        match self {
            TernaryFactorization::Product {
                lambda_xy,
                lambda_xz,
                lambda_yz,
            } => pair_product(&[
                ((0, 1), hising(2, *lambda_xy)?),
                ((0, 2), hising(2, *lambda_xz)?),
                ((1, 2), hising(2, *lambda_yz)?),
            ]),
            TernaryFactorization::Zero => FunctionTable::zeros(3),
            TernaryFactorization::DoubleEquality => pair_product(&[
                ((0, 1), FunctionTable::equality()),
                ((1, 2), FunctionTable::equality()),
            ]),
            TernaryFactorization::EqualityIsing { eq, ising, lambda } => pair_product(&[
                ((eq.0, eq.1), FunctionTable::equality()),
                ((ising.0, ising.1), hising(2, *lambda)?),
            ]),
        }
    }
}

/// Factorizes a ternary self-dual function, normalized to
/// `f(0,0,0) = 1` unless identically zero, into pairwise ferromagnetic
/// Ising edges.  The lattice inequalities are checked explicitly and
/// the reconstruction is verified entrywise.
pub fn collapse2_factorize(f: &FunctionTable, tol: f64) -> Result<TernaryFactorization> {
    if f.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            got: f.arity(),
        });
    }
    if f.is_signed() {
        return Err(Error::SignedInput);
    }
    for idx in 0..8 {
        if (f.get(idx) - f.get(!idx & 7)).abs() > tol {
            return Err(Error::Precondition(format!(
                "not self-dual at assignment index {idx}"
            )));
        }
    }
    if f.values().iter().all(|v| v.abs() <= tol) {
        return Ok(TernaryFactorization::Zero);
    }
    if (f.get(0) - 1.0).abs() > tol {
        return Err(Error::Precondition(format!(
            "caller must normalize f(0,0,0) = 1, found {}",
            f.get(0)
        )));
    }
    let (a, b, c) = (f.get(0b001), f.get(0b010), f.get(0b100));
    let checks = [
        (c, a * b, "c >= a*b (pinning of the first argument)"),
        (b, a * c, "b >= a*c (pinning of the second argument)"),
        (a, b * c, "a >= b*c (pinning of the third argument)"),
    ];
    for (lhs, rhs, name) in checks {
        if lhs + tol < rhs {
            return Err(Error::Precondition(format!(
                "log-supermodularity inequality {name} fails: {lhs} < {rhs}"
            )));
        }
    }

    let factorization = if a > tol && b > tol && c > tol {
        let lambda_xy = (b * c / a).sqrt();
        let lambda_xz = (a * c / b).sqrt();
        let lambda_yz = (a * b / c).sqrt();
        for (name, l) in [("xy", lambda_xy), ("xz", lambda_xz), ("yz", lambda_yz)] {
            if l > 1.0 + tol {
                return Err(Error::Precondition(format!(
                    "edge weight lambda_{name} = {l} exceeds 1"
                )));
            }
        }
        TernaryFactorization::Product {
            lambda_xy,
            lambda_xz,
            lambda_yz,
        }
    } else {
        // Non-permissive with unit diagonal: at most one of a, b, c is
        // nonzero, anything else already failed the inequalities.
        let positive: Vec<usize> = [a, b, c]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > tol)
            .map(|(i, _)| i)
            .collect();
        match positive.as_slice() {
            [] => TernaryFactorization::DoubleEquality,
            [single] => {
                let (eq, ising, lambda) = match single {
                    0 => ((0usize, 1usize), (1usize, 2usize), a),
                    1 => ((0, 2), (2, 1), b),
                    _ => ((1, 2), (2, 0), c),
                };
                if lambda > 1.0 + tol {
                    return Err(Error::Precondition(format!(
                        "log-supermodularity inequality f(000) f(111) >= f(a) f(!a) fails: \
                         1 < {lambda}^2"
                    )));
                }
                TernaryFactorization::EqualityIsing { eq, ising, lambda }
            }
            _ => unreachable!("two positive off-diagonals cannot pass the inequalities"),
        }
    };

    let rebuilt = factorization.to_table()?;
    if rebuilt.linf_distance(f)? > tol.max(1e-12) {
        return Err(Error::VerificationFailed(
            "ternary factorization did not reproduce the input".into(),
        ));
    }
    Ok(factorization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOL;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn family_tables() {
        assert_eq!(hising(2, 0.0).unwrap(), FunctionTable::equality());
        let g = hising(4, 0.25).unwrap();
        assert_eq!(
            g,
            FunctionTable::symmetric(&[1.0, 0.25, 0.25, 0.25, 1.0]).unwrap()
        );
        assert_eq!(hising(3, 1.0).unwrap(), FunctionTable::all_ones(3).unwrap());

        assert_eq!(parity_fn(2, 0.3).unwrap(), hising(2, 0.3).unwrap());
        assert_eq!(
            parity_fn(3, 1.0).unwrap(),
            FunctionTable::all_ones(3).unwrap()
        );
        assert_eq!(force_odd(2).unwrap(), FunctionTable::xor());
        assert!(hising(2, -0.5).is_err());
    }

    #[test]
    fn parity_and_force_odd_are_self_dual_at_even_arity() {
        for k in [2usize, 4, 6] {
            for lambda in [0.0, 0.5, 2.0] {
                let p = parity_fn(k, lambda).unwrap();
                assert_eq!(p.complement(), p);
            }
            let fo = force_odd(k).unwrap();
            assert_eq!(fo.complement(), fo);
        }
    }

    #[test]
    fn series_identity() {
        // lambda = 3/5 gives lambda' = 3 and (2*3)/(1+9) = 3/5.
        let lambda_p = antiferro_to_ferro_series(0.6, 1e-12).unwrap();
        assert!((lambda_p - 3.0).abs() < 1e-12);
        for i in 1..=9 {
            let lambda = i as f64 / 10.0;
            let lp = antiferro_to_ferro_series(lambda, 1e-12).unwrap();
            assert!(lp > 1.0);
            assert!((2.0 * lp / (1.0 + lp * lp) - lambda).abs() < 1e-12);
        }
        // lambda -> 1 pushes lambda' -> 1 from above
        let lp = antiferro_to_ferro_series(0.999999, 1e-9).unwrap();
        assert!(lp > 1.0 && lp < 1.01);
        assert!(antiferro_to_ferro_series(0.0, 1e-9).is_err());
        assert!(antiferro_to_ferro_series(1.0, 1e-9).is_err());
    }

    #[test]
    fn chain_closed_forms_match_recurrence() {
        for &y in &[0.25f64, 0.5, 2.0 / 3.0, 1.0, 1.5, 4.0] {
            let (mut m, mut b) = (y.sqrt(), 1.0 / y.sqrt());
            let (m1, b1) = chain_values(y, 1).unwrap();
            assert!((m1 - m).abs() <= 1e-12 * m.abs());
            assert!((b1 - b).abs() <= 1e-12 * b.abs());
            for ell in 2..=40u32 {
                let next_m = y.sqrt() * m + b / y.sqrt();
                let next_b = m / y.sqrt() + y.sqrt() * b;
                (m, b) = (next_m, next_b);
                let (mc, bc) = chain_values(y, ell).unwrap();
                assert!((mc - m).abs() <= 1e-12 * m.abs(), "m at y={y}, l={ell}");
                assert!((bc - b).abs() <= 1e-12 * b.abs(), "b at y={y}, l={ell}");
            }
        }
        // y = 1 collapses both closed forms to 2^(l-1)
        for ell in 1..=20u32 {
            let (m, b) = chain_values(1.0, ell).unwrap();
            let want = 2f64.powi(ell as i32 - 1);
            assert_eq!(m, want);
            assert_eq!(b, want);
        }
        assert!(chain_values(0.0, 3).is_err());
        assert!(chain_values(2.0, 0).is_err());
    }

    #[test]
    fn stretch_plans_meet_their_budgets() {
        for &eps in &[0.1, 0.01, 0.001] {
            let plan = stretch_plan_antiferro(2.0, 5.0, eps).unwrap();
            assert!(plan.achieved_error < eps && plan.achieved_error > 0.0);
            assert!(plan.chain_len % 2 == 1);
            let target = hising(2, 5.0).unwrap();
            assert!(plan.realized.linf_distance(&target).unwrap() < eps);
            assert_eq!(plan.realized.get(0), 1.0);

            let plan = stretch_plan_ferro(0.5, 0.25, eps).unwrap();
            assert!(plan.achieved_error < eps && plan.achieved_error > 0.0);
            let target = hising(2, 0.25).unwrap();
            assert!(plan.realized.linf_distance(&target).unwrap() < eps);
            assert_eq!(plan.realized.get(1), 0.25);
        }
        // shrinking eps shrinks the achieved error
        let coarse = stretch_plan_antiferro(2.0, 5.0, 0.1).unwrap();
        let fine = stretch_plan_antiferro(2.0, 5.0, 0.001).unwrap();
        assert!(fine.achieved_error < coarse.achieved_error);

        // same source and target still yields a valid plan
        let plan = stretch_plan_antiferro(3.0, 3.0, 0.05).unwrap();
        assert!(plan.achieved_error < 0.05);
        let plan = stretch_plan_ferro(0.5, 0.5, 0.05).unwrap();
        assert!(plan.achieved_error < 0.05);

        // target weight 1 is the trivial constant plan
        let plan = stretch_plan_antiferro(2.0, 1.0, 0.5).unwrap();
        assert_eq!(plan.achieved_error, 0.0);
        assert_eq!(plan.scale(), 1.0);
        assert_eq!(plan.realized, FunctionTable::all_ones(2).unwrap());

        assert!(stretch_plan_antiferro(0.5, 2.0, 0.1).is_err());
        assert!(stretch_plan_ferro(0.5, 0.0, 0.1).is_err());
    }

    #[test]
    fn chain_scale_realizes_the_plan() {
        // c * m^t and c * b^t computed from the closed forms agree
        // with the realized table.
        let plan = stretch_plan_antiferro(2.0, 5.0, 0.01).unwrap();
        let y = 0.5;
        let (m, b) = chain_values(y, plan.chain_len).unwrap();
        let t = plan.strands as f64;
        let diag = (plan.log_scale + t * m.ln()).exp();
        let off = (plan.log_scale + t * b.ln()).exp();
        assert!((diag - 1.0).abs() < 1e-9);
        assert!((off - plan.realized.get(1)).abs() < 1e-9 * off);
    }

    #[test]
    fn dirichlet_examples() {
        for &(z, delta) in &[
            (1.0, 1e-3),
            (-2.5, 1e-4),
            (std::f64::consts::PI, 1e-4),
            (std::f64::consts::LN_2, 0.5),
        ] {
            let approx = dirichlet_const(z, delta).unwrap();
            let alpha = std::f64::consts::LN_2;
            let err = (approx.a as f64 + approx.b as f64 * alpha - z).abs();
            assert!(err < delta, "z={z}, delta={delta}, err={err}");
            assert_eq!(approx.achieved_error, err);
        }
        assert!(dirichlet_const(1.0, 0.0).is_err());
    }

    #[test]
    fn force_odd_formulas() {
        for k in [2usize, 4, 6, 8] {
            let formula = force_odd_from_fo4(k).unwrap();
            assert!(formula.eval().approx_eq(&force_odd(k).unwrap(), 1e-12));
        }
        assert!(force_odd_from_fo4(3).is_err());
        assert!(force_odd_from_fo4(10).is_err());
    }

    #[test]
    fn parity_formulas() {
        for (k, lambda) in [(2usize, 2.0), (4, 0.5), (3, 1.5), (6, 2.0)] {
            let formula = parity_from_forceodd(k, lambda).unwrap();
            assert!(
                formula
                    .eval()
                    .approx_eq(&parity_fn(k, lambda).unwrap(), 1e-12),
                "k={k}, lambda={lambda}"
            );
        }
        let ones = parity_from_forceodd(4, 1.0).unwrap().eval();
        assert!(ones.approx_eq(&FunctionTable::all_ones(4).unwrap(), 1e-12));
        assert!(parity_from_forceodd(4, 0.0).is_err());
    }

    #[test]
    fn force_odd4_power() {
        let approx = force_odd4_approx(0.01).unwrap();
        // quoted values: f(0,0,0,0) = 1023 and f(0,0,0,1) ~ 1491
        let f0 = approx.raw.get(0);
        let f1 = approx.raw.get(1);
        assert!((f0 - 1023.0).abs() / 1023.0 < 1e-3);
        assert!((f1 - 1491.0).abs() / 1491.0 < 1e-3);
        // closed-form cross-check of the defining identity
        let lambda = (16.0 + (255f64).sqrt()).sqrt();
        assert!((f0 - (lambda.powi(4) + 1.0)).abs() < 1e-9 * f0);
        assert!((f0 - 2.0 * lambda * lambda * 16.0).abs() < 1e-9 * f0);
        assert!((f1 - (lambda + lambda.powi(3)) * 8.0).abs() < 1e-9 * f1);
        assert!(approx.achieved_error < 0.01);
        assert!(approx
            .power
            .linf_distance(&force_odd(4).unwrap())
            .unwrap()
            .eq(&approx.achieved_error));

        // monotone convergence of the powers
        let coarse = force_odd4_approx(0.1).unwrap();
        assert!(coarse.exponent <= approx.exponent);
        let mut prev = f64::INFINITY;
        for j in 1..=coarse.exponent + 3 {
            let err = coarse
                .raw
                .scale(1.0 / coarse.raw.get(1))
                .unwrap()
                .powi(j)
                .linf_distance(&force_odd(4).unwrap())
                .unwrap();
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn sd_parity_decomposition() {
        // hising(2, lambda > 0): a single non-trivial factor at w = (1,1)
        let f = hising(2, 0.7).unwrap();
        let factors = sd_parity_decompose(&f, DEFAULT_TOL).unwrap();
        let nontrivial: Vec<_> = factors
            .iter()
            .filter(|fac| (fac.lambda - 1.0).abs() > 1e-12 && fac.support.iter().any(|&s| s))
            .collect();
        assert_eq!(nontrivial.len(), 1);
        assert_eq!(nontrivial[0].support, vec![true, true]);
        let rebuilt = parity_factor_product(2, &factors).unwrap();
        assert!(rebuilt.approx_eq(&f, 1e-12));

        // all-ones: every factor weight is 1
        let ones = FunctionTable::all_ones(3).unwrap();
        for fac in sd_parity_decompose(&ones, DEFAULT_TOL).unwrap() {
            assert!((fac.lambda - 1.0).abs() < 1e-12);
        }

        // random permissive self-dual tables reconstruct within 1e-6 relative
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let k = rng.random_range(1..=4usize);
            let half: Vec<f64> = (0..1usize << k)
                .map(|_| rng.random_range(0.2..3.0))
                .collect();
            let g = FunctionTable::non_negative(k, half).unwrap();
            let f = g.product(&g.complement()).unwrap();
            let factors = sd_parity_decompose(&f, DEFAULT_TOL).unwrap();
            let rebuilt = parity_factor_product(k, &factors).unwrap();
            for idx in 0..f.len() {
                assert!((rebuilt.get(idx) - f.get(idx)).abs() <= 1e-6 * f.get(idx));
            }
        }

        assert!(sd_parity_decompose(&FunctionTable::equality(), DEFAULT_TOL).is_err());
        assert!(sd_parity_decompose(
            &FunctionTable::symmetric(&[2.0, 1.0, 1.0]).unwrap(),
            DEFAULT_TOL
        )
        .is_err());
    }

    #[test]
    fn permissive_lift_matches_constructive_sum() {
        let f = FunctionTable::symmetric(&[1.0, 0.0, 1.0]).unwrap();
        for j in 1..=6u32 {
            let lifted = permissive_lift(&f, j).unwrap();
            assert!(lifted.is_permissive());
            assert_eq!(lifted.complement(), lifted);
            assert_eq!(f.linf_distance(&lifted).unwrap(), 0.5f64.powi(j as i32));
            // the displayed construction: 2^-(j+1) sum_{y,z} G(x,y,z) hising(2,2)(y,z)^j
            let edge = hising(2, 2.0).unwrap();
            for idx in 0..f.len() {
                let mut acc = 0.0;
                for y in [false, true] {
                    for z in [false, true] {
                        let g = if y != z { f.get(idx) } else { 1.0 };
                        acc += g * edge.eval(&[y, z]).unwrap().powi(j as i32);
                    }
                }
                let h = 0.5f64.powi(j as i32 + 1) * acc;
                assert!((h - lifted.get(idx)).abs() < 1e-12);
            }
        }
        assert!(permissive_lift(&FunctionTable::symmetric(&[2.0, 1.0, 0.0]).unwrap(), 2).is_err());
    }

    #[test]
    fn delta_pin_sequences() {
        // [2,1,0]: converges to delta_0, the one-entry stays 0
        let f = FunctionTable::symmetric(&[2.0, 1.0, 0.0]).unwrap();
        let seq = delta_pin(&f, 10, DEFAULT_TOL).unwrap();
        assert!(!seq.target_bit);
        for term in &seq.terms {
            assert_eq!(term.get(1), 0.0);
            assert_eq!(term.get(0), 1.0);
        }

        // [0,1,2]: converges to delta_1
        let f = FunctionTable::symmetric(&[0.0, 1.0, 2.0]).unwrap();
        let seq = delta_pin(&f, 10, DEFAULT_TOL).unwrap();
        assert!(seq.target_bit);
        let delta1 = FunctionTable::delta(true);
        let mut prev = f64::INFINITY;
        for term in &seq.terms {
            let dist = term.linf_distance(&delta1).unwrap();
            // strictly decreasing while nonzero
            assert!(dist <= prev && (dist < prev || dist == 0.0));
            prev = dist;
        }

        // asymmetric table with unequal diagonal pins directly
        let f = FunctionTable::non_negative(2, vec![1.0, 2.0, 1.0, 3.0]).unwrap();
        let seq = delta_pin(&f, 8, DEFAULT_TOL).unwrap();
        assert!(seq.target_bit);
        assert!(seq.terms.last().unwrap().get(0) < 0.05);

        // balanced diagonal forces the reduction path
        let f = FunctionTable::non_negative(2, vec![1.0, 2.0, 1.0, 1.0]).unwrap();
        let seq = delta_pin(&f, 8, DEFAULT_TOL).unwrap();
        // h = [f(00)+f(01), f(10)+f(11)] = [3, 2] -> delta_0
        assert!(!seq.target_bit);
        assert!((seq.terms[0].get(1) - 2.0 / 3.0).abs() < 1e-12);

        // fully self-dual input has no witness
        let sd = FunctionTable::symmetric(&[1.0, 2.0, 1.0]).unwrap();
        assert!(delta_pin(&sd, 3, DEFAULT_TOL).is_err());
    }

    #[test]
    fn collapse2_cases() {
        // right inverse: a product of three Ising edges is recovered
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..50 {
            let l1 = rng.random_range(0.05..=1.0);
            let l2 = rng.random_range(0.05..=1.0);
            let l3 = rng.random_range(0.05..=1.0);
            let f = TernaryFactorization::Product {
                lambda_xy: l1,
                lambda_xz: l2,
                lambda_yz: l3,
            }
            .to_table()
            .unwrap();
            match collapse2_factorize(&f, 1e-9).unwrap() {
                TernaryFactorization::Product {
                    lambda_xy,
                    lambda_xz,
                    lambda_yz,
                } => {
                    assert!((lambda_xy - l1).abs() < 1e-9);
                    assert!((lambda_xz - l2).abs() < 1e-9);
                    assert!((lambda_yz - l3).abs() < 1e-9);
                }
                other => panic!("expected product factorization, got {other:?}"),
            }
        }

        // equal off-diagonals a = b = c give lambda_i = sqrt(a)
        let a: f64 = 0.5;
        let f = FunctionTable::non_negative(3, vec![1.0, a, a, a, a, a, a, 1.0]).unwrap();
        match collapse2_factorize(&f, 1e-9).unwrap() {
            TernaryFactorization::Product { lambda_xy, .. } => {
                assert!((lambda_xy - a.sqrt()).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }

        // non-permissive branches
        let zero = FunctionTable::zeros(3).unwrap();
        assert_eq!(
            collapse2_factorize(&zero, 1e-9).unwrap(),
            TernaryFactorization::Zero
        );

        let chain = TernaryFactorization::DoubleEquality.to_table().unwrap();
        assert_eq!(
            collapse2_factorize(&chain, 1e-9).unwrap(),
            TernaryFactorization::DoubleEquality
        );

        for (single, eq, ising) in [
            (0usize, (0, 1), (1, 2)),
            (1, (0, 2), (2, 1)),
            (2, (1, 2), (2, 0)),
        ] {
            let lambda = 0.6;
            let f = TernaryFactorization::EqualityIsing { eq, ising, lambda }
                .to_table()
                .unwrap();
            match collapse2_factorize(&f, 1e-9).unwrap() {
                TernaryFactorization::EqualityIsing {
                    lambda: found,
                    eq: feq,
                    ..
                } => {
                    assert!((found - lambda).abs() < 1e-12, "branch {single}");
                    assert_eq!(feq, eq);
                }
                other => panic!("expected equality-ising, got {other:?}"),
            }
        }

        // failing inequality is reported
        let bad =
            FunctionTable::non_negative(3, vec![1.0, 0.9, 0.9, 0.1, 0.1, 0.9, 0.9, 1.0]).unwrap();
        let err = collapse2_factorize(&bad, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));

        // unnormalized input is rejected
        let f = FunctionTable::non_negative(3, vec![2.0; 8]).unwrap();
        assert!(collapse2_factorize(&f, 1e-9).is_err());

        // equality-Ising with weight above 1 violates log-supermodularity
        let f = TernaryFactorization::EqualityIsing {
            eq: (0, 1),
            ising: (1, 2),
            lambda: 1.5,
        }
        .to_table()
        .unwrap();
        assert!(collapse2_factorize(&f, 1e-9).is_err());
    }
}
