//! The normalized Walsh-Hadamard transform and its calculus: the
//! butterfly transform and inverse, XOR-convolution, closed forms for
//! the hypergraph-Ising and parity spectra, and the constructive
//! pipeline that turns a negative Fourier coefficient into a NAND
//! witness.

use crate::ising;
use crate::table::{bit_at, index_of, FunctionTable};
use crate::{Error, Result, MAX_ARITY};

/// Normalized transform `f_hat(x) = 2^-k sum_w (-1)^{wt(w & x)} f(w)`,
/// computed as an in-place butterfly with the 1/2 scaling folded into
/// each level.  The image is always `Signed`.
pub fn transform(f: &FunctionTable) -> FunctionTable {
    let mut values = f.values().to_vec();
    butterfly(&mut values, 0.5);
    FunctionTable::signed(f.arity(), values).expect("butterfly preserves shape")
}

/// Unnormalized inverse, `2^k` times the forward transform, so that
/// `transform(inverse_transform(g)) = g`.
pub fn inverse_transform(g: &FunctionTable) -> FunctionTable {
    let mut values = g.values().to_vec();
    butterfly(&mut values, 1.0);
    FunctionTable::signed(g.arity(), values).expect("butterfly preserves shape")
}

fn butterfly(values: &mut [f64], level_scale: f64) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let (a, b) = (values[j], values[j + h]);
                values[j] = level_scale * (a + b);
                values[j + h] = level_scale * (a - b);
            }
            i += h * 2;
        }
        h *= 2;
    }
}

/// XOR-convolution `h(x) = sum_w f(w) g(w XOR x)`; equals the
/// transform of the pointwise product of the inverse images.
pub fn convolve(fh: &FunctionTable, gh: &FunctionTable) -> Result<FunctionTable> {
    if fh.arity() != gh.arity() {
        return Err(Error::ArityMismatch {
            expected: fh.arity(),
            got: gh.arity(),
        });
    }
    let n = fh.len();
    let mut values = vec![0.0; n];
    for (x, slot) in values.iter_mut().enumerate() {
        let mut acc = 0.0;
        for w in 0..n {
            acc += fh.get(w) * gh.get(w ^ x);
        }
        *slot = acc;
    }
    FunctionTable::signed(fh.arity(), values)
}

/// Closed-form spectrum of the k-ary hypergraph Ising function:
/// `lambda + (1-lambda)/2^(k-1)` at the origin, `(1-lambda)/2^(k-1)`
/// on positive even weights, zero on odd weights.  `k = 0` is the
/// nullary constant 1, which is its own transform.
pub fn hising_hat(k: usize, lambda: f64) -> Result<FunctionTable> {
    if lambda < 0.0 {
        return Err(Error::Precondition(format!("lambda {lambda} is negative")));
    }
    if k > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity: k,
            max: MAX_ARITY,
        });
    }
    if k == 0 {
        return FunctionTable::signed(0, vec![1.0]);
    }
    let even = (1.0 - lambda) / (1 << (k - 1)) as f64;
    let values: Vec<f64> = (0..1usize << k)
        .map(|idx| {
            if idx == 0 {
                lambda + even
            } else if idx.count_ones() % 2 == 0 {
                even
            } else {
                0.0
            }
        })
        .collect();
    FunctionTable::signed(k, values)
}

/// One coefficient of the hypergraph Ising spectrum.
pub fn hising_hat_coeff(k: usize, lambda: f64, x: &[bool]) -> Result<f64> {
    let table = hising_hat(k, lambda)?;
    table.eval(x)
}

/// Closed-form spectrum of the weighted parity function:
/// `(1+lambda)/2` at the origin, `(1-lambda)/2` at the all-ones
/// position, zero elsewhere.
pub fn parity_hat(k: usize, lambda: f64) -> Result<FunctionTable> {
    if k == 0 {
        return Err(Error::ArityOutOfRange { arity: 0, max: 0 });
    }
    if k > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity: k,
            max: MAX_ARITY,
        });
    }
    let mut values = vec![0.0; 1 << k];
    values[0] = 0.5 * (1.0 + lambda);
    values[(1 << k) - 1] = 0.5 * (1.0 - lambda);
    FunctionTable::signed(k, values)
}

/// Given `f_hat(a) < 0`, permutes the one-positions of `a` to the
/// front and sums out the rest, producing `g` of arity `wt(a)` with
/// `g_hat(1...1) = 2^(n - wt(a)) * f_hat(a) < 0`.
pub fn neg_coeff_reduce(f: &FunctionTable, a: &[bool], tol: f64) -> Result<FunctionTable> {
    let n = f.arity();
    if a.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: a.len(),
        });
    }
    let fh = transform(f);
    let coeff = fh.get(index_of(a));
    if coeff >= -tol {
        return Err(Error::Precondition(format!(
            "coefficient at the given position is {coeff}, not strictly negative"
        )));
    }
    // The mean coefficient is positive for a nonzero non-negative
    // table, so a = 0 can never satisfy the sign condition above.
    //
    // Permutation sending position j to the slot block matching a_j,
    // so the permuted spectrum carries f_hat(a) at 1...10...0.
    let ones = a.iter().filter(|&&b| b).count();
    let mut perm = vec![0usize; n];
    let (mut next_one, mut next_zero) = (0usize, ones);
    for (j, &bit) in a.iter().enumerate() {
        if bit {
            perm[j] = next_one;
            next_one += 1;
        } else {
            perm[j] = next_zero;
            next_zero += 1;
        }
    }
    let mut g = f.permute_args(&perm)?;
    for _ in 0..n - ones {
        g = g.sum_out_last()?;
    }
    Ok(g)
}

/// Given `f_hat(1...1) < 0`, builds the k-ary permissive function
/// `h(x) = sum_y PARITY_{k+n,1/2}(x, y) f(y)`, which again has a
/// negative coefficient at the all-ones position.
pub fn tech_lift(f: &FunctionTable, k: usize, tol: f64) -> Result<FunctionTable> {
    let n = f.arity();
    if k == 0 {
        return Err(Error::Precondition("target arity must be positive".into()));
    }
    if k + n > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity: k + n,
            max: MAX_ARITY,
        });
    }
    let fh = transform(f);
    let corner = fh.get(fh.len() - 1);
    if corner >= -tol {
        return Err(Error::Precondition(format!(
            "coefficient at the all-ones position is {corner}, not strictly negative"
        )));
    }
    // f'(x, y) = f(y): y occupies the low n index bits.
    let lifted: Vec<f64> = (0..1usize << (k + n))
        .map(|idx| f.get(idx & ((1 << n) - 1)))
        .collect();
    let lifted = FunctionTable::signed(k + n, lifted)?;
    let parity = ising::parity_fn(k + n, 0.5)?;
    let mut h = parity.product(&lifted)?;
    for _ in 0..n {
        h = h.sum_out_last()?;
    }
    FunctionTable::non_negative(h.arity(), h.values().to_vec())
}

/// The NAND construction: for a unary witness with `h(1) = 1` and
/// `0 < h(0) < 1/2`, the product `g(x,y) h(x) h(y)` with
/// `g = [h(0)^-2, h(0)^-1, 0]` is exactly `[1, 1, 0]`.
pub fn nand_from_witness(h: &FunctionTable, tol: f64) -> Result<FunctionTable> {
    if h.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: h.arity(),
        });
    }
    let h0 = h.get(0);
    let h1 = h.get(1);
    if (h1 - 1.0).abs() > tol {
        return Err(Error::Precondition(format!("h(1) = {h1}, expected 1")));
    }
    if h0 <= 0.0 || h0 >= 0.5 {
        return Err(Error::Precondition(format!(
            "h(0) = {h0} is outside (0, 1/2)"
        )));
    }
    let g = FunctionTable::symmetric(&[h0.powi(-2), h0.powi(-1), 0.0])?;
    let values: Vec<f64> = (0..4)
        .map(|idx| {
            let x = bit_at(idx, 0, 2);
            let y = bit_at(idx, 1, 2);
            g.get(idx) * h.get(usize::from(x)) * h.get(usize::from(y))
        })
        .collect();
    let nand = FunctionTable::non_negative(2, values)?;
    let target = FunctionTable::symmetric(&[1.0, 1.0, 0.0])?;
    if nand.linf_distance(&target)? > tol {
        return Err(Error::VerificationFailed(
            "NAND construction did not reproduce [1,1,0]".into(),
        ));
    }
    Ok(nand)
}
