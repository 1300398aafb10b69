//! Membership predicates for the function classes cut out by
//! self-duality, spectrum signs, log-supermodularity and block
//! monotonicity, each returning a concrete witness on failure, plus a
//! combined classification report.

use crate::circuit::matchineq_check;
use crate::fourier::transform;
use crate::table::{bit_at, bits_of, ArgPartition, FunctionTable, PinSlot};
use crate::{Error, Result};

/// A verdict with an optional counterexample; `witness` is always
/// present when `holds` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Checked<W> {
    fn pass() -> Self {
        Checked {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: W) -> Self {
        Checked {
            holds: false,
            witness: Some(witness),
        }
    }
}

/// A signed spectrum coefficient in the wrong half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffWitness {
    pub position: Vec<bool>,
    pub value: f64,
}

/// A violating pair for log-supermodularity, with the failing
/// two-pinning template when one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct LsmWitness {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    pub lhs: f64,
    pub rhs: f64,
    pub pinning: Option<Vec<PinSlot>>,
}

/// A block whose 0-to-1 flip fails the required growth factor.
#[derive(Debug, Clone, PartialEq)]
pub struct MonWitness {
    pub block: Vec<usize>,
    pub assignment: Vec<bool>,
    pub required: f64,
    pub found: f64,
}

/// Positions witnessing that neither parity class of the spectrum
/// vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityWitness {
    pub odd_position: Vec<bool>,
    pub even_position: Vec<bool>,
}

/// Self-duality: `f(x) = f(complement x)` everywhere.
pub fn is_sd(f: &FunctionTable, tol: f64) -> Checked<Vec<bool>> {
    let mask = f.len() - 1;
    for idx in 0..f.len() {
        if (f.get(idx) - f.get(!idx & mask)).abs() > tol {
            return Checked::fail(bits_of(idx, f.arity()));
        }
    }
    Checked::pass()
}

/// Non-negative spectrum.  Rejects tables already marked signed.
pub fn is_p(f: &FunctionTable, tol: f64) -> Result<Checked<CoeffWitness>> {
    if f.is_signed() {
        return Err(Error::SignedInput);
    }
    let fh = transform(f);
    for idx in 0..fh.len() {
        if fh.get(idx) < -tol {
            return Ok(Checked::fail(CoeffWitness {
                position: bits_of(idx, f.arity()),
                value: fh.get(idx),
            }));
        }
    }
    Ok(Checked::pass())
}

/// Alternating spectrum: non-negative on even weights, non-positive on
/// odd weights.
pub fn is_pn(f: &FunctionTable, tol: f64) -> Result<Checked<CoeffWitness>> {
    if f.is_signed() {
        return Err(Error::SignedInput);
    }
    let fh = transform(f);
    for idx in 0..fh.len() {
        let v = fh.get(idx);
        let bad = if idx.count_ones() % 2 == 0 {
            v < -tol
        } else {
            v > tol
        };
        if bad {
            return Ok(Checked::fail(CoeffWitness {
                position: bits_of(idx, f.arity()),
                value: v,
            }));
        }
    }
    Ok(Checked::pass())
}

/// The triple intersection: self-dual with non-negative spectrum
/// (equivalently alternating spectrum, since odd coefficients vanish).
pub fn is_sdp(f: &FunctionTable, tol: f64) -> Result<bool> {
    Ok(is_sd(f, tol).holds && is_p(f, tol)?.holds && is_pn(f, tol)?.holds)
}

/// Log-supermodularity: `f(x|y) f(x&y) >= f(x) f(y)` for all pairs.
pub fn is_lsm(f: &FunctionTable, tol: f64) -> Checked<LsmWitness> {
    let k = f.arity();
    for x in 0..f.len() {
        for y in x + 1..f.len() {
            let join = x | y;
            let meet = x & y;
            if join == x || join == y {
                continue; // comparable pairs hold trivially
            }
            let lhs = f.get(join) * f.get(meet);
            let rhs = f.get(x) * f.get(y);
            if lhs < rhs - tol {
                let pinning = if (x ^ y).count_ones() == 2 {
                    let diff = x ^ y;
                    let mut slots = Vec::with_capacity(k);
                    let mut first = true;
                    for pos in 0..k {
                        if bit_at(diff, pos, k) {
                            slots.push(if first { PinSlot::X } else { PinSlot::Y });
                            first = false;
                        } else if bit_at(x, pos, k) {
                            slots.push(PinSlot::One);
                        } else {
                            slots.push(PinSlot::Zero);
                        }
                    }
                    Some(slots)
                } else {
                    None
                };
                return Checked::fail(LsmWitness {
                    x: bits_of(x, k),
                    y: bits_of(y, k),
                    lhs,
                    rhs,
                    pinning,
                });
            }
        }
    }
    Checked::pass()
}

/// The pinning criterion: a permissive function is log-supermodular
/// iff every 2-pinning is.  Only claimed for permissive input.
pub fn topkis_equiv(f: &FunctionTable, tol: f64) -> Result<bool> {
    if !f.is_permissive() {
        return Err(Error::Precondition(
            "the pinning criterion applies to permissive functions".into(),
        ));
    }
    let k = f.arity();
    if k < 2 {
        return Ok(true);
    }
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let rest: Vec<usize> = (0..k).filter(|&p| p != i && p != j).collect();
            for fill in 0..1usize << rest.len() {
                let mut slots = vec![PinSlot::Zero; k];
                slots[i] = PinSlot::X;
                slots[j] = PinSlot::Y;
                for (pos, &p) in rest.iter().enumerate() {
                    slots[p] = if (fill >> pos) & 1 == 1 {
                        PinSlot::One
                    } else {
                        PinSlot::Zero
                    };
                }
                let g = f.two_pinning(&slots)?;
                if g.get(0b11) * g.get(0b00) < g.get(0b01) * g.get(0b10) - tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn fictitious_args(f: &FunctionTable, tol: f64) -> Vec<bool> {
    let k = f.arity();
    (0..k)
        .map(|i| {
            let flip = 1usize << (k - 1 - i);
            (0..f.len()).all(|idx| (f.get(idx) - f.get(idx ^ flip)).abs() <= tol)
        })
        .collect()
}

/// Alpha-monotonicity: flipping any non-fictitious argument from 0 to
/// 1 multiplies the value by at least `alpha`.
pub fn is_alpha_monotone(f: &FunctionTable, alpha: f64, tol: f64) -> Result<Checked<MonWitness>> {
    if alpha < 0.0 {
        return Err(Error::Precondition(format!(
            "monotonicity factor {alpha} must be non-negative"
        )));
    }
    let k = f.arity();
    let fictitious = fictitious_args(f, tol);
    for (i, _) in fictitious.iter().enumerate().filter(|(_, fict)| !**fict) {
        let flip = 1usize << (k - 1 - i);
        for idx in 0..f.len() {
            if idx & flip != 0 {
                continue;
            }
            let low = alpha * f.get(idx);
            let high = f.get(idx | flip);
            if low > high + tol {
                return Ok(Checked::fail(MonWitness {
                    block: vec![i],
                    assignment: bits_of(idx, k),
                    required: low,
                    found: high,
                }));
            }
        }
    }
    Ok(Checked::pass())
}

/// Block variant: collapse the forced-equality blocks first, then test
/// alpha-monotonicity of the collapsed function.
pub fn is_block_alpha_monotone(
    f: &FunctionTable,
    alpha: f64,
    tol: f64,
) -> Result<Checked<MonWitness>> {
    let partition = f.equiv_relation(tol);
    let collapsed = f.collapse_blocks(&partition);
    let inner = is_alpha_monotone(&collapsed, alpha, tol)?;
    Ok(match inner.witness {
        None => Checked::pass(),
        Some(w) => {
            let block = partition.blocks()[w.block[0]].clone();
            Checked::fail(MonWitness { block, ..w })
        }
    })
}

/// Whether a signed spectrum vanishes on all odd-weight positions or
/// on all even-weight positions.
pub fn parity_condition(fhat: &FunctionTable, tol: f64) -> Checked<ParityWitness> {
    let first_nonzero = |parity: u32| {
        (0..fhat.len()).find(|&idx| idx.count_ones() % 2 == parity && fhat.get(idx).abs() > tol)
    };
    match (first_nonzero(1), first_nonzero(0)) {
        (Some(odd), Some(even)) => Checked::fail(ParityWitness {
            odd_position: bits_of(odd, fhat.arity()),
            even_position: bits_of(even, fhat.arity()),
        }),
        _ => Checked::pass(),
    }
}

/// Combined report over all predicates; the matching inequality is
/// evaluated only for 4-ary members of the triple intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub arity: usize,
    pub alpha: f64,
    pub sd: Checked<Vec<bool>>,
    pub p: Checked<CoeffWitness>,
    pub pn: Checked<CoeffWitness>,
    pub sdp: bool,
    pub lsm: Checked<LsmWitness>,
    pub mon_alpha: Checked<MonWitness>,
    pub parity_condition: Checked<ParityWitness>,
    /// `(holds, slack)` when applicable, otherwise `None`.
    pub matchineq: Option<(bool, f64)>,
}

pub fn classify(f: &FunctionTable, alpha: f64, tol: f64) -> Result<MembershipReport> {
    let sd = is_sd(f, tol);
    let p = is_p(f, tol)?;
    let pn = is_pn(f, tol)?;
    let sdp = sd.holds && p.holds && pn.holds;
    let lsm = is_lsm(f, tol);
    let mon_alpha = is_block_alpha_monotone(f, alpha, tol)?;
    let fhat = transform(f);
    let parity = parity_condition(&fhat, tol);
    let matchineq = if f.arity() == 4 && sdp {
        Some(matchineq_check(&fhat, tol)?)
    } else {
        None
    };
    Ok(MembershipReport {
        arity: f.arity(),
        alpha,
        sd,
        p,
        pn,
        sdp,
        lsm,
        mon_alpha,
        parity_condition: parity,
        matchineq,
    })
}

/// Detects argument blocks exposed for reporting.
pub fn arg_partition(f: &FunctionTable, tol: f64) -> ArgPartition {
    f.equiv_relation(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::transform;
    use crate::ising::hising;
    use crate::DEFAULT_TOL;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sym(w: &[f64]) -> FunctionTable {
        FunctionTable::symmetric(w).unwrap()
    }

    #[test]
    fn sd_p_pn_on_the_three_binary_examples() {
        let f = sym(&[0.0, 1.0, 0.0]);
        let g = sym(&[2.0, 1.0, 0.0]);
        let h = sym(&[0.0, 1.0, 2.0]);

        assert!(is_sd(&f, DEFAULT_TOL).holds);
        assert!(!is_p(&f, DEFAULT_TOL).unwrap().holds);
        assert!(!is_pn(&f, DEFAULT_TOL).unwrap().holds);

        let g_sd = is_sd(&g, DEFAULT_TOL);
        assert!(!g_sd.holds);
        assert_eq!(g_sd.witness.unwrap(), vec![false, false]);
        assert!(is_p(&g, DEFAULT_TOL).unwrap().holds);
        assert!(!is_pn(&g, DEFAULT_TOL).unwrap().holds);

        assert!(!is_sd(&h, DEFAULT_TOL).holds);
        assert!(!is_p(&h, DEFAULT_TOL).unwrap().holds);
        assert!(is_pn(&h, DEFAULT_TOL).unwrap().holds);

        let constant = FunctionTable::all_ones(3).unwrap();
        assert!(is_sd(&constant, DEFAULT_TOL).holds);
    }

    #[test]
    fn sdp_examples() {
        assert!(is_sdp(&sym(&[13.0, 4.0, 1.0, 4.0, 13.0]), DEFAULT_TOL).unwrap());
        assert!(!is_sdp(&sym(&[0.0, 1.0, 0.0]), DEFAULT_TOL).unwrap());
        assert!(is_sdp(&FunctionTable::zeros(2).unwrap(), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn triple_intersection_equality() {
        // SD&P, SD&PN and P&PN agree on random tables.
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..300 {
            let k = rng.random_range(0..=4usize);
            let mut f = FunctionTable::non_negative(
                k,
                (0..1usize << k)
                    .map(|_| rng.random_range(0.0..2.0))
                    .collect(),
            )
            .unwrap();
            // bias half the samples toward self-dual
            if rng.random_bool(0.5) {
                f = f.product(&f.complement()).unwrap();
            }
            let sd = is_sd(&f, DEFAULT_TOL).holds;
            let p = is_p(&f, DEFAULT_TOL).unwrap().holds;
            let pn = is_pn(&f, DEFAULT_TOL).unwrap().holds;
            assert_eq!(sd && p, sd && pn);
            assert_eq!(sd && p, p && pn);
        }
    }

    #[test]
    fn odd_spectrum_characterizes_self_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..300 {
            let k = rng.random_range(0..=4usize);
            let mut f = FunctionTable::non_negative(
                k,
                (0..1usize << k)
                    .map(|_| rng.random_range(0.0..2.0))
                    .collect(),
            )
            .unwrap();
            if rng.random_bool(0.5) {
                f = f.product(&f.complement()).unwrap();
            }
            let fh = transform(&f);
            let odd_vanishes = (0..f.len())
                .filter(|i| i.count_ones() % 2 == 1)
                .all(|i| fh.get(i).abs() <= DEFAULT_TOL);
            assert_eq!(is_sd(&f, DEFAULT_TOL).holds, odd_vanishes);
        }
    }

    #[test]
    fn pn_is_p_of_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..200 {
            let k = rng.random_range(0..=4usize);
            let f = FunctionTable::non_negative(
                k,
                (0..1usize << k)
                    .map(|_| rng.random_range(0.0..2.0))
                    .collect(),
            )
            .unwrap();
            assert_eq!(
                is_pn(&f, DEFAULT_TOL).unwrap().holds,
                is_p(&f.complement(), DEFAULT_TOL).unwrap().holds
            );
        }
    }

    #[test]
    fn lsm_examples() {
        let report = is_lsm(&sym(&[13.0, 4.0, 1.0, 4.0, 13.0]), DEFAULT_TOL);
        assert!(!report.holds);
        let witness = report.witness.unwrap();
        assert!(witness.lhs < witness.rhs);

        // unary functions are trivially log-supermodular
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..20 {
            let f = FunctionTable::non_negative(
                1,
                vec![rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)],
            )
            .unwrap();
            assert!(is_lsm(&f, DEFAULT_TOL).holds);
        }

        for k in 2..=5usize {
            for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
                assert!(is_lsm(&hising(k, lambda).unwrap(), DEFAULT_TOL).holds);
                assert!(is_sdp(&hising(k, lambda).unwrap(), DEFAULT_TOL).unwrap());
            }
        }
    }

    #[test]
    fn hferro_counterexample_pinning() {
        // the 4-ary symmetric function in the triple intersection that
        // fails log-supermodularity via the (x, y, 0, 0) pinning
        let f = sym(&[13.0, 4.0, 1.0, 4.0, 13.0]);
        assert!(is_sdp(&f, DEFAULT_TOL).unwrap());
        let report = is_lsm(&f, DEFAULT_TOL);
        assert!(!report.holds);
        let pinning = report.witness.unwrap().pinning.unwrap();
        let g = f.two_pinning(&pinning).unwrap();
        assert!(g.get(0b11) * g.get(0b00) < g.get(0b01) * g.get(0b10));
    }

    #[test]
    fn topkis_matches_lsm_on_permissive_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..300 {
            let k = rng.random_range(2..=5usize);
            let f = FunctionTable::non_negative(
                k,
                (0..1usize << k)
                    .map(|_| rng.random_range(0.05..3.0))
                    .collect(),
            )
            .unwrap();
            assert_eq!(
                topkis_equiv(&f, DEFAULT_TOL).unwrap(),
                is_lsm(&f, DEFAULT_TOL).holds
            );
        }
        assert!(topkis_equiv(&FunctionTable::equality(), DEFAULT_TOL).is_err());
    }

    #[test]
    fn alpha_monotone_examples() {
        // the two-parameter family: f(0,0)=1, f(0,1)=f(1,0)=2, f(1,1)=2a
        for alpha in [2.5, 3.0, 10.0] {
            let f = FunctionTable::non_negative(2, vec![1.0, 2.0, 2.0, 2.0 * alpha]).unwrap();
            assert!(is_alpha_monotone(&f, 2.0, DEFAULT_TOL).unwrap().holds);
        }
        // constant functions are alpha-monotone for every alpha
        let c = FunctionTable::all_ones(3).unwrap();
        assert!(is_alpha_monotone(&c, 100.0, DEFAULT_TOL).unwrap().holds);

        // [0,0,1] is block-2-monotone through its single-block collapse
        let f = sym(&[0.0, 0.0, 1.0]);
        assert!(is_block_alpha_monotone(&f, 2.0, DEFAULT_TOL).unwrap().holds);
        // ... while the plain variant sees the zero row
        assert!(is_alpha_monotone(&f, 2.0, DEFAULT_TOL).unwrap().holds);

        // witness carries the failing block
        let g = FunctionTable::non_negative(2, vec![1.0, 1.5, 1.5, 2.0]).unwrap();
        let report = is_alpha_monotone(&g, 2.0, DEFAULT_TOL).unwrap();
        assert!(!report.holds);
        assert!(report.witness.is_some());
    }

    #[test]
    fn monotone_limit_footnote_example() {
        let limit = sym(&[0.0, 0.0, 1.0]);
        for i in 1..=20 {
            let approx = sym(&[0.0, 0.5f64.powi(i), 1.0]);
            assert!(is_alpha_monotone(&approx, 2.0, DEFAULT_TOL).unwrap().holds);
            assert_eq!(approx.linf_distance(&limit).unwrap(), 0.5f64.powi(i));
        }
    }

    #[test]
    fn perturbation_stability() {
        // if dist(f, g) < eps and g is in the class, f violates the
        // class bounds by less than 2 eps
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        for _ in 0..100 {
            let k = rng.random_range(1..=4usize);
            let eps = 0.01;
            let g_raw = FunctionTable::non_negative(
                k,
                (0..1usize << k)
                    .map(|_| rng.random_range(0.0..2.0))
                    .collect(),
            )
            .unwrap();
            let g = g_raw.product(&g_raw.complement()).unwrap(); // self-dual
            let f = FunctionTable::non_negative(
                k,
                g.values()
                    .iter()
                    .map(|v| v + rng.random_range(0.0..eps * 0.49))
                    .collect(),
            )
            .unwrap();
            let mask = f.len() - 1;
            for idx in 0..f.len() {
                assert!((f.get(idx) - f.get(!idx & mask)).abs() < 2.0 * eps);
            }
            // spectrum bound for members of the positive class
            let p_member = FunctionTable::non_negative(
                k,
                transform(&g_raw).values().iter().map(|v| v.abs()).collect(),
            )
            .unwrap();
            let p_near = FunctionTable::non_negative(
                k,
                p_member
                    .values()
                    .iter()
                    .map(|v| (v + rng.random_range(-0.9 * eps..0.9 * eps)).max(0.0))
                    .collect(),
            )
            .unwrap();
            if is_p(&p_member, DEFAULT_TOL).unwrap().holds
                && p_member.linf_distance(&p_near).unwrap() < eps
            {
                let fh = transform(&p_near);
                assert!(fh.values().iter().all(|&v| v > -2.0 * eps));
            }
        }
    }

    #[test]
    fn class_closure_under_clone_operations() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for _ in 0..60 {
            let k = rng.random_range(1..=3usize);
            let make = |rng: &mut ChaCha8Rng| {
                let g = FunctionTable::non_negative(
                    k,
                    (0..1usize << k)
                        .map(|_| rng.random_range(0.0..2.0))
                        .collect(),
                )
                .unwrap();
                g.product(&g.complement()).unwrap()
            };
            let f = make(&mut rng);
            let g = make(&mut rng);
            assert!(is_sd(&f.product(&g).unwrap(), DEFAULT_TOL).holds);
            assert!(is_sd(&f.sum_out_last().unwrap(), 1e-9).holds);
            assert!(is_sd(&f.add_fictitious().unwrap(), DEFAULT_TOL).holds);
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            assert!(is_sd(&f.permute_args(&perm).unwrap(), DEFAULT_TOL).holds);

            // the positive-spectrum class under the same operations
            let p = {
                // squared tables against themselves: transform of
                // f * f is a convolution of a spectrum with itself at
                // lag zero... simplest: products of Ising edges
                let mut acc = FunctionTable::all_ones(k).unwrap();
                for _ in 0..2 {
                    let lambda = rng.random_range(0.0..1.0);
                    let edge = hising(2, lambda).unwrap();
                    let i = rng.random_range(0..k);
                    let mut j = rng.random_range(0..k);
                    if k == 1 {
                        continue;
                    }
                    while j == i {
                        j = rng.random_range(0..k);
                    }
                    acc = acc
                        .product(&crate::pps::atom_table(&edge, k, &[i, j]).unwrap())
                        .unwrap();
                }
                acc
            };
            if is_p(&p, DEFAULT_TOL).unwrap().holds {
                assert!(
                    is_p(&p.add_fictitious().unwrap(), DEFAULT_TOL)
                        .unwrap()
                        .holds
                );
                if p.arity() > 1 {
                    assert!(is_p(&p.sum_out_last().unwrap(), DEFAULT_TOL).unwrap().holds);
                }
                assert!(is_p(&p.product(&p).unwrap(), DEFAULT_TOL).unwrap().holds);
            }
        }
    }

    #[test]
    fn classify_report() {
        let report = classify(&sym(&[0.0, 1.0, 0.0]), 1.0, DEFAULT_TOL).unwrap();
        assert!(report.sd.holds && !report.p.holds && !report.pn.holds && !report.sdp);
        assert!(report.matchineq.is_none());

        let report = classify(&hising(4, 0.25).unwrap(), 1.0, DEFAULT_TOL).unwrap();
        assert!(report.sdp);
        let (holds, slack) = report.matchineq.unwrap();
        assert!(!holds && slack < 0.0);

        let report = classify(&FunctionTable::all_ones(2).unwrap(), 1.0, DEFAULT_TOL).unwrap();
        assert!(report.sd.holds && report.p.holds && report.pn.holds && report.sdp);
        assert!(report.lsm.holds && report.mon_alpha.holds && report.parity_condition.holds);

        let signed = FunctionTable::signed(1, vec![-1.0, 1.0]).unwrap();
        assert!(classify(&signed, 1.0, DEFAULT_TOL).is_err());
    }
}
