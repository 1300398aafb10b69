//! The acceptance suite: every constant and construction the crate
//! promises to reproduce, bundled as named checks with measured
//! values.  The CLI `verify-paper` subcommand and the `acceptance`
//! integration test both run these.

use crate::circuit::{
    even_to_ising, gadget_eq_match, gadget_even_ising, gadget_ising_half_match, gadget_product,
    gadget_sdp3, gadget_sym4, matchineq_check, Circuit, CircuitKind, Edge,
};
use crate::fourier::{convolve, hising_hat, inverse_transform, parity_hat, transform};
use crate::ising::{
    antiferro_to_ferro_series, chain_values, collapse2_factorize, dirichlet_const, force_odd,
    force_odd4_approx, force_odd_from_fo4, hising, parity_factor_product, parity_fn,
    parity_from_forceodd, sd_parity_decompose, stretch_plan_antiferro, stretch_plan_ferro,
    TernaryFactorization,
};
use crate::membership::{
    is_alpha_monotone, is_block_alpha_monotone, is_lsm, is_p, is_pn, is_sd, topkis_equiv,
};
use crate::pps::{PpsAtom, PpsFormula};
use crate::table::{bits_of, parse_template, FunctionTable};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

struct Checker {
    passed: bool,
    details: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker {
            passed: true,
            details: Vec::new(),
        }
    }

    fn assert(&mut self, label: &str, ok: bool) {
        if !ok {
            self.passed = false;
            self.details.push(format!("FAILED: {label}"));
        }
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let dev = (got - want).abs();
        if dev > tol {
            self.passed = false;
            self.details.push(format!(
                "FAILED: {label}: got {got}, want {want} (dev {dev})"
            ));
        }
    }

    fn tables_close(&mut self, label: &str, got: &FunctionTable, want: &FunctionTable, tol: f64) {
        match got.linf_distance(want) {
            Ok(d) if d <= tol => {}
            Ok(d) => {
                self.passed = false;
                self.details
                    .push(format!("FAILED: {label}: sup distance {d} > {tol}"));
            }
            Err(e) => {
                self.passed = false;
                self.details.push(format!("FAILED: {label}: {e}"));
            }
        }
    }

    fn note(&mut self, line: String) {
        self.details.push(line);
    }

    fn finish(self, id: &'static str, title: &'static str) -> CheckResult {
        CheckResult {
            id,
            title,
            passed: self.passed,
            details: self.details,
        }
    }
}

fn random_nonneg(rng: &mut ChaCha8Rng, k: usize, hi: f64) -> FunctionTable {
    FunctionTable::non_negative(
        k,
        (0..1usize << k)
            .map(|_| rng.random_range(0.0..hi))
            .collect(),
    )
    .expect("random entries are non-negative")
}

fn random_circuit(
    rng: &mut ChaCha8Rng,
    kind: CircuitKind,
    k: usize,
    internals: usize,
    extra: usize,
) -> Circuit {
    let n = internals.max(1);
    let externals: Vec<u32> = (0..k as u32).collect();
    let internal_ids: Vec<u32> = (k as u32..(k + n) as u32).collect();
    let mut edges = Vec::new();
    for &u in &externals {
        let target = internal_ids[rng.random_range(0..n)];
        edges.push(Edge::new(u, target, 1.0));
    }
    for _ in 0..extra {
        if n < 2 {
            break;
        }
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n);
        while b == a {
            b = rng.random_range(0..n);
        }
        let weight = match kind {
            CircuitKind::Match => rng.random_range(0.1..2.0),
            CircuitKind::Even => rng.random_range(0.05..=1.0),
        };
        edges.push(Edge::new(internal_ids[a], internal_ids[b], weight));
    }
    Circuit::new(kind, externals, internal_ids, edges).expect("generator respects the invariants")
}

fn check_transform_exact(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let sym = |w: &[f64]| FunctionTable::symmetric(w).expect("static table");

    let eq = FunctionTable::equality();
    c.tables_close(
        "transform(EQ) = EQ/2",
        &transform(&eq),
        &eq.scale(0.5).expect("positive scale"),
        tol,
    );
    c.tables_close(
        "[7,-1,-1,7] -> [1,0,2,0]",
        &transform(&sym(&[7.0, -1.0, -1.0, 7.0])),
        &sym(&[1.0, 0.0, 2.0, 0.0]),
        tol,
    );
    c.tables_close(
        "[13,4,1,4,13] -> [4,0,3/2,0,0]",
        &transform(&sym(&[13.0, 4.0, 1.0, 4.0, 13.0])),
        &sym(&[4.0, 0.0, 1.5, 0.0, 0.0]),
        tol,
    );
    c.tables_close(
        "[0,1,0] -> [1/2,0,-1/2]",
        &transform(&sym(&[0.0, 1.0, 0.0])),
        &sym(&[0.5, 0.0, -0.5]),
        tol,
    );
    c.tables_close(
        "[2,1,0] -> [1,1/2,0]",
        &transform(&sym(&[2.0, 1.0, 0.0])),
        &sym(&[1.0, 0.5, 0.0]),
        tol,
    );
    c.tables_close(
        "[0,1,2] -> [1,-1/2,0]",
        &transform(&sym(&[0.0, 1.0, 2.0])),
        &sym(&[1.0, -0.5, 0.0]),
        tol,
    );
    c.note("6 exact spectra checked".into());
    c.finish("transform-exact", "Transform exactness on quoted spectra")
}

fn check_closed_forms(_tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let sym = |w: &[f64]| FunctionTable::symmetric(w).expect("static table");
    c.tables_close(
        "hising_hat(4, 1/2)",
        &hising_hat(4, 0.5).expect("in range"),
        &sym(&[9.0 / 16.0, 0.0, 1.0 / 16.0, 0.0, 1.0 / 16.0]),
        1e-15,
    );
    c.tables_close(
        "hising_hat(4, 1/4)",
        &hising_hat(4, 0.25).expect("in range"),
        &sym(&[11.0 / 32.0, 0.0, 3.0 / 32.0, 0.0, 3.0 / 32.0]),
        1e-15,
    );
    let lambdas = [0.0, 0.25, 0.5, 1.0, 2.0, std::f64::consts::E];
    for k in 0..=8usize {
        for &lambda in &lambdas {
            c.tables_close(
                &format!("hising_hat({k}, {lambda}) vs generic transform"),
                &hising_hat(k, lambda).expect("in range"),
                &transform(&hising(k, lambda).expect("in range")),
                1e-12,
            );
            if k >= 1 {
                c.tables_close(
                    &format!("parity_hat({k}, {lambda}) vs generic transform"),
                    &parity_hat(k, lambda).expect("in range"),
                    &transform(&parity_fn(k, lambda).expect("in range")),
                    1e-12,
                );
            }
        }
    }
    c.note(format!(
        "closed forms checked for k <= 8, lambda in {lambdas:?}"
    ));
    c.finish("closed-forms", "Spectrum closed forms match the transform")
}

fn check_involution_convolution(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0301);
    let trials = 510usize;
    for trial in 0..trials {
        let k = trial % 9;
        let f = random_nonneg(&mut rng, k, 4.0);
        let twice = transform(&transform(&f));
        c.tables_close(
            &format!("T(T(f)) = 2^-k f (trial {trial})"),
            &twice,
            &f.scale(1.0 / (1 << k) as f64).expect("positive scale"),
            tol,
        );
        let g = random_nonneg(&mut rng, k, 4.0);
        let lhs = convolve(&transform(&f), &transform(&g)).expect("same arity");
        let rhs = transform(&f.product(&g).expect("same arity"));
        c.tables_close(
            &format!("transform(fg) = convolution (trial {trial})"),
            &lhs,
            &rhs,
            tol,
        );
    }
    c.note(format!("{trials} random tables, arities 0..=8"));
    c.finish(
        "involution-convolution",
        "Involution and convolution identities",
    )
}

fn check_circuit_gadgets(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let eq_gadget = gadget_eq_match();
    c.tables_close(
        "equality gadget implements EQ/2",
        &eq_gadget.implemented_function().expect("in caps"),
        &FunctionTable::equality().scale(0.5).expect("positive"),
        tol,
    );
    c.tables_close(
        "weighted path implements [3/4, 0, 1/4]",
        &gadget_ising_half_match()
            .implemented_function()
            .expect("in caps"),
        &FunctionTable::symmetric(&[0.75, 0.0, 0.25]).expect("static"),
        tol,
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x0401);
    let trials = 200usize;
    for trial in 0..trials {
        let kind = if trial % 2 == 0 {
            CircuitKind::Match
        } else {
            CircuitKind::Even
        };
        let k = 1 + trial % 3;
        let (nf, mf) = (rng.random_range(1..=3), rng.random_range(0..=2));
        let (ng, mg) = (rng.random_range(1..=3), rng.random_range(0..=2));
        let f = random_circuit(&mut rng, kind, k, nf, mf);
        let g = random_circuit(&mut rng, kind, k, ng, mg);
        let joined = gadget_product(&f, &g).expect("same kind and arity");
        let want = convolve(
            &f.implemented_function().expect("in caps"),
            &g.implemented_function().expect("in caps"),
        )
        .expect("same arity");
        c.tables_close(
            &format!("product gadget = convolution ({kind:?}, arity {k}, trial {trial})"),
            &joined.implemented_function().expect("in caps"),
            &want,
            tol.max(1e-9),
        );
    }
    c.note(format!("{trials} random product-gadget trials"));

    for lambda in [0.0, 0.25, 0.5, 0.9] {
        let (circuit, scale) = gadget_even_ising(lambda).expect("lambda in range");
        let realized = circuit
            .realized_pbf(tol)
            .expect("non-negative realization")
            .scale(scale)
            .expect("positive scale");
        c.tables_close(
            &format!("even Ising gadget, lambda = {lambda}"),
            &realized,
            &hising(2, lambda).expect("in range"),
            tol,
        );
    }
    c.finish(
        "circuit-gadgets",
        "Gadget circuits implement their functions",
    )
}

fn check_matchineq(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0501);
    let trials = 1000usize;
    for trial in 0..trials {
        let (n, m) = (rng.random_range(1..=12), rng.random_range(0..=10));
        let circuit = random_circuit(&mut rng, CircuitKind::Match, 4, n, m);
        let implemented = circuit.implemented_function().expect("in caps");
        let (holds, slack) = matchineq_check(&implemented, tol).expect("arity 4");
        c.assert(
            &format!("matching inequality on random circuit {trial} (slack {slack})"),
            holds,
        );
    }
    c.note(format!("{trials} random 4-terminal match-circuits"));

    let (holds, slack) =
        matchineq_check(&hising_hat(4, 0.5).expect("in range"), tol).expect("arity 4");
    c.assert("hising(4, 1/2) spectrum fails the inequality", !holds);
    c.close(
        "hising(4, 1/2) slack = -6/256",
        slack,
        3.0 / 256.0 - 9.0 / 256.0,
        1e-15,
    );
    let (holds, slack) =
        matchineq_check(&hising_hat(4, 0.25).expect("in range"), tol).expect("arity 4");
    c.assert(
        &format!("hising(4, 1/4) spectrum fails the inequality (slack {slack})"),
        !holds,
    );
    c.close(
        "hising(4, 1/4) slack",
        slack,
        3.0 * (3.0 / 32.0) * (3.0 / 32.0) - (11.0 / 32.0) * (3.0 / 32.0),
        1e-15,
    );
    c.finish("matchineq", "The four-terminal matching inequality")
}

fn check_collapse1(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0601);
    let trials = 200usize;
    for trial in 0..trials {
        // random ternary spectrum (a, b, c, d) with a >= b + c + d,
        // which inverse-transforms to a non-negative self-dual table
        let b = rng.random_range(0.0..1.0);
        let c_coef = rng.random_range(0.0..1.0);
        let d = rng.random_range(0.0..1.0);
        let a = b + c_coef + d + rng.random_range(0.001..1.0);
        let mut spectrum = vec![0.0; 8];
        spectrum[0b000] = a;
        spectrum[0b011] = b;
        spectrum[0b101] = c_coef;
        spectrum[0b110] = d;
        let spectrum = FunctionTable::signed(3, spectrum).expect("shape");
        let circuit = gadget_sdp3(a, b, c_coef, d).expect("a > 0");
        c.tables_close(
            &format!("ternary gadget realizes its spectrum (trial {trial})"),
            &circuit.implemented_function().expect("in caps"),
            &spectrum,
            tol,
        );
        let f = inverse_transform(&spectrum);
        c.tables_close(
            &format!("ternary gadget realizes the function (trial {trial})"),
            &circuit.realized_pbf(tol).expect("non-negative"),
            &f,
            tol,
        );
    }
    c.note(format!("{trials} random ternary gadget trials"));

    // the symmetric 4-ary converse
    let c1344 = gadget_sym4(4.0, 1.5, 0.0).expect("realizable");
    c.tables_close(
        "symmetric gadget realizes [13,4,1,4,13]",
        &c1344.realized_pbf(tol).expect("non-negative"),
        &FunctionTable::symmetric(&[13.0, 4.0, 1.0, 4.0, 13.0]).expect("static"),
        tol,
    );
    let sym4_trials = 100usize;
    for trial in 0..sym4_trials {
        let (c0, c2, c4) = if trial % 10 == 0 {
            // exact boundary 3 c2^2 = c0 c4 with dyadic entries
            (0.75, 0.5, 1.0)
        } else if trial % 7 == 0 {
            (rng.random_range(0.5..2.0), rng.random_range(0.1..1.0), 0.0)
        } else {
            let c0 = rng.random_range(0.5..2.0);
            let c2 = rng.random_range(0.1..1.0);
            let c4 = rng.random_range(0.0..0.95) * 3.0 * c2 * c2 / c0;
            (c0, c2, c4)
        };
        let circuit = gadget_sym4(c0, c2, c4).expect("inequality holds");
        let implemented = circuit.implemented_function().expect("in caps");
        let mut ok = true;
        for idx in 0..16usize {
            let want = match idx.count_ones() {
                0 => c0,
                2 => c2,
                4 => c4,
                _ => 0.0,
            };
            if (implemented.get(idx) - want).abs() > tol.max(1e-9) * want.max(1.0) {
                ok = false;
            }
        }
        c.assert(
            &format!("symmetric gadget trial {trial} ({c0}, {c2}, {c4})"),
            ok,
        );
    }
    c.note(format!("{sym4_trials} random symmetric gadget trials"));
    c.finish(
        "collapse1",
        "Constructive converses: ternary and symmetric gadgets",
    )
}

fn check_parity_condition(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0701);
    let trials = 200usize;
    let mut accepted = 0usize;
    for trial in 0..trials {
        let k = 1 + trial % 4;
        let (n, m) = (rng.random_range(1..=6), rng.random_range(0..=8));
        let circuit = random_circuit(&mut rng, CircuitKind::Match, k, n, m);
        let implemented = circuit.implemented_function().expect("in caps");
        let odd_zero = (0..implemented.len())
            .filter(|i| i.count_ones() % 2 == 1)
            .all(|i| implemented.get(i).abs() <= tol);
        let even_zero = (0..implemented.len())
            .filter(|i| i.count_ones() % 2 == 0)
            .all(|i| implemented.get(i).abs() <= tol);
        c.assert(
            &format!("parity condition on random match-circuit {trial}"),
            odd_zero || even_zero,
        );
        if let Ok(realized) = circuit.realized_pbf(tol) {
            accepted += 1;
            let sd = is_sd(&realized, tol).holds;
            let p = is_p(&realized, tol).expect("non-negative").holds;
            let pn = is_pn(&realized, tol).expect("non-negative").holds;
            c.assert(
                &format!("realized function of circuit {trial} in the triple intersection"),
                sd && p && pn,
            );
        }
    }
    c.note(format!(
        "{trials} random circuits, {accepted} with non-negative realizations"
    ));
    c.finish(
        "parity-condition",
        "Parity condition and containment in the triple intersection",
    )
}

fn check_ising_calculus(_tol: f64) -> CheckResult {
    let mut c = Checker::new();
    for i in 1..=9 {
        let lambda = i as f64 / 10.0;
        match antiferro_to_ferro_series(lambda, 1e-12) {
            Ok(lambda_p) => c.close(
                &format!("series identity at lambda = {lambda}"),
                2.0 * lambda_p / (1.0 + lambda_p * lambda_p),
                lambda,
                1e-12,
            ),
            Err(e) => c.assert(&format!("series at {lambda}: {e}"), false),
        }
    }

    for &y in &[0.25f64, 0.5, 2.0 / 3.0, 1.5, 4.0] {
        let (mut m, mut b) = (y.sqrt(), 1.0 / y.sqrt());
        for ell in 1..=40u32 {
            if ell > 1 {
                let next_m = y.sqrt() * m + b / y.sqrt();
                let next_b = m / y.sqrt() + y.sqrt() * b;
                (m, b) = (next_m, next_b);
            }
            let (mc, bc) = chain_values(y, ell).expect("valid parameters");
            c.assert(
                &format!("chain closed form m at y={y}, l={ell}"),
                (mc - m).abs() <= 1e-12 * m.abs(),
            );
            c.assert(
                &format!("chain closed form b at y={y}, l={ell}"),
                (bc - b).abs() <= 1e-12 * b.abs(),
            );
        }
    }

    for &eps in &[0.1, 0.01, 0.001] {
        match stretch_plan_antiferro(2.0, 5.0, eps) {
            Ok(plan) => {
                c.assert(
                    &format!(
                        "antiferro stretch eps {eps}: error {} (l = {}, t = {})",
                        plan.achieved_error, plan.chain_len, plan.strands
                    ),
                    plan.achieved_error > 0.0 && plan.achieved_error < eps,
                );
            }
            Err(e) => c.assert(&format!("antiferro stretch eps {eps}: {e}"), false),
        }
        match stretch_plan_ferro(0.5, 0.25, eps) {
            Ok(plan) => {
                c.assert(
                    &format!(
                        "ferro stretch eps {eps}: error {} (l = {}, t = {})",
                        plan.achieved_error, plan.chain_len, plan.strands
                    ),
                    plan.achieved_error > 0.0 && plan.achieved_error < eps,
                );
            }
            Err(e) => c.assert(&format!("ferro stretch eps {eps}: {e}"), false),
        }
    }

    match force_odd4_approx(0.01) {
        Ok(approx) => {
            c.close(
                "power construction base value at 0000",
                approx.raw.get(0),
                1023.0,
                1e-3 * 1023.0,
            );
            c.close(
                "power construction base value at 0001",
                approx.raw.get(1),
                1491.0,
                1e-3 * 1491.0,
            );
            c.assert(
                &format!(
                    "power construction converges at 0.01 (j = {}, error {})",
                    approx.exponent, approx.achieved_error
                ),
                approx.achieved_error < 0.01,
            );
        }
        Err(e) => c.assert(&format!("power construction: {e}"), false),
    }
    c.finish(
        "ising-calculus",
        "Series, chains, stretch plans, power construction",
    )
}

fn check_self_dual(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0901);
    let trials = 500usize;
    for trial in 0..trials {
        let k = trial % 5;
        let mut f = random_nonneg(&mut rng, k, 2.0);
        if trial % 2 == 0 {
            f = f.product(&f.complement()).expect("same arity");
        }
        let fh = transform(&f);
        let odd_vanishes = (0..f.len())
            .filter(|i| i.count_ones() % 2 == 1)
            .all(|i| fh.get(i).abs() <= tol);
        c.assert(
            &format!("odd-spectrum characterization, trial {trial}"),
            is_sd(&f, tol).holds == odd_vanishes,
        );
    }
    c.note(format!("{trials} oddSD equivalence trials"));

    let decomposition_trials = 100usize;
    for trial in 0..decomposition_trials {
        let k = 1 + trial % 4;
        let half = random_nonneg(&mut rng, k, 2.0);
        let shifted =
            FunctionTable::non_negative(k, half.values().iter().map(|v| v + 0.2).collect())
                .expect("positive");
        let f = shifted.product(&shifted.complement()).expect("same arity");
        match sd_parity_decompose(&f, tol) {
            Ok(factors) => {
                let rebuilt = parity_factor_product(k, &factors).expect("same arity");
                let ok = (0..f.len())
                    .all(|i| (rebuilt.get(i) - f.get(i)).abs() <= 1e-6 * f.get(i).abs());
                c.assert(&format!("parity decomposition trial {trial}"), ok);
            }
            Err(e) => c.assert(&format!("parity decomposition trial {trial}: {e}"), false),
        }
    }
    c.note(format!(
        "{decomposition_trials} decomposition trials (relative 1e-6)"
    ));

    for k in [2usize, 4, 6] {
        match force_odd_from_fo4(k) {
            Ok(formula) => c.tables_close(
                &format!("ForceOdd formula at arity {k}"),
                &formula.eval(),
                &force_odd(k).expect("in range"),
                1e-12,
            ),
            Err(e) => c.assert(&format!("ForceOdd formula {k}: {e}"), false),
        }
        for lambda in [0.5, 2.0] {
            match parity_from_forceodd(k, lambda) {
                Ok(formula) => c.tables_close(
                    &format!("parity formula at arity {k}, lambda {lambda}"),
                    &formula.eval(),
                    &parity_fn(k, lambda).expect("in range"),
                    1e-12,
                ),
                Err(e) => c.assert(&format!("parity formula {k}: {e}"), false),
            }
        }
    }

    for weights in [[2.0, 1.0, 0.0], [0.0, 1.0, 2.0]] {
        let f = FunctionTable::symmetric(&weights).expect("static");
        match crate::ising::delta_pin(&f, 12, tol) {
            Ok(seq) => {
                let target = FunctionTable::delta(seq.target_bit);
                let mut prev = f64::INFINITY;
                let mut monotone = true;
                for term in &seq.terms {
                    let dist = term.linf_distance(&target).expect("unary");
                    if dist > prev || (dist == prev && dist != 0.0) {
                        monotone = false;
                    }
                    prev = dist;
                }
                c.assert(
                    &format!("delta-pinning of {weights:?} converges monotonically"),
                    monotone && prev < 1e-3,
                );
            }
            Err(e) => c.assert(&format!("delta-pinning {weights:?}: {e}"), false),
        }
    }
    c.finish(
        "self-dual",
        "Self-dual theory: oddSD, decomposition, formulas, pinning",
    )
}

fn check_topkis(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    // exhaustive arity-3 permissive grid
    let grid = [0.5, 1.0, 1.5, 2.0, 3.0];
    let mut mismatches = 0usize;
    let mut total = 0usize;
    for code in 0..grid.len().pow(8) {
        let mut values = Vec::with_capacity(8);
        let mut rest = code;
        for _ in 0..8 {
            values.push(grid[rest % grid.len()]);
            rest /= grid.len();
        }
        let f = FunctionTable::non_negative(3, values).expect("positive entries");
        total += 1;
        if topkis_equiv(&f, tol).expect("permissive") != is_lsm(&f, tol).holds {
            mismatches += 1;
        }
    }
    c.assert(
        &format!("pinning criterion over the {total}-table arity-3 grid"),
        mismatches == 0,
    );
    c.note(format!("{total} grid tables checked"));

    let mut rng = ChaCha8Rng::seed_from_u64(0x0a01);
    let trials = 500usize;
    for trial in 0..trials {
        let k = 2 + trial % 4; // arities 2..=5
        let f = FunctionTable::non_negative(
            k,
            (0..1usize << k)
                .map(|_| rng.random_range(0.05..3.0))
                .collect(),
        )
        .expect("positive entries");
        c.assert(
            &format!("pinning criterion on random table {trial}"),
            topkis_equiv(&f, tol).expect("permissive") == is_lsm(&f, tol).holds,
        );
    }
    c.note(format!("{trials} random permissive tables, arity <= 5"));

    // the ternary counterexample: in the triple intersection, outside
    // the log-supermodular class via the (x, y, 1) pinning
    let f = FunctionTable::non_negative(3, vec![6.0, 4.0, 5.0, 5.0, 5.0, 5.0, 4.0, 6.0])
        .expect("positive entries");
    c.assert(
        "counterexample is in the triple intersection",
        crate::membership::is_sdp(&f, tol).expect("non-negative"),
    );
    c.assert(
        "counterexample fails log-supermodularity",
        !is_lsm(&f, tol).holds,
    );
    let g = f
        .two_pinning(&parse_template("xy1").expect("well-formed"))
        .expect("valid template");
    c.close(
        "pinned diagonal product",
        g.get(0b00) * g.get(0b11),
        24.0,
        1e-12,
    );
    c.close(
        "pinned off-diagonal product",
        g.get(0b01) * g.get(0b10),
        25.0,
        1e-12,
    );
    c.finish("topkis", "Pinning criterion and the ternary counterexample")
}

fn check_collapse2(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b01);
    let trials = 200usize;
    for trial in 0..trials {
        let l1 = rng.random_range(0.05..=1.0);
        let l2 = rng.random_range(0.05..=1.0);
        let l3 = rng.random_range(0.05..=1.0);
        let f = TernaryFactorization::Product {
            lambda_xy: l1,
            lambda_xz: l2,
            lambda_yz: l3,
        }
        .to_table()
        .expect("valid weights");
        match collapse2_factorize(&f, tol) {
            Ok(TernaryFactorization::Product {
                lambda_xy,
                lambda_xz,
                lambda_yz,
            }) => {
                let ok = (lambda_xy - l1).abs() <= tol
                    && (lambda_xz - l2).abs() <= tol
                    && (lambda_yz - l3).abs() <= tol;
                c.assert(&format!("round trip trial {trial}"), ok);
            }
            other => c.assert(&format!("round trip trial {trial}: got {other:?}"), false),
        }
    }
    c.note(format!("{trials} permissive round trips at 1e-9"));

    c.assert(
        "zero branch",
        matches!(
            collapse2_factorize(&FunctionTable::zeros(3).expect("shape"), tol),
            Ok(TernaryFactorization::Zero)
        ),
    );
    let chain = TernaryFactorization::DoubleEquality
        .to_table()
        .expect("static");
    c.assert(
        "equality-chain branch",
        matches!(
            collapse2_factorize(&chain, tol),
            Ok(TernaryFactorization::DoubleEquality)
        ),
    );
    let glued = TernaryFactorization::EqualityIsing {
        eq: (0, 1),
        ising: (1, 2),
        lambda: 0.75,
    }
    .to_table()
    .expect("valid");
    match collapse2_factorize(&glued, tol) {
        Ok(TernaryFactorization::EqualityIsing { lambda, .. }) => {
            c.close("equality-Ising branch weight", lambda, 0.75, 1e-12)
        }
        other => c.assert(&format!("equality-Ising branch: got {other:?}"), false),
    }
    c.finish(
        "collapse2",
        "Ternary factorization round trips and branches",
    )
}

fn check_even_to_ising(_tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c01);
    let trials = 100usize;
    for trial in 0..trials {
        let k = 1 + trial % 3;
        let (n, m) = (rng.random_range(1..=4), rng.random_range(0..=6));
        let circuit = random_circuit(&mut rng, CircuitKind::Even, k, n, m);
        // even_to_ising verifies the Gibbs equality on every
        // assignment at the stated tolerance before returning
        match even_to_ising(&circuit, 1e-8) {
            Ok(system) => {
                c.assert(
                    &format!("interaction weights in [0,1) (trial {trial})"),
                    system
                        .interactions
                        .iter()
                        .all(|(_, _, l)| (0.0..1.0).contains(l)),
                );
            }
            Err(e) => c.assert(&format!("Gibbs equality trial {trial}: {e}"), false),
        }
    }
    c.note(format!(
        "{trials} random even-circuits, k <= 3, <= 10 edges, tol 1e-8"
    ));
    c.finish("even-to-ising", "Even-circuit to Ising-system translation")
}

fn check_pps_xor(_tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let xor = FunctionTable::xor();
    let formula = PpsFormula::new(
        3,
        1,
        vec![
            PpsAtom {
                table: xor.clone(),
                args: vec![0, 3],
            },
            PpsAtom {
                table: xor.clone(),
                args: vec![1, 3],
            },
            PpsAtom {
                table: xor,
                args: vec![0, 2],
            },
        ],
    )
    .expect("well-formed");
    let h = formula.eval();
    for idx in 0..8usize {
        let want =
            if bits_of(idx, 3) == [true, true, false] || bits_of(idx, 3) == [false, false, true] {
                1.0
            } else {
                0.0
            };
        c.close(
            &format!("XOR formula value at index {idx}"),
            h.get(idx),
            want,
            0.0,
        );
    }
    c.finish("pps-xor", "The three-atom XOR formula")
}

fn check_dirichlet(_tol: f64) -> CheckResult {
    let mut c = Checker::new();
    for &z in &[1.0, -2.5, std::f64::consts::PI] {
        for &delta in &[1e-2, 1e-4] {
            match dirichlet_const(z, delta) {
                Ok(approx) => {
                    c.assert(
                        &format!(
                            "({}, {}) approximates {z} within {delta} (error {})",
                            approx.a, approx.b, approx.achieved_error
                        ),
                        approx.achieved_error < delta,
                    );
                }
                Err(e) => c.assert(&format!("dirichlet z={z}, delta={delta}: {e}"), false),
            }
        }
    }
    c.finish("dirichlet", "Integer approximation of constants")
}

fn random_two_monotone(rng: &mut ChaCha8Rng, k: usize, alpha: f64) -> FunctionTable {
    // Build layer by layer: each value at least alpha times every
    // predecessor, so every argument grows by alpha when flipped on.
    let mut values = vec![0.0; 1 << k];
    values[0] = rng.random_range(0.5..1.5);
    for idx in 1..1usize << k {
        let mut best: f64 = 0.0;
        for pos in 0..k {
            let bit = 1usize << (k - 1 - pos);
            if idx & bit != 0 {
                best = best.max(values[idx ^ bit]);
            }
        }
        values[idx] = best * rng.random_range(alpha..alpha + 2.0);
    }
    FunctionTable::non_negative(k, values).expect("positive entries")
}

fn check_monotone(tol: f64) -> CheckResult {
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f01);
    let trials = 200usize;
    let alpha = 2.0;
    for trial in 0..trials {
        let k = 1 + trial % 3;
        let f = random_two_monotone(&mut rng, k, alpha);
        let g = random_two_monotone(&mut rng, k, alpha);
        c.assert(
            &format!("generator produces 2-monotone tables (trial {trial})"),
            is_alpha_monotone(&f, alpha, tol).expect("alpha >= 0").holds,
        );
        let permuted = {
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            f.permute_args(&perm).expect("valid permutation")
        };
        let closed = [
            f.product(&g).expect("same arity"),
            f.add_fictitious().expect("within cap"),
            f.sum_out_last().expect("arity >= 1"),
            permuted,
        ];
        for (name, h) in ["product", "fictitious", "sum", "permute"]
            .iter()
            .zip(&closed)
        {
            c.assert(
                &format!("closure under {name} (trial {trial})"),
                is_block_alpha_monotone(h, alpha, tol)
                    .expect("alpha >= 0")
                    .holds,
            );
        }
    }
    c.note(format!("{trials} closure trials at alpha = 2"));

    let limit = FunctionTable::symmetric(&[0.0, 0.0, 1.0]).expect("static");
    c.assert(
        "[0,0,1] is block-2-monotone",
        is_block_alpha_monotone(&limit, alpha, tol)
            .expect("alpha >= 0")
            .holds,
    );
    for i in 1..=20 {
        let approx = FunctionTable::symmetric(&[0.0, 0.5f64.powi(i), 1.0]).expect("static");
        c.assert(
            &format!("[0, 2^-{i}, 1] is 2-monotone"),
            is_alpha_monotone(&approx, alpha, tol)
                .expect("alpha >= 0")
                .holds,
        );
        c.close(
            &format!("distance of [0, 2^-{i}, 1] from the limit"),
            approx.linf_distance(&limit).expect("same arity"),
            0.5f64.powi(i),
            0.0,
        );
    }
    c.finish("monotone", "Block-monotone closure and the limit example")
}

type CheckFn = fn(f64) -> CheckResult;

/// All checks in fixed order: `(id, title, runner)`.
pub fn checks() -> Vec<(&'static str, &'static str, CheckFn)> {
    vec![
        (
            "transform-exact",
            "Transform exactness on quoted spectra",
            check_transform_exact as CheckFn,
        ),
        (
            "closed-forms",
            "Spectrum closed forms match the transform",
            check_closed_forms,
        ),
        (
            "involution-convolution",
            "Involution and convolution identities",
            check_involution_convolution,
        ),
        (
            "circuit-gadgets",
            "Gadget circuits implement their functions",
            check_circuit_gadgets,
        ),
        (
            "matchineq",
            "The four-terminal matching inequality",
            check_matchineq,
        ),
        (
            "collapse1",
            "Constructive converses: ternary and symmetric gadgets",
            check_collapse1,
        ),
        (
            "parity-condition",
            "Parity condition and containment in the triple intersection",
            check_parity_condition,
        ),
        (
            "ising-calculus",
            "Series, chains, stretch plans, power construction",
            check_ising_calculus,
        ),
        (
            "self-dual",
            "Self-dual theory: oddSD, decomposition, formulas, pinning",
            check_self_dual,
        ),
        (
            "topkis",
            "Pinning criterion and the ternary counterexample",
            check_topkis,
        ),
        (
            "collapse2",
            "Ternary factorization round trips and branches",
            check_collapse2,
        ),
        (
            "even-to-ising",
            "Even-circuit to Ising-system translation",
            check_even_to_ising,
        ),
        ("pps-xor", "The three-atom XOR formula", check_pps_xor),
        (
            "dirichlet",
            "Integer approximation of constants",
            check_dirichlet,
        ),
        (
            "monotone",
            "Block-monotone closure and the limit example",
            check_monotone,
        ),
    ]
}

pub fn check_ids() -> Vec<&'static str> {
    checks().iter().map(|(id, _, _)| *id).collect()
}

/// Runs one check by id.
pub fn run_check(id: &str, tol: f64) -> Option<CheckResult> {
    checks()
        .into_iter()
        .find(|(cid, _, _)| *cid == id)
        .map(|(_, _, runner)| runner(tol))
}

/// Runs every check in order.
pub fn run_all(tol: f64) -> Vec<CheckResult> {
    checks()
        .into_iter()
        .map(|(_, _, runner)| runner(tol))
        .collect()
}
