//! JSON wire formats: functions, circuits, formulas, reports and
//! plans.  Input is parsed leniently (symmetric shorthand, named atom
//! families); output is emitted with every real printed to 17
//! significant digits so doubles round-trip bit-exactly.

use crate::circuit::{Circuit, CircuitKind, Edge, IsingSystem};
use crate::ising::{self, DirichletApprox, ForceOddApprox, StretchPlan};
use crate::membership::{Checked, MembershipReport};
use crate::pps::{PpsAtom, PpsFormula};
use crate::table::{FunctionTable, SymmetricSpec};
use crate::{Error, Result};
use serde::Deserialize;

/// 17 significant digits: enough to reconstruct any finite double.
pub fn fmt_real(x: f64) -> String {
    format!("{:.16e}", x)
}

fn fmt_real_array(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|v| fmt_real(*v)).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_bits(bits: &[bool]) -> String {
    let inner: Vec<&str> = bits.iter().map(|&b| if b { "1" } else { "0" }).collect();
    format!("[{}]", inner.join(", "))
}

#[derive(Deserialize)]
struct FunctionJson {
    arity: Option<usize>,
    values: Option<Vec<f64>>,
    signed: Option<bool>,
    symmetric: Option<Vec<f64>>,
}

fn schema<E: std::fmt::Display>(err: E) -> Error {
    Error::Json(err.to_string())
}

/// Accepts `{"arity": k, "values": [...], "signed": bool}` or the
/// shorthand `{"symmetric": [w_0, ..., w_k]}`.  A missing `signed`
/// flag is inferred from the entries.
pub fn table_from_json(text: &str) -> Result<FunctionTable> {
    let parsed: FunctionJson = serde_json::from_str(text).map_err(schema)?;
    if let Some(weights) = parsed.symmetric {
        if parsed.values.is_some() {
            return Err(Error::Json(
                "give either \"symmetric\" or \"values\", not both".into(),
            ));
        }
        let table = FunctionTable::from_symmetric(&SymmetricSpec::new(weights)?);
        return match parsed.signed {
            Some(true) => FunctionTable::signed(table.arity(), table.values().to_vec()),
            _ => Ok(table),
        };
    }
    let values = parsed
        .values
        .ok_or_else(|| Error::Json("missing \"values\" (or \"symmetric\")".into()))?;
    let arity = match parsed.arity {
        Some(k) => k,
        None => {
            let len = values.len();
            if !len.is_power_of_two() {
                return Err(Error::Json(format!("cannot infer arity from {len} values")));
            }
            len.trailing_zeros() as usize
        }
    };
    let signed = parsed
        .signed
        .unwrap_or_else(|| values.iter().any(|&v| v < 0.0));
    if signed {
        FunctionTable::signed(arity, values)
    } else {
        FunctionTable::non_negative(arity, values)
    }
}

pub fn table_to_json(f: &FunctionTable) -> String {
    format!(
        "{{\"arity\": {}, \"values\": {}, \"signed\": {}}}",
        f.arity(),
        fmt_real_array(f.values()),
        f.is_signed()
    )
}

#[derive(Deserialize)]
struct CircuitJson {
    kind: String,
    externals: Vec<u32>,
    internals: Vec<u32>,
    edges: Vec<(u32, u32, f64)>,
}

#[derive(Deserialize)]
struct WrappedCircuitJson {
    circuit: CircuitJson,
}

/// `{"kind": "match"|"even", "externals": [...], "internals": [...],
///   "edges": [[a, b, w], ...]}`; the gadget wrapper
/// `{"circuit": {...}, "scale": s}` is unwrapped transparently.
pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    let parsed: CircuitJson = match serde_json::from_str(text) {
        Ok(parsed) => parsed,
        Err(outer) => serde_json::from_str::<WrappedCircuitJson>(text)
            .map(|w| w.circuit)
            .map_err(|_| schema(outer))?,
    };
    let kind = match parsed.kind.as_str() {
        "match" => CircuitKind::Match,
        "even" => CircuitKind::Even,
        other => return Err(Error::Json(format!("unknown circuit kind {other:?}"))),
    };
    Circuit::new(
        kind,
        parsed.externals,
        parsed.internals,
        parsed
            .edges
            .into_iter()
            .map(|(a, b, w)| Edge::new(a, b, w))
            .collect(),
    )
}

pub fn circuit_to_json(c: &Circuit) -> String {
    let kind = match c.kind() {
        CircuitKind::Match => "match",
        CircuitKind::Even => "even",
    };
    let ids = |ids: &[u32]| {
        let inner: Vec<String> = ids.iter().map(|v| v.to_string()).collect();
        format!("[{}]", inner.join(", "))
    };
    let edges: Vec<String> = c
        .edges()
        .iter()
        .map(|e| format!("[{}, {}, {}]", e.a, e.b, fmt_real(e.weight)))
        .collect();
    format!(
        "{{\"kind\": \"{kind}\", \"externals\": {}, \"internals\": {}, \"edges\": [{}]}}",
        ids(c.externals()),
        ids(c.internals()),
        edges.join(", ")
    )
}

pub fn ising_system_to_json(s: &IsingSystem) -> String {
    let vars: Vec<String> = s.variables.iter().map(|v| v.to_string()).collect();
    let interactions: Vec<String> = s
        .interactions
        .iter()
        .map(|(a, b, l)| format!("[{}, {}, {}]", a, b, fmt_real(*l)))
        .collect();
    let tmap: Vec<String> = s.terminal_map.iter().map(|v| v.to_string()).collect();
    format!(
        "{{\"variables\": [{}], \"interactions\": [{}], \"terminal_map\": [{}], \
         \"constant\": {}}}",
        vars.join(", "),
        interactions.join(", "),
        tmap.join(", "),
        fmt_real(s.constant)
    )
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AtomFnJson {
    Named(String),
    Inline {
        arity: Option<usize>,
        values: Option<Vec<f64>>,
        signed: Option<bool>,
        symmetric: Option<Vec<f64>>,
    },
}

#[derive(Deserialize)]
struct AtomJson {
    #[serde(rename = "fn")]
    function: AtomFnJson,
    /// 1-based variable indices in `[1, free + bound]`.
    args: Vec<usize>,
}

#[derive(Deserialize)]
struct FormulaJson {
    free: usize,
    bound: usize,
    atoms: Vec<AtomJson>,
}

/// Named atom families: `"eq"`, `"hising:<k>:<lambda>"`,
/// `"parity:<k>:<lambda>"`, `"forceodd:<k>"`.
pub fn named_table(name: &str) -> Result<FunctionTable> {
    let parts: Vec<&str> = name.split(':').collect();
    let parse_k = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Json(format!("bad arity {s:?} in {name:?}")))
    };
    let parse_lambda = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Json(format!("bad weight {s:?} in {name:?}")))
    };
    match parts.as_slice() {
        ["eq"] => Ok(FunctionTable::equality()),
        ["hising", k, lambda] => ising::hising(parse_k(k)?, parse_lambda(lambda)?),
        ["parity", k, lambda] => ising::parity_fn(parse_k(k)?, parse_lambda(lambda)?),
        ["forceodd", k] => ising::force_odd(parse_k(k)?),
        _ => Err(Error::Json(format!("unknown function family {name:?}"))),
    }
}

/// `{"free": k, "bound": m, "atoms": [{"fn": <function JSON or family
/// name>, "args": [1-based indices]}]}`.
pub fn formula_from_json(text: &str) -> Result<PpsFormula> {
    let parsed: FormulaJson = serde_json::from_str(text).map_err(schema)?;
    let mut atoms = Vec::with_capacity(parsed.atoms.len());
    for atom in parsed.atoms {
        let table = match atom.function {
            AtomFnJson::Named(name) => named_table(&name)?,
            AtomFnJson::Inline {
                arity,
                values,
                signed,
                symmetric,
            } => {
                // round-trip through the function parser for uniform rules
                let mut obj = String::from("{");
                let mut first = true;
                let mut push = |s: String, first: &mut bool| {
                    if !*first {
                        obj.push_str(", ");
                    }
                    obj.push_str(&s);
                    *first = false;
                };
                if let Some(k) = arity {
                    push(format!("\"arity\": {k}"), &mut first);
                }
                if let Some(v) = values {
                    push(format!("\"values\": {}", fmt_real_array(&v)), &mut first);
                }
                if let Some(s) = signed {
                    push(format!("\"signed\": {s}"), &mut first);
                }
                if let Some(w) = symmetric {
                    push(format!("\"symmetric\": {}", fmt_real_array(&w)), &mut first);
                }
                obj.push('}');
                table_from_json(&obj)?
            }
        };
        let mut args = Vec::with_capacity(atom.args.len());
        for a in atom.args {
            if a == 0 {
                return Err(Error::Json("atom arguments are 1-based".into()));
            }
            args.push(a - 1);
        }
        atoms.push(PpsAtom { table, args });
    }
    PpsFormula::new(parsed.free, parsed.bound, atoms)
}

fn witness_entry<W>(name: &str, checked: &Checked<W>, render: impl Fn(&W) -> String) -> String {
    match &checked.witness {
        Some(w) if !checked.holds => format!("\"{name}\": {}", render(w)),
        _ => String::new(),
    }
}

pub fn report_to_json(report: &MembershipReport) -> String {
    let matchineq = match report.matchineq {
        Some((holds, _)) => holds.to_string(),
        None => "null".to_string(),
    };
    let verdicts = format!(
        "{{\"sd\": {}, \"p\": {}, \"pn\": {}, \"sdp\": {}, \"lsm\": {}, \"mon_alpha\": {}, \
         \"parity_condition\": {}, \"matchineq\": {}}}",
        report.sd.holds,
        report.p.holds,
        report.pn.holds,
        report.sdp,
        report.lsm.holds,
        report.mon_alpha.holds,
        report.parity_condition.holds,
        matchineq
    );
    let mut witnesses: Vec<String> = Vec::new();
    let push = |witnesses: &mut Vec<String>, s: String| {
        if !s.is_empty() {
            witnesses.push(s);
        }
    };
    push(
        &mut witnesses,
        witness_entry("sd", &report.sd, |x| format!("{{\"x\": {}}}", fmt_bits(x))),
    );
    push(
        &mut witnesses,
        witness_entry("p", &report.p, |w| {
            format!(
                "{{\"position\": {}, \"value\": {}}}",
                fmt_bits(&w.position),
                fmt_real(w.value)
            )
        }),
    );
    push(
        &mut witnesses,
        witness_entry("pn", &report.pn, |w| {
            format!(
                "{{\"position\": {}, \"value\": {}}}",
                fmt_bits(&w.position),
                fmt_real(w.value)
            )
        }),
    );
    push(
        &mut witnesses,
        witness_entry("lsm", &report.lsm, |w| {
            let pinning = match &w.pinning {
                Some(slots) => {
                    let s: String = slots
                        .iter()
                        .map(|slot| match slot {
                            crate::table::PinSlot::Zero => '0',
                            crate::table::PinSlot::One => '1',
                            crate::table::PinSlot::X => 'x',
                            crate::table::PinSlot::Y => 'y',
                        })
                        .collect();
                    format!("\"{s}\"")
                }
                None => "null".to_string(),
            };
            format!(
                "{{\"x\": {}, \"y\": {}, \"lhs\": {}, \"rhs\": {}, \"pinning\": {}}}",
                fmt_bits(&w.x),
                fmt_bits(&w.y),
                fmt_real(w.lhs),
                fmt_real(w.rhs),
                pinning
            )
        }),
    );
    push(
        &mut witnesses,
        witness_entry("mon_alpha", &report.mon_alpha, |w| {
            let block: Vec<String> = w.block.iter().map(|b| b.to_string()).collect();
            format!(
                "{{\"block\": [{}], \"assignment\": {}, \"required\": {}, \"found\": {}}}",
                block.join(", "),
                fmt_bits(&w.assignment),
                fmt_real(w.required),
                fmt_real(w.found)
            )
        }),
    );
    push(
        &mut witnesses,
        witness_entry("parity_condition", &report.parity_condition, |w| {
            format!(
                "{{\"odd_position\": {}, \"even_position\": {}}}",
                fmt_bits(&w.odd_position),
                fmt_bits(&w.even_position)
            )
        }),
    );
    if let Some((false, slack)) = report.matchineq {
        witnesses.push(format!("\"matchineq\": {{\"slack\": {}}}", fmt_real(slack)));
    }
    format!(
        "{{\"arity\": {}, \"alpha\": {}, \"verdicts\": {}, \"witnesses\": {{{}}}}}",
        report.arity,
        fmt_real(report.alpha),
        verdicts,
        witnesses.join(", ")
    )
}

pub fn stretch_plan_to_json(plan: &StretchPlan) -> String {
    let variant = if plan.antiferro {
        "antiferro-stretch"
    } else {
        "ferro-stretch"
    };
    format!(
        "{{\"variant\": \"{variant}\", \"chain_len\": {}, \"strands\": {}, \"log_scale\": {}, \
         \"scale\": {}, \"achieved_error\": {}, \"realized\": {}}}",
        plan.chain_len,
        plan.strands,
        fmt_real(plan.log_scale),
        fmt_real(plan.scale()),
        fmt_real(plan.achieved_error),
        fmt_real_array(plan.realized.values())
    )
}

pub fn dirichlet_to_json(approx: &DirichletApprox) -> String {
    format!(
        "{{\"variant\": \"constant-dirichlet\", \"a\": {}, \"b\": {}, \"achieved_error\": {}}}",
        approx.a,
        approx.b,
        fmt_real(approx.achieved_error)
    )
}

pub fn force_odd_approx_to_json(approx: &ForceOddApprox) -> String {
    format!(
        "{{\"variant\": \"force-odd-power\", \"exponent\": {}, \"achieved_error\": {}, \
         \"table\": {}}}",
        approx.exponent,
        fmt_real(approx.achieved_error),
        fmt_real_array(approx.power.values())
    )
}

pub fn gadget_to_json(c: &Circuit, scale: f64) -> String {
    format!(
        "{{\"circuit\": {}, \"scale\": {}}}",
        circuit_to_json(c),
        fmt_real(scale)
    )
}

pub fn values_to_json(values: &[f64]) -> String {
    fmt_real_array(values)
}
