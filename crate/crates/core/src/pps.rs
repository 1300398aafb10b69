//! Product-summation formulas: a sum over bound Boolean variables of a
//! product of atoms, each atom a function table applied to a tuple of
//! variables.  Evaluation is direct nested enumeration, which keeps
//! the semantics trivially checkable.

use crate::table::{FunctionTable, Signedness};
use crate::{Error, Result, MAX_ARITY};

/// Hard cap on free + bound variables for evaluation (2^16 assignments).
pub const MAX_VARIABLES: usize = 16;

/// One atom: a table applied to variable indices.  Indices are
/// 0-based over the combined variable space; `0..free` are free and
/// `free..free+bound` are bound.  Repeated variables are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PpsAtom {
    pub table: FunctionTable,
    pub args: Vec<usize>,
}

/// A primitive product-summation formula.
#[derive(Debug, Clone, PartialEq)]
pub struct PpsFormula {
    free: usize,
    bound: usize,
    atoms: Vec<PpsAtom>,
}

impl PpsFormula {
    pub fn new(free: usize, bound: usize, atoms: Vec<PpsAtom>) -> Result<Self> {
        if free > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity: free,
                max: MAX_ARITY,
            });
        }
        if free + bound > MAX_VARIABLES {
            return Err(Error::Precondition(format!(
                "{} variables exceed the evaluation cap of {MAX_VARIABLES}",
                free + bound
            )));
        }
        for atom in &atoms {
            if atom.table.is_signed() {
                return Err(Error::SignedInput);
            }
            if atom.args.len() != atom.table.arity() {
                return Err(Error::ArityMismatch {
                    expected: atom.table.arity(),
                    got: atom.args.len(),
                });
            }
            if let Some(&bad) = atom.args.iter().find(|&&v| v >= free + bound) {
                return Err(Error::Precondition(format!(
                    "atom argument {bad} out of range for {} variables",
                    free + bound
                )));
            }
        }
        Ok(PpsFormula { free, bound, atoms })
    }

    pub fn free_arity(&self) -> usize {
        self.free
    }

    pub fn bound_count(&self) -> usize {
        self.bound
    }

    pub fn atoms(&self) -> &[PpsAtom] {
        &self.atoms
    }

    /// For each free assignment, sums the atom product over all
    /// assignments of the bound variables.  The empty product is 1.
    pub fn eval(&self) -> FunctionTable {
        let total = self.free + self.bound;
        let mut values = vec![0.0; 1 << self.free];
        let mut bits = vec![false; total];
        for (free_idx, slot) in values.iter_mut().enumerate() {
            for (pos, bit) in bits[..self.free].iter_mut().enumerate() {
                *bit = (free_idx >> (self.free - 1 - pos)) & 1 == 1;
            }
            let mut total_sum = 0.0;
            for bound_idx in 0..1usize << self.bound {
                for pos in 0..self.bound {
                    bits[self.free + pos] = (bound_idx >> (self.bound - 1 - pos)) & 1 == 1;
                }
                let mut prod = 1.0;
                for atom in &self.atoms {
                    let mut idx = 0usize;
                    for &v in &atom.args {
                        idx = (idx << 1) | usize::from(bits[v]);
                    }
                    prod *= atom.table.get(idx);
                    if prod == 0.0 {
                        break;
                    }
                }
                total_sum += prod;
            }
            *slot = total_sum;
        }
        FunctionTable::with_signedness(self.free, values, Signedness::NonNegative)
            .expect("products and sums of non-negative atoms are non-negative")
    }
}

/// One step of a clone-closure witness, interpreted by a stack
/// machine: `Atom` pushes a single-atom formula over `arity` free
/// variables, `Product` multiplies the two top formulas, and `SumOut`
/// turns the last free variable of the top formula into a bound one.
#[derive(Debug, Clone)]
pub enum CloneStep {
    Atom {
        table: FunctionTable,
        arity: usize,
        args: Vec<usize>,
    },
    Product,
    SumOut,
}

/// Folds a step sequence into a single normalized formula (all
/// summations outermost, products inside).  The result evaluates to
/// exactly the table computed by applying the steps to tables.
pub fn compose_clone_witness(steps: &[CloneStep]) -> Result<PpsFormula> {
    let mut stack: Vec<PpsFormula> = Vec::new();
    for (i, step) in steps.iter().enumerate() {
        match step {
            CloneStep::Atom { table, arity, args } => {
                if args.iter().any(|&v| v >= *arity) {
                    return Err(Error::MalformedWitness(format!(
                        "step {i}: atom argument out of range"
                    )));
                }
                stack.push(PpsFormula::new(
                    *arity,
                    0,
                    vec![PpsAtom {
                        table: table.clone(),
                        args: args.clone(),
                    }],
                )?);
            }
            CloneStep::Product => {
                let rhs = stack
                    .pop()
                    .ok_or_else(|| Error::MalformedWitness(format!("step {i}: empty stack")))?;
                let lhs = stack
                    .pop()
                    .ok_or_else(|| Error::MalformedWitness(format!("step {i}: empty stack")))?;
                if lhs.free != rhs.free {
                    return Err(Error::MalformedWitness(format!(
                        "step {i}: product of formulas with free arities {} and {}",
                        lhs.free, rhs.free
                    )));
                }
                let free = lhs.free;
                let mut atoms = Vec::with_capacity(lhs.atoms.len() + rhs.atoms.len());
                // Keep lhs bound variables in place; shift rhs bound
                // variables past them.
                atoms.extend(lhs.atoms.iter().cloned());
                for atom in &rhs.atoms {
                    let args = atom
                        .args
                        .iter()
                        .map(|&v| if v < free { v } else { v + lhs.bound })
                        .collect();
                    atoms.push(PpsAtom {
                        table: atom.table.clone(),
                        args,
                    });
                }
                stack.push(PpsFormula::new(free, lhs.bound + rhs.bound, atoms)?);
            }
            CloneStep::SumOut => {
                let f = stack
                    .pop()
                    .ok_or_else(|| Error::MalformedWitness(format!("step {i}: empty stack")))?;
                if f.free == 0 {
                    return Err(Error::MalformedWitness(format!(
                        "step {i}: cannot sum out a nullary formula"
                    )));
                }
                // Variable free-1 becomes the first bound variable;
                // numerically every index stays put.
                stack.push(PpsFormula::new(f.free - 1, f.bound + 1, f.atoms)?);
            }
        }
    }
    match stack.len() {
        1 => Ok(stack.pop().expect("just checked")),
        n => Err(Error::MalformedWitness(format!(
            "sequence leaves {n} formulas on the stack"
        ))),
    }
}

/// Table semantics of a single `Atom` step: `g(x) = table(x[args])`.
pub fn atom_table(table: &FunctionTable, arity: usize, args: &[usize]) -> Result<FunctionTable> {
    PpsFormula::new(
        arity,
        0,
        vec![PpsAtom {
            table: table.clone(),
            args: args.to_vec(),
        }],
    )
    .map(|f| f.eval())
}
