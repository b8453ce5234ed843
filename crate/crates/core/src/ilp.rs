//! Integer programs over finite variable boxes.
//!
//! The solver is a depth-first branch and bound. Every node first tightens
//! variable bounds by interval propagation over the constraints (and over
//! the objective cut once an incumbent exists), then branches on the
//! unfixed variable with the smallest domain, trying its lower bound first.

use std::collections::VecDeque;
use std::fmt::{Debug, Display};

use num_traits::{CheckedNeg, PrimInt, Signed};

use crate::error::{Error, Result};

/// Integer scalar usable by the solver.
pub trait Scalar: PrimInt + Signed + CheckedNeg + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: PrimInt + Signed + CheckedNeg + Debug + Display + Send + Sync + 'static {}

pub type VarId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint<T> {
    pub terms: Vec<(VarId, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable<T> {
    pub name: String,
    pub lower: T,
    pub upper: T,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IlpModel<T> {
    vars: Vec<Variable<T>>,
    constraints: Vec<Constraint<T>>,
    objective: Option<Vec<(VarId, T)>>,
}

impl<T: Scalar> IlpModel<T> {
    pub fn new() -> Self {
        Self { vars: Vec::new(), constraints: Vec::new(), objective: None }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: T, upper: T) -> VarId {
        self.vars.push(Variable { name: name.into(), lower, upper });
        self.vars.len() - 1
    }

    pub fn add_constraint(&mut self, terms: Vec<(VarId, T)>, relation: Relation, rhs: T) -> Result<()> {
        if let Some(&(v, _)) = terms.iter().find(|(v, _)| *v >= self.vars.len()) {
            return Err(Error::invalid(format!("constraint references unknown variable {v}")));
        }
        self.constraints.push(Constraint { terms, relation, rhs });
        Ok(())
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, T)>) -> Result<()> {
        if let Some(&(v, _)) = terms.iter().find(|(v, _)| *v >= self.vars.len()) {
            return Err(Error::invalid(format!("objective references unknown variable {v}")));
        }
        self.objective = Some(terms);
        Ok(())
    }

    pub fn vars(&self) -> &[Variable<T>] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn objective(&self) -> Option<&[(VarId, T)]> {
        self.objective.as_deref()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Independent re-check of an assignment against bounds and constraints.
    pub fn is_satisfied_by(&self, x: &[T]) -> bool {
        if x.len() != self.vars.len() {
            return false;
        }
        let in_box = self.vars.iter().zip(x).all(|(v, &xi)| v.lower <= xi && xi <= v.upper);
        in_box
            && self.constraints.iter().all(|c| match linear(&c.terms, x) {
                Some(lhs) => match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                },
                None => false,
            })
    }

    pub fn objective_value(&self, x: &[T]) -> Option<T> {
        match &self.objective {
            Some(terms) => linear(terms, x),
            None => Some(T::zero()),
        }
    }

    /// Number of points in the variable box, saturating at `u128::MAX`.
    pub fn box_size(&self) -> u128 {
        self.vars.iter().fold(1u128, |acc, v| {
            let width = if v.upper < v.lower {
                0
            } else {
                (v.upper - v.lower).to_u128().unwrap_or(u128::MAX).saturating_add(1)
            };
            acc.saturating_mul(width)
        })
    }
}

fn linear<T: Scalar>(terms: &[(VarId, T)], x: &[T]) -> Option<T> {
    terms
        .iter()
        .try_fold(T::zero(), |acc, &(v, a)| acc.checked_add(&a.checked_mul(&x[v])?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IlpOutcome<T> {
    Infeasible,
    Feasible(Vec<T>),
    Optimal { assignment: Vec<T>, value: T },
}

impl<T: Clone> IlpOutcome<T> {
    pub fn assignment(&self) -> Option<&[T]> {
        match self {
            IlpOutcome::Infeasible => None,
            IlpOutcome::Feasible(x) | IlpOutcome::Optimal { assignment: x, .. } => Some(x),
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, IlpOutcome::Infeasible)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IlpSolver {
    pub node_budget: Option<u64>,
    /// Propagation passes per node before giving up on reaching a fixpoint.
    pub max_propagation_rounds: usize,
}

impl Default for IlpSolver {
    fn default() -> Self {
        Self { node_budget: Some(5_000_000), max_propagation_rounds: 10_000 }
    }
}

pub fn solve_ilp<T: Scalar>(m: &IlpModel<T>) -> Result<IlpOutcome<T>> {
    IlpSolver::default().solve(m)
}

fn div_floor<T: Scalar>(a: T, b: T) -> T {
    let q = a / b;
    if a % b != T::zero() && ((a < T::zero()) != (b < T::zero())) {
        q - T::one()
    } else {
        q
    }
}

fn div_ceil<T: Scalar>(a: T, b: T) -> T {
    let q = a / b;
    if a % b != T::zero() && ((a < T::zero()) == (b < T::zero())) {
        q + T::one()
    } else {
        q
    }
}

/// A constraint in `sum <= rhs` form.
struct Row<T> {
    terms: Vec<(VarId, T)>,
    rhs: T,
}

struct Search<'a, T> {
    rows: Vec<Row<T>>,
    watch: Vec<Vec<usize>>,
    objective: Option<&'a [(VarId, T)]>,
    incumbent: Option<(Vec<T>, T)>,
    nodes: u64,
    budget: Option<u64>,
    max_rounds: usize,
}

enum Prop {
    Ok,
    Empty,
}

impl<T: Scalar> Search<'_, T> {
    fn min_term(a: T, lo: T, hi: T) -> Result<T> {
        let x = if a > T::zero() { lo } else { hi };
        a.checked_mul(&x).ok_or(Error::Overflow("ilp propagation"))
    }

    /// Tightens `lo`/`hi` against one `<=` row. Returns the list of
    /// variables whose bounds moved, or `None` when the row is violated.
    fn tighten(row: &Row<T>, lo: &mut [T], hi: &mut [T], moved: &mut Vec<VarId>) -> Result<bool> {
        let mut min_act = T::zero();
        for &(v, a) in &row.terms {
            let t = Self::min_term(a, lo[v], hi[v])?;
            min_act = min_act.checked_add(&t).ok_or(Error::Overflow("ilp propagation"))?;
        }
        if min_act > row.rhs {
            return Ok(false);
        }
        for &(v, a) in &row.terms {
            if a == T::zero() {
                continue;
            }
            let own = Self::min_term(a, lo[v], hi[v])?;
            // a * x_v <= rhs - (min_act - own)
            let slack = row
                .rhs
                .checked_sub(&(min_act - own))
                .ok_or(Error::Overflow("ilp propagation"))?;
            if a > T::zero() {
                let bound = div_floor(slack, a);
                if bound < hi[v] {
                    hi[v] = bound;
                    moved.push(v);
                }
            } else {
                let bound = div_ceil(slack, a);
                if bound > lo[v] {
                    lo[v] = bound;
                    moved.push(v);
                }
            }
            if lo[v] > hi[v] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn objective_row(&self) -> Option<Row<T>> {
        let (_, best) = self.incumbent.as_ref()?;
        let terms = self.objective?.to_vec();
        Some(Row { terms, rhs: *best - T::one() })
    }

    fn propagate(&self, lo: &mut [T], hi: &mut [T]) -> Result<Prop> {
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Ok(Prop::Empty);
        }
        let obj = self.objective_row();
        let mut queue: VecDeque<usize> = (0..self.rows.len()).collect();
        let mut queued = vec![true; self.rows.len()];
        let mut moved = Vec::new();
        let mut rounds = 0usize;
        loop {
            if let Some(row) = &obj {
                moved.clear();
                if !Self::tighten(row, lo, hi, &mut moved)? {
                    return Ok(Prop::Empty);
                }
                for &v in &moved {
                    for &r in &self.watch[v] {
                        if !queued[r] {
                            queued[r] = true;
                            queue.push_back(r);
                        }
                    }
                }
            }
            if queue.is_empty() {
                return Ok(Prop::Ok);
            }
            let budget = self.rows.len().max(1);
            let mut processed = 0;
            while let Some(r) = queue.pop_front() {
                queued[r] = false;
                moved.clear();
                if !Self::tighten(&self.rows[r], lo, hi, &mut moved)? {
                    return Ok(Prop::Empty);
                }
                for &v in &moved {
                    for &r2 in &self.watch[v] {
                        if !queued[r2] {
                            queued[r2] = true;
                            queue.push_back(r2);
                        }
                    }
                }
                processed += 1;
                if processed >= budget {
                    break;
                }
            }
            rounds += 1;
            if rounds >= self.max_rounds {
                return Ok(Prop::Ok);
            }
        }
    }

    fn objective_lower_bound(&self, lo: &[T], hi: &[T]) -> Result<T> {
        let mut total = T::zero();
        if let Some(obj) = self.objective {
            for &(v, c) in obj {
                let t = Self::min_term(c, lo[v], hi[v])?;
                total = total.checked_add(&t).ok_or(Error::Overflow("ilp objective"))?;
            }
        }
        Ok(total)
    }

    fn dfs(&mut self, mut lo: Vec<T>, mut hi: Vec<T>) -> Result<bool> {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                return Err(Error::resource(format!("ILP node budget of {b} exhausted")));
            }
        }
        if let Prop::Empty = self.propagate(&mut lo, &mut hi)? {
            return Ok(false);
        }
        if let Some((_, best)) = &self.incumbent {
            if self.objective_lower_bound(&lo, &hi)? >= *best {
                return Ok(false);
            }
        }
        let pick = (0..lo.len())
            .filter(|&v| lo[v] < hi[v])
            .min_by_key(|&v| (hi[v] - lo[v], v));
        let Some(v) = pick else {
            // Every variable fixed and propagation found no violation, but
            // propagation may have stopped early, so re-check explicitly.
            if !self.rows.iter().all(|row| {
                linear(&row.terms, &lo).is_some_and(|lhs| lhs <= row.rhs)
            }) {
                return Ok(false);
            }
            let value = match self.objective {
                Some(obj) => linear(obj, &lo).ok_or(Error::Overflow("ilp objective"))?,
                None => T::zero(),
            };
            self.incumbent = Some((lo, value));
            return Ok(true);
        };
        let mut found = false;
        let (mut lo_a, mut hi_a) = (lo.clone(), hi.clone());
        hi_a[v] = lo[v];
        lo_a[v] = lo[v];
        if self.dfs(lo_a, hi_a)? {
            found = true;
            if self.objective.is_none() {
                return Ok(true);
            }
        }
        lo[v] = lo[v] + T::one();
        if self.dfs(lo, hi)? {
            found = true;
        }
        Ok(found)
    }
}

impl IlpSolver {
    pub fn with_node_budget(budget: Option<u64>) -> Self {
        Self { node_budget: budget, ..Self::default() }
    }

    pub fn solve<T: Scalar>(&self, m: &IlpModel<T>) -> Result<IlpOutcome<T>> {
        let mut rows = Vec::new();
        for c in &m.constraints {
            let negated = || -> Result<Row<T>> {
                let terms = c
                    .terms
                    .iter()
                    .map(|&(v, a)| a.checked_neg().map(|na| (v, na)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or(Error::Overflow("ilp model"))?;
                let rhs = c.rhs.checked_neg().ok_or(Error::Overflow("ilp model"))?;
                Ok(Row { terms, rhs })
            };
            match c.relation {
                Relation::Le => rows.push(Row { terms: c.terms.clone(), rhs: c.rhs }),
                Relation::Ge => rows.push(negated()?),
                Relation::Eq => {
                    rows.push(Row { terms: c.terms.clone(), rhs: c.rhs });
                    rows.push(negated()?);
                }
            }
        }
        let mut watch = vec![Vec::new(); m.vars.len()];
        for (r, row) in rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                if watch[v].last() != Some(&r) {
                    watch[v].push(r);
                }
            }
        }
        let mut search = Search {
            rows,
            watch,
            objective: m.objective.as_deref(),
            incumbent: None,
            nodes: 0,
            budget: self.node_budget,
            max_rounds: self.max_propagation_rounds,
        };
        let lo: Vec<T> = m.vars.iter().map(|v| v.lower).collect();
        let hi: Vec<T> = m.vars.iter().map(|v| v.upper).collect();
        search.dfs(lo, hi)?;
        Ok(match (search.incumbent, m.objective.is_some()) {
            (None, _) => IlpOutcome::Infeasible,
            (Some((x, _)), false) => IlpOutcome::Feasible(x),
            (Some((x, value)), true) => IlpOutcome::Optimal { assignment: x, value },
        })
    }
}

/// Reference answer by enumerating every point of the box. Only meant for
/// small models; fails when the box has more than `cap` points.
pub fn solve_exhaustive<T: Scalar>(m: &IlpModel<T>, cap: u128) -> Result<IlpOutcome<T>> {
    if m.box_size() > cap {
        return Err(Error::resource(format!("box has more than {cap} points")));
    }
    let n = m.vars.len();
    if m.vars.iter().any(|v| v.lower > v.upper) {
        return Ok(IlpOutcome::Infeasible);
    }
    let mut x: Vec<T> = m.vars.iter().map(|v| v.lower).collect();
    let mut best: Option<(Vec<T>, T)> = None;
    loop {
        if m.is_satisfied_by(&x) {
            let val = m.objective_value(&x).ok_or(Error::Overflow("ilp objective"))?;
            if best.as_ref().is_none_or(|(_, b)| val < *b) {
                best = Some((x.clone(), val));
            }
            if m.objective.is_none() {
                break;
            }
        }
        let mut i = 0;
        while i < n {
            if x[i] < m.vars[i].upper {
                x[i] = x[i] + T::one();
                break;
            }
            x[i] = m.vars[i].lower;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(match (best, m.objective.is_some()) {
        (None, _) => IlpOutcome::Infeasible,
        (Some((x, _)), false) => IlpOutcome::Feasible(x),
        (Some((x, value)), true) => IlpOutcome::Optimal { assignment: x, value },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_value() {
        let mut m = IlpModel::<i64>::new();
        let x = m.add_var("x", 0, 5);
        m.add_constraint(vec![(x, 1)], Relation::Eq, 3).unwrap();
        assert_eq!(solve_ilp(&m).unwrap(), IlpOutcome::Feasible(vec![3]));
    }

    #[test]
    fn bound_arithmetic_infeasible() {
        let mut m = IlpModel::<i64>::new();
        let x = m.add_var("x", 0, 2);
        let y = m.add_var("y", 0, 2);
        m.add_constraint(vec![(x, 1), (y, 1)], Relation::Eq, 5).unwrap();
        assert_eq!(solve_ilp(&m).unwrap(), IlpOutcome::Infeasible);
    }

    /// Optimum 3 at (0,3): enumerating all 16 points of the box gives
    /// objective values 2x+y over x+y>=3, smallest being 0*2+3.
    #[test]
    fn small_minimisation() {
        let mut m = IlpModel::<i64>::new();
        let x = m.add_var("x", 0, 3);
        let y = m.add_var("y", 0, 3);
        m.add_constraint(vec![(x, 1), (y, 1)], Relation::Ge, 3).unwrap();
        m.set_objective(vec![(x, 2), (y, 1)]).unwrap();
        let expect = IlpOutcome::Optimal { assignment: vec![0, 3], value: 3 };
        assert_eq!(solve_ilp(&m).unwrap(), expect);
        assert_eq!(solve_exhaustive(&m, 100).unwrap(), expect);
    }

    #[test]
    fn budget_is_reported() {
        let mut m = IlpModel::<i64>::new();
        let vars: Vec<_> = (0..12).map(|i| m.add_var(format!("x{i}"), 0, 1)).collect();
        // Parity constraint that propagation cannot decide: 2*sum = 13.
        m.add_constraint(vars.iter().map(|&v| (v, 2)).collect(), Relation::Eq, 13).unwrap();
        let solver = IlpSolver::with_node_budget(Some(10));
        assert!(solver.solve(&m).unwrap_err().is_resource());
        assert_eq!(IlpSolver::with_node_budget(None).solve(&m).unwrap(), IlpOutcome::Infeasible);
    }

    #[test]
    fn generic_over_width() {
        let mut m = IlpModel::<i32>::new();
        let x = m.add_var("x", -4, 4);
        m.add_constraint(vec![(x, 3)], Relation::Le, -5).unwrap();
        m.set_objective(vec![(x, -1)]).unwrap();
        assert_eq!(
            solve_ilp(&m).unwrap(),
            IlpOutcome::Optimal { assignment: vec![-2], value: 2 }
        );
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(div_floor(7i64, 2), 3);
        assert_eq!(div_floor(-7i64, 2), -4);
        assert_eq!(div_floor(7i64, -2), -4);
        assert_eq!(div_ceil(7i64, 2), 4);
        assert_eq!(div_ceil(-7i64, 2), -3);
        assert_eq!(div_ceil(-7i64, -2), 4);
    }
}
