use gonflow::ilp::{solve_exhaustive, solve_ilp, IlpOutcome, IlpSolver};
use gonflow::{IlpModel, Relation};
use proptest::prelude::*;

#[test]
fn examples() {
    let mut m = IlpModel::<i64>::new();
    let x = m.add_var("x", 0, 5);
    m.add_constraint(vec![(x, 1)], Relation::Eq, 3).unwrap();
    assert_eq!(solve_ilp(&m).unwrap().assignment(), Some(&[3][..]));

    let mut m = IlpModel::<i64>::new();
    let x = m.add_var("x", 0, 2);
    let y = m.add_var("y", 0, 2);
    m.add_constraint(vec![(x, 1), (y, 1)], Relation::Eq, 5).unwrap();
    assert_eq!(solve_ilp(&m).unwrap(), IlpOutcome::Infeasible);

    let mut m = IlpModel::<i64>::new();
    let x = m.add_var("x", 0, 3);
    let y = m.add_var("y", 0, 3);
    m.add_constraint(vec![(x, 1), (y, 1)], Relation::Ge, 3).unwrap();
    m.set_objective(vec![(x, 2), (y, 1)]).unwrap();
    assert_eq!(solve_ilp(&m).unwrap(), IlpOutcome::Optimal { assignment: vec![0, 3], value: 3 });
}

#[test]
fn node_budget_is_a_resource_error() {
    let mut m = IlpModel::<i64>::new();
    let vars: Vec<_> = (0..12).map(|i| m.add_var(format!("x{i}"), 0, 1)).collect();
    // Parity makes this infeasible, and propagation alone cannot see it.
    m.add_constraint(vars.iter().map(|&v| (v, 2)).collect(), Relation::Eq, 11).unwrap();
    let err = IlpSolver::with_node_budget(Some(3)).solve(&m);
    match err {
        Err(e) => assert!(e.is_resource()),
        Ok(out) => assert_eq!(out, IlpOutcome::Infeasible),
    }
}

#[test]
fn works_with_narrow_scalars() {
    let mut m = IlpModel::<i32>::new();
    let x = m.add_var("x", -4, 4);
    let y = m.add_var("y", -4, 4);
    m.add_constraint(vec![(x, 3), (y, -2)], Relation::Eq, 1).unwrap();
    m.set_objective(vec![(x, 1), (y, 1)]).unwrap();
    match solve_ilp(&m).unwrap() {
        IlpOutcome::Optimal { value, .. } => assert_eq!(value, -3),
        other => panic!("{other:?}"),
    }
}

fn arb_model() -> impl Strategy<Value = IlpModel<i64>> {
    let var = (-4i64..4, 0i64..5).prop_map(|(lo, w)| (lo, lo + w));
    (
        proptest::collection::vec(var, 1..5),
        proptest::collection::vec((proptest::collection::vec(-3i64..4, 4), 0u8..3, -6i64..7), 0..4),
        proptest::option::of(proptest::collection::vec(-3i64..4, 4)),
    )
        .prop_map(|(vars, cons, obj)| {
            let mut m = IlpModel::new();
            let ids: Vec<_> = vars.iter().enumerate().map(|(i, &(lo, hi))| m.add_var(format!("x{i}"), lo, hi)).collect();
            for (coef, rel, rhs) in cons {
                let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
                m.add_constraint(ids.iter().zip(&coef).map(|(&v, &c)| (v, c)).collect(), rel, rhs).unwrap();
            }
            if let Some(c) = obj {
                m.set_objective(ids.iter().zip(&c).map(|(&v, &c)| (v, c)).collect()).unwrap();
            }
            m
        })
}

proptest! {
    #[test]
    fn agrees_with_enumeration(m in arb_model()) {
        let bb = solve_ilp(&m).unwrap();
        let ex = solve_exhaustive(&m, 1 << 20).unwrap();
        prop_assert_eq!(bb.is_feasible(), ex.is_feasible());
        if let Some(x) = bb.assignment() {
            prop_assert!(m.is_satisfied_by(x));
        }
        if let (IlpOutcome::Optimal { value: a, .. }, IlpOutcome::Optimal { value: b, .. }) = (&bb, &ex) {
            prop_assert_eq!(a, b);
        }
    }
}
