use num::{BigInt, Signed, Zero};
use proptest::prelude::*;

use vasslyze::generate::{random_vass, GenParams};
use vasslyze::graph::{decompose_path, extract_multicycle};
use vasslyze::linear::make_positive;
use vasslyze::oracle::{Oracle, RunLength};
use vasslyze::rational::{dot, Rational};
use vasslyze::ratlp::{solve_lp, LpOutcome, LpProblem};
use vasslyze::verify::{check_linmap, halfspace_or_witness, simple_cycles, Halfspace, INC_CAP};
use vasslyze::{parse_vass, Config, Path, Vass};

fn params() -> impl Strategy<Value = GenParams> {
    (1usize..=3, 1usize..=4, 0i64..=3).prop_map(|(dim, states, max_update)| GenParams {
        dim,
        states,
        max_update,
    })
}

fn vass() -> impl Strategy<Value = Vass> {
    (params(), any::<u64>()).prop_map(|(p, seed)| random_vass(p, seed))
}

/// A random walk of `len` steps from `start`, ignoring counters.
fn walk(v: &Vass, start: usize, choices: &[usize]) -> Path {
    let mut here = start;
    let mut transitions = Vec::new();
    for &c in choices {
        let out: Vec<_> = v.outgoing(here).collect();
        let t = out[c % out.len()];
        transitions.push(t.id);
        here = t.target;
    }
    Path { start, transitions }
}

fn rat(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

/// An LP with a known feasible point `x0`, so the solver must never report
/// infeasibility.
fn feasible_lp() -> impl Strategy<Value = (LpProblem, Vec<Rational>)> {
    (1usize..=4, 0usize..=4, 0usize..=2).prop_flat_map(|(n, m_le, m_eq)| {
        (
            proptest::collection::vec(0i64..=3, n),
            proptest::collection::vec(-3i64..=3, n),
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), m_le),
            proptest::collection::vec(0i64..=3, m_le),
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), m_eq),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(x0, obj, le, slack, eq, free)| {
                let x0: Vec<Rational> = x0.into_iter().map(rat).collect();
                let mut lp = LpProblem::new(n);
                lp.maximize(obj.into_iter().map(rat).collect());
                for (j, f) in free.into_iter().enumerate() {
                    if f {
                        lp.free(j);
                    }
                }
                for (row, s) in le.into_iter().zip(slack) {
                    let row: Vec<Rational> = row.into_iter().map(rat).collect();
                    let rhs = dot(&row, &x0) + rat(s);
                    lp.add_le(row, rhs);
                }
                for row in eq {
                    let row: Vec<Rational> = row.into_iter().map(rat).collect();
                    let rhs = dot(&row, &x0);
                    lp.add_eq(row, rhs);
                }
                (lp, x0)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(v in vass()) {
        let text = v.to_string();
        let back = parse_vass(&text).unwrap();
        prop_assert_eq!(&back, &v);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn path_decomposition_preserves_effect(
        v in vass(),
        start in 0usize..4,
        choices in proptest::collection::vec(0usize..8, 0..40),
    ) {
        let p = walk(&v, start % v.num_states(), &choices);
        let (m, rest) = decompose_path(&v, &p).unwrap();
        let total: Vec<BigInt> = m
            .effect(&v)
            .into_iter()
            .zip(rest.effect(&v))
            .map(|(a, b)| a + b)
            .collect();
        prop_assert_eq!(total, p.effect(&v));
        let in_cycles: u64 = m.transition_counts().values().sum();
        prop_assert_eq!(rest.len() + in_cycles as usize, p.len());
        let states = rest.states(&v).unwrap();
        let mut seen = states.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), states.len(), "remainder is a simple path");
    }

    #[test]
    fn extracted_multicycle_reproduces_flow(
        v in vass(),
        weights in proptest::collection::vec(0u64..4, 1..20),
    ) {
        let cycles = simple_cycles(&v, INC_CAP).unwrap();
        let mut flow = vec![BigInt::zero(); v.num_transitions()];
        for (c, k) in cycles.iter().zip(weights.iter().cycle()) {
            for &id in c {
                flow[v.position_of(id).unwrap()] += BigInt::from(*k);
            }
        }
        let m = extract_multicycle(&v, &flow).unwrap();
        let counts = m.transition_counts();
        for t in v.transitions() {
            let expected = &flow[v.position_of(t.id).unwrap()];
            prop_assert_eq!(BigInt::from(counts.get(&t.id).copied().unwrap_or(0)), expected.clone());
        }
    }

    #[test]
    fn lp_outcomes_carry_certificates((lp, x0) in feasible_lp()) {
        prop_assert!(lp.is_feasible(&x0));
        match solve_lp(&lp) {
            LpOutcome::Optimal { point, value, dual } => {
                prop_assert!(lp.is_feasible(&point));
                prop_assert_eq!(dot(lp.objective(), &point), value.clone());
                prop_assert!(lp.is_dual_feasible(&dual));
                prop_assert_eq!(lp.dual_objective(&dual), value);
            }
            LpOutcome::Unbounded { ray } => prop_assert!(lp.is_improving_ray(&ray)),
            LpOutcome::Infeasible => prop_assert!(false, "x0 is feasible"),
        }
    }

    #[test]
    fn halfspace_returns_one_verified_side(
        d in 1usize..=3,
        raw in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 1..6),
    ) {
        let xs: Vec<Vec<BigInt>> = raw
            .into_iter()
            .map(|x| x[..d].iter().map(|&a| BigInt::from(a)).collect())
            .collect();
        match halfspace_or_witness(&xs, d).unwrap() {
            Halfspace::Normal(n) => {
                prop_assert!(n.iter().all(|a| a.is_positive()));
                for x in &xs {
                    let s: BigInt = x.iter().zip(&n).map(|(a, b)| a * b).sum();
                    prop_assert!(s.is_negative());
                }
            }
            Halfspace::Witness(b) => {
                prop_assert!(b.iter().all(|a| !a.is_negative()));
                prop_assert!(b.iter().any(|a| a.is_positive()));
                for j in 0..d {
                    let s: BigInt = xs.iter().zip(&b).map(|(x, k)| &x[j] * k).sum();
                    prop_assert!(!s.is_negative());
                }
            }
        }
    }

    #[test]
    fn positivization_keeps_ranking(v in vass()) {
        if let Ok(vasslyze::LinearResult::Bounded { rf, .. }) = vasslyze::linear::analyze_linear(&v) {
            let g = make_positive(&v, &rf).unwrap();
            prop_assert_eq!(check_linmap(&v, &g).unwrap().role, vasslyze::Role::PositiveRf);
        }
    }

    #[test]
    fn longest_run_is_monotone_in_counters(
        seed in any::<u64>(),
        lo in proptest::collection::vec(0u64..4, 3),
        extra in proptest::collection::vec(0u64..3, 3),
        state in 0usize..4,
    ) {
        let p = GenParams { dim: 1 + (seed % 3) as usize, states: 1 + (seed % 2) as usize, max_update: 2 };
        let v = random_vass(p, seed);
        let small = Config { state: state % v.num_states(), counters: lo[..p.dim].to_vec() };
        let big = Config {
            state: small.state,
            counters: small.counters.iter().zip(&extra).map(|(a, b)| a + b).collect(),
        };
        let mut o = Oracle::new(&v, 20_000, 200_000).unwrap();
        let a = o.longest_run(&small).unwrap();
        let b = o.longest_run(&big).unwrap();
        if let RunLength::Finite(lb) = b {
            prop_assert!(matches!(a, RunLength::Finite(la) if la <= lb), "{a:?} vs {b:?}");
        }
    }
}
