//! Seeded random VASS generation for fuzzing and benchmarks.

use num::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Transition, Vass};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub dim: usize,
    pub states: usize,
    /// Update entries are drawn uniformly from `[-max_update, max_update]`.
    pub max_update: i64,
}

/// A strongly connected VASS: a Hamiltonian cycle through the states in random
/// order, plus up to `states + 1` further random transitions. The same parameters
/// and seed always give the same VASS.
///
/// # Panics
///
/// If `dim` or `states` is zero or `max_update` is negative.
pub fn random_vass(params: GenParams, seed: u64) -> Vass {
    let GenParams {
        dim,
        states,
        max_update,
    } = params;
    assert!(
        dim >= 1 && states >= 1 && max_update >= 0,
        "invalid parameters"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..states).collect();
    order.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = (0..states)
        .map(|i| (order[i], order[(i + 1) % states]))
        .collect();
    let extra = rng.gen_range(0..=states + 1);
    for _ in 0..extra {
        edges.push((rng.gen_range(0..states), rng.gen_range(0..states)));
    }
    let transitions = edges
        .into_iter()
        .enumerate()
        .map(|(id, (source, target))| Transition {
            id,
            label: format!("t{id}"),
            source,
            target,
            update: (0..dim)
                .map(|_| BigInt::from(rng.gen_range(-max_update..=max_update)))
                .collect(),
        })
        .collect();
    Vass::new(
        dim,
        (0..states).map(|i| format!("q{i}")).collect(),
        transitions,
    )
    .expect("a Hamiltonian backbone gives every state an outgoing transition")
}

/// The fuzzing corpus shape: dimension `1 + seed mod 3`, `1 + (seed / 3) mod 4` states,
/// updates in `[-2, 2]`.
pub fn corpus_params(seed: u64) -> GenParams {
    GenParams {
        dim: 1 + (seed % 3) as usize,
        states: 1 + ((seed / 3) % 4) as usize,
        max_update: 2,
    }
}

/// The corpus member for `seed`.
pub fn corpus_vass(seed: u64) -> Vass {
    random_vass(corpus_params(seed), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_strongly_connected;
    use crate::model::parse_vass;

    #[test]
    fn deterministic_per_seed() {
        let p = GenParams {
            dim: 2,
            states: 3,
            max_update: 2,
        };
        assert_eq!(random_vass(p, 42), random_vass(p, 42));
        assert_ne!(random_vass(p, 42), random_vass(p, 43));
    }

    #[test]
    fn shape_and_connectivity() {
        for seed in 0..200 {
            let v = corpus_vass(seed);
            assert!(is_strongly_connected(&v), "seed {seed}");
            assert_eq!(v.dim(), corpus_params(seed).dim);
            assert_eq!(v.num_states(), corpus_params(seed).states);
            assert!(v.transitions().iter().all(|t| t
                .update
                .iter()
                .all(|x| (-2..=2).contains(&i64::try_from(x).unwrap()))));
            assert_eq!(parse_vass(&v.to_string()).unwrap(), v);
        }
        let v = random_vass(
            GenParams {
                dim: 3,
                states: 4,
                max_update: 1,
            },
            7,
        );
        assert_eq!((v.dim(), v.num_states()), (3, 4));
    }
}
