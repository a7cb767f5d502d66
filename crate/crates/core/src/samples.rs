//! Small hand-encoded VASSs used by tests, benches and documentation.

use crate::model::{parse_vass, Vass};

/// Two nested counting loops: the outer loop moves one unit from `i` to `j`,
/// the inner loop drains `j`.
pub const COUNTER_PROGRAM: &str = "\
# nested loops over counters (i, j)
vass dim 2
state q1 q2
trans t1: q1 -> q2 [-1, 1]
trans t2: q2 -> q1 [0, 0]
trans t3: q2 -> q2 [0, -1]
";

/// `n` identical processes sharing a boolean flag; counters count processes in
/// the local states `i`, `j`, `k`.
pub const SHARED_FLAG_SYSTEM: &str = "\
# global state = value of the shared flag
vass dim 3
state p_tt p_ff
trans t1: p_tt -> p_ff [-1, 1, 0]
trans t2: p_ff -> p_ff [-1, 1, 0]
trans t3: p_ff -> p_tt [-1, 0, 1]
trans t4: p_tt -> p_tt [1, -1, 0]
";

pub fn counter_program() -> Vass {
    parse_vass(COUNTER_PROGRAM).expect("valid sample")
}

pub fn shared_flag_system() -> Vass {
    parse_vass(SHARED_FLAG_SYSTEM).expect("valid sample")
}

/// One state with a single self-loop carrying `update`.
pub fn single_loop(update: &[i64]) -> Vass {
    let upd: Vec<String> = update.iter().map(|x| x.to_string()).collect();
    parse_vass(&format!(
        "vass dim {}\nstate q\ntrans t: q -> q [{}]\n",
        update.len(),
        upd.join(", ")
    ))
    .expect("valid sample")
}

/// Two copies of [`counter_program`] joined by a one-way bridge `a_q1 -> b_q1`.
pub fn bridged_counter_programs() -> Vass {
    parse_vass(
        "vass dim 2
state a_q1 a_q2 b_q1 b_q2
trans a1: a_q1 -> a_q2 [-1, 1]
trans a2: a_q2 -> a_q1 [0, 0]
trans a3: a_q2 -> a_q2 [0, -1]
trans bridge: a_q1 -> b_q1 [0, 0]
trans b1: b_q1 -> b_q2 [-1, 1]
trans b2: b_q2 -> b_q1 [0, 0]
trans b3: b_q2 -> b_q2 [0, -1]
",
    )
    .expect("valid sample")
}

/// A linear component feeding, via a bridge, into a quadratic one (dimension 3).
pub fn linear_then_quadratic() -> Vass {
    parse_vass(
        "vass dim 3
state l1 l2 p_tt p_ff
trans a1: l1 -> l2 [-1, 1, 0]
trans a2: l2 -> l1 [0, 0, 0]
trans a3: l2 -> l2 [0, -1, 0]
trans bridge: l1 -> p_tt [0, 0, 0]
trans t1: p_tt -> p_ff [-1, 1, 0]
trans t2: p_ff -> p_ff [-1, 1, 0]
trans t3: p_ff -> p_tt [-1, 0, 1]
trans t4: p_tt -> p_tt [1, -1, 0]
",
    )
    .expect("valid sample")
}
