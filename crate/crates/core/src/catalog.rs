//! Example systems shipped with the crate and used throughout the test and
//! acceptance suites.

use alloc::vec::Vec;


use crate::linalg::Square;
use crate::model::{center_observable, gibbs_from_potential, Observable, Potential, SymbolicSystem};

#[derive(Debug, Clone)]
pub struct Example {
    pub name: &'static str,
    pub system: SymbolicSystem,
    pub observable: Observable,
}

fn build(name: &'static str, system: SymbolicSystem, raw: Square<f64>) -> Example {
    let observable = center_observable(&system, &raw).expect("catalog observable matches system");
    Example {
        name,
        system,
        observable,
    }
}

/// Two-state chain `Q = [[0.9, 0.1], [0.5, 0.5]]` with the state observable
/// `+1 / -1`, centered. `pi = (5/6, 1/6)`.
pub fn two_state() -> Example {
    let q = Square::from_rows(&[[0.9, 0.1], [0.5, 0.5]]).unwrap();
    let system = SymbolicSystem::from_transition(q).expect("valid chain");
    build("two-state", system, Observable::state_values(&[1.0, -1.0]))
}

/// Golden-mean shift (no two consecutive 1s) with its Parry measure and the
/// edge observable `phi(0,0) = -1, phi(0,1) = phi(1,0) = 1`, centered.
///
/// The graph has only two independent cycles (`0 -> 0` and `0 -> 1 -> 0`), so
/// every edge observable is lattice somewhere: here `e^{it phi}` is
/// cohomologous to a constant at `t = 2 pi / 4`, outside the support of the
/// Fejér transform.
pub fn golden_mean() -> Example {
    let a = Square::from_fn(2, |x, y| !(x == 1 && y == 1));
    let system = gibbs_from_potential(&a, &Potential::zero(2)).expect("primitive");
    let raw = Square::from_rows(&[[-1.0, 1.0], [1.0, 0.0]]).unwrap();
    build("golden-mean", system, raw)
}

/// I.i.d. uniform symbols on three letters with state values
/// `1, sqrt 2, -(1 + sqrt 2)`. The differences are rationally independent,
/// so the walk is non-lattice.
pub fn iid_three() -> Example {
    let third = 1.0 / 3.0;
    let system = SymbolicSystem::iid(&[third, third, third]).expect("valid law");
    let s2 = 2.0f64.sqrt();
    build("iid-three", system, Observable::state_values(&[1.0, s2, -1.0 - s2]))
}

/// Fair coin with increments `+1 / -1`.
pub fn coin() -> Example {
    let system = SymbolicSystem::iid(&[0.5, 0.5]).expect("valid law");
    build("coin", system, Observable::state_values(&[1.0, -1.0]))
}

/// I.i.d. uniform steps in `{-1, 0, 1}`: an integer-valued (lattice) walk
/// whose characteristic operator is the transfer operator again at `t = 2 pi`.
pub fn integer_lattice() -> Example {
    let third = 1.0 / 3.0;
    let system = SymbolicSystem::iid(&[third, third, third]).expect("valid law");
    build("integer-lattice", system, Observable::state_values(&[-1.0, 0.0, 1.0]))
}

/// One-symbol system; every observable centers to zero.
pub fn trivial() -> Example {
    let system = SymbolicSystem::iid(&[1.0]).expect("valid law");
    build("trivial", system, Square::from_fn(1, |_, _| 1.0))
}

/// The three non-degenerate, kernel-compatible examples the acceptance suite
/// runs on.
pub fn shipped() -> Vec<Example> {
    alloc::vec![two_state(), golden_mean(), iid_three()]
}

pub fn by_name(name: &str) -> Option<Example> {
    Some(match name {
        "two-state" => two_state(),
        "golden-mean" => golden_mean(),
        "iid-three" => iid_three(),
        "coin" => coin(),
        "integer-lattice" => integer_lattice(),
        "trivial" => trivial(),
        _ => return None,
    })
}
