//! The non-linear generator
//!
//! ```text
//! G(x, p, q) = sup over the box of (b0 + b1 x) p + ½ (a0 + a1 x⁺) q
//! ```
//!
//! The objective is linear in each coordinate, so the supremum is found by
//! four sign tests. This runs in the PDE solver's inner loop.

use crate::params::{CornerParams, ParameterBox};

/// Maximizing corner for the query `(x, p, q)`. Ties go to the upper endpoint.
pub fn argmax_theta(pbox: &ParameterBox, x: f64, p: f64, q: f64) -> CornerParams {
    CornerParams {
        b0: if p >= 0.0 { pbox.b0_hi } else { pbox.b0_lo },
        b1: if x * p >= 0.0 { pbox.b1_hi } else { pbox.b1_lo },
        a0: if q >= 0.0 { pbox.a0_hi } else { pbox.a0_lo },
        a1: if q >= 0.0 { pbox.a1_hi } else { pbox.a1_lo },
        regime_x0: x,
    }
}

/// Minimizing corner for the query `(x, p, q)`. Ties go to the upper endpoint.
pub fn argmin_theta(pbox: &ParameterBox, x: f64, p: f64, q: f64) -> CornerParams {
    CornerParams {
        b0: if p > 0.0 { pbox.b0_lo } else { pbox.b0_hi },
        b1: if x * p > 0.0 { pbox.b1_lo } else { pbox.b1_hi },
        a0: if q > 0.0 { pbox.a0_lo } else { pbox.a0_hi },
        a1: if q > 0.0 { pbox.a1_lo } else { pbox.a1_hi },
        regime_x0: x,
    }
}

pub fn sup_generator(pbox: &ParameterBox, x: f64, p: f64, q: f64) -> f64 {
    argmax_theta(pbox, x, p, q).generator(x, p, q)
}

pub fn inf_generator(pbox: &ParameterBox, x: f64, p: f64, q: f64) -> f64 {
    argmin_theta(pbox, x, p, q).generator(x, p, q)
}

/// Maximum of the generator over an `n⁴` lattice of the box.
///
/// The lattice contains every vertex, so this equals [`sup_generator`]
/// exactly. Used as a test oracle.
pub fn sup_generator_bruteforce(pbox: &ParameterBox, x: f64, p: f64, q: f64, n: usize) -> f64 {
    assert!(n >= 2, "lattice needs at least two points per axis");
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        (0..n)
            .map(|i| match i {
                0 => lo,
                i if i == n - 1 => hi,
                i => lo + (hi - lo) * i as f64 / (n - 1) as f64,
            })
            .collect()
    };
    let (b0s, b1s) = (axis(pbox.b0_lo, pbox.b0_hi), axis(pbox.b1_lo, pbox.b1_hi));
    let (a0s, a1s) = (axis(pbox.a0_lo, pbox.a0_hi), axis(pbox.a1_lo, pbox.a1_hi));
    let mut best = f64::NEG_INFINITY;
    for &b0 in &b0s {
        for &b1 in &b1s {
            for &a0 in &a0s {
                for &a1 in &a1s {
                    best = best.max(CornerParams::new(b0, b1, a0, a1).generator(x, p, q));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig2_box() -> ParameterBox {
        ParameterBox {
            b0_lo: 0.05,
            b0_hi: 0.15,
            b1_lo: -1.0,
            b1_hi: -0.5,
            a0_lo: 0.0,
            a0_hi: 0.08,
            a1_lo: 0.0,
            a1_hi: 0.2,
        }
    }

    fn vertex_max(pbox: &ParameterBox, x: f64, p: f64, q: f64) -> f64 {
        pbox.vertices().iter().map(|c| c.generator(x, p, q)).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn sup_examples() {
        let pbox = fig2_box();
        assert!((sup_generator(&pbox, 1.0, 1.0, 0.0) - -0.35).abs() < 1e-15);
        assert_eq!(sup_generator(&pbox, 0.7, 0.0, 0.0), 0.0);
        assert_eq!(sup_generator(&pbox, 1.0, 0.0, -2.0), 0.0);
        assert!((sup_generator_bruteforce(&pbox, 1.0, 1.0, 0.0, 5) - -0.35).abs() < 1e-15);
        assert!((inf_generator(&pbox, 1.0, 1.0, 0.0) - -0.95).abs() < 1e-15);
    }

    #[test]
    fn argmax_examples() {
        let pbox = fig2_box();
        let c = argmax_theta(&pbox, 1.0, 1.0, 0.0);
        assert_eq!((c.b0, c.b1, c.a0, c.a1), (0.15, -0.5, 0.08, 0.2));
        let c = argmax_theta(&pbox, 1.0, 0.0, -2.0);
        assert_eq!((c.b0, c.b1, c.a0, c.a1), (0.15, -0.5, 0.0, 0.0));
        let c = argmax_theta(&pbox, -1.0, 1.0, 1.0);
        assert_eq!(c.b1, -1.0);
    }

    #[test]
    fn degenerate_box_inf_equals_sup() {
        let pbox = ParameterBox::degenerate(0.1, -0.3, 0.02, 0.05).unwrap();
        for (x, p, q) in [(1.0, 2.0, -1.0), (-0.5, -1.0, 3.0), (0.0, 0.3, 0.3)] {
            assert_eq!(sup_generator(&pbox, x, p, q), inf_generator(&pbox, x, p, q));
        }
    }

    fn arb_box() -> impl Strategy<Value = ParameterBox> {
        (
            (-1.0..1.0f64, 0.0..1.0f64),
            (-2.0..1.0f64, 0.0..1.0f64),
            (0.0..0.5f64, 0.0..0.5f64),
            (0.0..0.5f64, 0.0..0.5f64),
        )
            .prop_map(|((b0, w0), (b1, w1), (a0, v0), (a1, v1))| ParameterBox {
                b0_lo: b0,
                b0_hi: b0 + w0,
                b1_lo: b1,
                b1_hi: b1 + w1,
                a0_lo: a0,
                a0_hi: a0 + v0,
                a1_lo: a1,
                a1_hi: a1 + v1,
            })
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(pbox in arb_box(), x in -5.0..5.0f64, p in -5.0..5.0f64, q in -5.0..5.0f64) {
            prop_assert_eq!(sup_generator(&pbox, x, p, q), vertex_max(&pbox, x, p, q));
            prop_assert_eq!(sup_generator(&pbox, x, p, q), sup_generator_bruteforce(&pbox, x, p, q, 2));
        }

        #[test]
        fn inf_is_negated_sup(pbox in arb_box(), x in -5.0..5.0f64, p in -5.0..5.0f64, q in -5.0..5.0f64) {
            prop_assert_eq!(inf_generator(&pbox, x, p, q), -sup_generator(&pbox, x, -p, -q));
            prop_assert!(sup_generator(&pbox, x, p, q) >= inf_generator(&pbox, x, p, q));
        }

        #[test]
        fn positively_homogeneous_and_subadditive(
            pbox in arb_box(), x in -5.0..5.0f64,
            p1 in -5.0..5.0f64, q1 in -5.0..5.0f64, p2 in -5.0..5.0f64, q2 in -5.0..5.0f64,
            lambda in 0.0..10.0f64,
        ) {
            let g = |p, q| sup_generator(&pbox, x, p, q);
            let scale = 1e-12 * (1.0 + lambda * (p1.abs() + q1.abs()) * (1.0 + x.abs()));
            prop_assert!((g(lambda * p1, lambda * q1) - lambda * g(p1, q1)).abs() <= scale);
            prop_assert!(g(p1 + p2, q1 + q2) <= g(p1, q1) + g(p2, q2) + 1e-12 * (1.0 + x.abs()) * 20.0);
        }

        #[test]
        fn nondecreasing_in_second_derivative(pbox in arb_box(), x in -5.0..5.0f64, p in -5.0..5.0f64, q in -5.0..5.0f64, dq in 0.0..5.0f64) {
            prop_assert!(sup_generator(&pbox, x, p, q + dq) >= sup_generator(&pbox, x, p, q));
        }
    }
}
