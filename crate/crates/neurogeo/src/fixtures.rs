//! Bundled worked examples and their reference values.
//!
//! The two network fixtures and two plane-curve fixtures come with frozen
//! expected results (coefficient polynomials, implicit equations, singular
//! locus generators, dimension counts). `reproduce` commands recompute
//! everything from scratch and diff against these values.

use num::{BigInt, BigRational};

use crate::error::NgError;
use crate::netparam::cnn::CnnSpec;
use crate::netparam::mlp::MlpSpec;
use crate::polyalg::{Activation, MultiPoly, PolyMap};

fn poly(n: usize, terms: &[(&[u32], i64)]) -> MultiPoly {
    MultiPoly::from_terms(
        n,
        terms
            .iter()
            .map(|(e, c)| (e.to_vec(), BigRational::from_integer(BigInt::from(*c)))),
    )
    .expect("fixture term lists are well formed")
}

/// Width-(2,2,1) network with sigma = x^3 + x^2.
pub fn mlp_d1() -> MlpSpec {
    MlpSpec::new(vec![2, 2, 1], Activation::from_ints(&[0, 0, 1, 1]).unwrap()).unwrap()
}

/// Two-layer stride-2 CNN: k=(3,2), s=(2,1), d=(5,2,1), sigma = x^2 + x.
pub fn cnn_d2() -> CnnSpec {
    CnnSpec::new(
        vec![3, 2],
        vec![2, 1],
        vec![5, 2, 1],
        Activation::from_ints(&[0, 1, 1]).unwrap(),
    )
    .unwrap()
}

/// The seven coefficient polynomials of the (2,2,1), sigma = x^3 + x^2
/// network in weight variables (a, b, c, d, e, f), listed in the canonical
/// basis order (x1^3, x1^2 x2, x1^2, x1 x2^2, x1 x2, x2^3, x2^2).
pub fn d1_coefficients() -> Vec<MultiPoly> {
    // Exponent vector helper over (a, b, c, d, e, f).
    let e = |exps: &[(usize, u32)]| -> Vec<u32> {
        let mut v = vec![0u32; 6];
        for &(i, p) in exps {
            v[i] = p;
        }
        v
    };
    vec![
        // t1 = a^3 e + c^3 f
        poly(6, &[(&e(&[(0, 3), (4, 1)]), 1), (&e(&[(2, 3), (5, 1)]), 1)]),
        // t2 = 3 a^2 b e + 3 c^2 d f
        poly(6, &[(&e(&[(0, 2), (1, 1), (4, 1)]), 3), (&e(&[(2, 2), (3, 1), (5, 1)]), 3)]),
        // t3 = a^2 e + c^2 f
        poly(6, &[(&e(&[(0, 2), (4, 1)]), 1), (&e(&[(2, 2), (5, 1)]), 1)]),
        // t4 = 3 a b^2 e + 3 c d^2 f
        poly(6, &[(&e(&[(0, 1), (1, 2), (4, 1)]), 3), (&e(&[(2, 1), (3, 2), (5, 1)]), 3)]),
        // t5 = 2 a b e + 2 c d f
        poly(6, &[(&e(&[(0, 1), (1, 1), (4, 1)]), 2), (&e(&[(2, 1), (3, 1), (5, 1)]), 2)]),
        // t6 = b^3 e + d^3 f
        poly(6, &[(&e(&[(1, 3), (4, 1)]), 1), (&e(&[(3, 3), (5, 1)]), 1)]),
        // t7 = b^2 e + d^2 f
        poly(6, &[(&e(&[(1, 2), (4, 1)]), 1), (&e(&[(3, 2), (5, 1)]), 1)]),
    ]
}

/// The implicit cubic of the (2,2,1) fixture in ambient coordinates
/// (t1, ..., t7): 2 t3 t4^2 - t2 t4 t5 - 6 t2 t3 t6 + 9 t1 t5 t6
/// + 2 t2^2 t7 - 6 t1 t4 t7.
pub fn d1_implicit_cubic() -> MultiPoly {
    let e = |exps: &[(usize, u32)]| -> Vec<u32> {
        let mut v = vec![0u32; 7];
        for &(i, p) in exps {
            v[i] = p;
        }
        v
    };
    poly(
        7,
        &[
            (&e(&[(2, 1), (3, 2)]), 2),
            (&e(&[(1, 1), (3, 1), (4, 1)]), -1),
            (&e(&[(1, 1), (2, 1), (5, 1)]), -6),
            (&e(&[(0, 1), (4, 1), (5, 1)]), 9),
            (&e(&[(1, 2), (6, 1)]), 2),
            (&e(&[(0, 1), (3, 1), (6, 1)]), -6),
        ],
    )
}

/// The nine quadratic generators cutting out the closed subnetwork locus
/// of the (2,2,1) fixture, in ambient coordinates (t1, ..., t7).
pub fn d1_singular_generators() -> Vec<MultiPoly> {
    let e = |i: usize, j: usize| -> Vec<u32> {
        let mut v = vec![0u32; 7];
        v[i] += 1;
        v[j] += 1;
        v
    };
    vec![
        // 3 t5 t6 - 2 t4 t7
        poly(7, &[(&e(4, 5), 3), (&e(3, 6), -2)]),
        // 3 t3 t6 - t2 t7
        poly(7, &[(&e(2, 5), 3), (&e(1, 6), -1)]),
        // t4 t5 - 2 t2 t7
        poly(7, &[(&e(3, 4), 1), (&e(1, 6), -2)]),
        // t2 t5 - 6 t1 t7
        poly(7, &[(&e(1, 4), 1), (&e(0, 6), -6)]),
        // t4^2 - 3 t2 t6
        poly(7, &[(&e(3, 3), 1), (&e(1, 5), -3)]),
        // t3 t4 - 3 t1 t7
        poly(7, &[(&e(2, 3), 1), (&e(0, 6), -3)]),
        // t2 t4 - 9 t1 t6
        poly(7, &[(&e(1, 3), 1), (&e(0, 5), -9)]),
        // 2 t2 t3 - 3 t1 t5
        poly(7, &[(&e(1, 2), 2), (&e(0, 4), -3)]),
        // t2^2 - 3 t1 t4
        poly(7, &[(&e(1, 1), 1), (&e(0, 3), -3)]),
    ]
}

/// The 3x3 minor of the restricted Jacobian used in the exposedness count:
/// 3 a^6 e^2 over weight variables (a, b, c, d, e, f).
pub fn d1_exposedness_minor() -> MultiPoly {
    poly(6, &[(&[6, 0, 0, 0, 2, 0], 3)])
}

/// Nodal plane cubic parametrization t -> (t^2 - 1, t^3 - t).
pub fn node_curve() -> PolyMap {
    let t = MultiPoly::var(1, 0);
    let x = t.pow(2).sub(&MultiPoly::constant_int(1, 1)).unwrap();
    let y = t.pow(3).sub(&t).unwrap();
    PolyMap::new(vec![x, y]).unwrap()
}

/// Cuspidal plane cubic parametrization t -> (t^2, t^3).
pub fn cusp_curve() -> PolyMap {
    let t = MultiPoly::var(1, 0);
    PolyMap::new(vec![t.pow(2), t.pow(3)]).unwrap()
}

/// x^2 (x + 1) - y^2 = x^3 + x^2 - y^2 over (x, y).
pub fn node_implicit() -> MultiPoly {
    poly(2, &[(&[3, 0], 1), (&[2, 0], 1), (&[0, 2], -1)])
}

/// x^3 - y^2 over (x, y).
pub fn cusp_implicit() -> MultiPoly {
    poly(2, &[(&[3, 0], 1), (&[0, 2], -1)])
}

/// The signed-padding profiles tabulated for the stride-2 CNN fixture,
/// with their expected accumulated profiles and singularity verdicts.
pub fn d2_padding_table() -> Vec<(Vec<i64>, Vec<BigRational>, bool)> {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    vec![
        (vec![1, 0], vec![q(1, 1), q(1, 2)], false),
        (vec![2, 0], vec![q(2, 1), q(1, 1)], false),
        (vec![0, -1], vec![q(0, 1), q(-1, 1)], false),
        (vec![2, -1], vec![q(2, 1), q(0, 1)], true),
    ]
}

/// Parses a reproduce target name.
pub fn reproduce_target(name: &str) -> Result<ReproduceTarget, NgError> {
    match name {
        "D1" | "d1" => Ok(ReproduceTarget::D1),
        "D2" | "d2" => Ok(ReproduceTarget::D2),
        "cubics" => Ok(ReproduceTarget::Cubics),
        other => Err(NgError::Config(format!(
            "unknown reproduce target {other:?}; expected D1, D2, or cubics"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproduceTarget {
    D1,
    D2,
    Cubics,
}
