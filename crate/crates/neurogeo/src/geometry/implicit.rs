//! Implicit equations of parametrized varieties. The search interpolates:
//! evaluate the parametrization at many integer points, find the linear
//! space of low-degree polynomials vanishing on all of them modulo a large
//! prime, lift candidates back to the rationals, and only accept a result
//! after the exact symbolic identity F(phi) = 0 has been checked.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::NgError;
use crate::geometry::matrix::FpMatrix;
use crate::geometry::univar;
use crate::netparam::{embed, mlp_forward, AmbientBasis, MlpSpec};
use crate::netparam::sample_nonzero_ints;
use crate::polyalg::{
    monomials_with_degrees, random_prime, Monomial, MultiPoly, PolyMap, PrimeField,
};

/// A hypersurface cut out by one integral polynomial with coprime
/// coefficients and a positive leading (graded-lex) coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicitSurface {
    pub num_vars: usize,
    pub degree: u32,
    pub polynomial: MultiPoly,
}

/// Least-degree implicit equation of the image of `phi`, searched up to
/// `degree_cap`. Degrees are ruled out soundly: a full-rank evaluation
/// matrix modulo a prime certifies that no rational relation of that degree
/// vanishes on the sampled points. The returned equation is certified by an
/// exact symbolic composition check, never by sampling alone.
pub fn implicitize_map(
    phi: &PolyMap,
    degree_cap: u32,
    samples: Option<usize>,
    seed: u64,
) -> Result<ImplicitSurface, NgError> {
    let ambient = phi.len();
    let params = phi.num_vars();
    if degree_cap == 0 {
        return Err(NgError::Config("degree cap must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for degree in 1..=degree_cap {
        let degree_list: Vec<u32> = (0..=degree).collect();
        let monos = monomials_with_degrees(ambient, &degree_list);
        let cols = monos.len();
        let rows = samples.unwrap_or(0).max(cols + 16);
        // Small parameter counts need a wider sampling box for enough
        // distinct points.
        let bound = 10i64.max(rows as i64);
        let values: Vec<Vec<BigRational>> = (0..rows)
            .map(|_| phi.eval_rational(&sample_nonzero_ints(&mut rng, params, bound)))
            .collect::<Result<_, _>>()?;

        let mut kernel_seen = false;
        for _ in 0..3 {
            let field = PrimeField::new(random_prime(&mut rng))?;
            let mat = match evaluation_matrix(&values, &monos, &field) {
                Ok(m) => m,
                Err(NgError::BadPrime(_)) => continue,
                Err(e) => return Err(e),
            };
            if mat.rank()? == cols {
                kernel_seen = false;
                break;
            }
            kernel_seen = true;
            for vector in mat.kernel_basis()? {
                let Some(candidate) = lift_candidate(&vector, &monos, &field)? else {
                    continue;
                };
                if candidate.substitute(&phi.components)?.is_zero() {
                    return Ok(ImplicitSurface {
                        num_vars: ambient,
                        degree,
                        polynomial: candidate,
                    });
                }
            }
        }
        if kernel_seen {
            return Err(NgError::Inconclusive(format!(
                "vanishing space found at degree {degree} but no candidate passed the symbolic \
                 check; increase the sample count"
            )));
        }
    }
    Err(NgError::Config(format!(
        "no implicit equation of degree at most {degree_cap}"
    )))
}

/// Implicit equation of an MLP neuromanifold: embeds the network family
/// into its ambient coefficient space and implicitizes that map.
pub fn implicitize(
    spec: &MlpSpec,
    degree_cap: u32,
    samples: Option<usize>,
    seed: u64,
) -> Result<ImplicitSurface, NgError> {
    let basis = AmbientBasis::for_mlp(spec);
    let family = mlp_forward(spec, &spec.symbolic_weights())?;
    let coords = embed(&family, &basis)?;
    implicitize_map(&PolyMap::new(coords.coords)?, degree_cap, samples, seed)
}

fn evaluation_matrix(
    values: &[Vec<BigRational>],
    monos: &[Monomial],
    field: &PrimeField,
) -> Result<FpMatrix, NgError> {
    let mut mat = FpMatrix::zero(values.len(), monos.len(), field.clone());
    for (r, point) in values.iter().enumerate() {
        let residues: Vec<u64> =
            point.iter().map(|v| field.from_rational(v)).collect::<Result<_, _>>()?;
        for (c, m) in monos.iter().enumerate() {
            let mut acc = 1u64;
            for (i, &e) in m.0.iter().enumerate() {
                acc = field.mul(acc, field.pow(residues[i], e as u64));
            }
            mat.set(r, c, acc);
        }
    }
    Ok(mat)
}

/// Lifts a mod-p kernel vector to a rational polynomial in canonical form,
/// or `None` when some coordinate has no small rational preimage.
fn lift_candidate(
    vector: &[u64],
    monos: &[Monomial],
    field: &PrimeField,
) -> Result<Option<MultiPoly>, NgError> {
    let mut terms = Vec::new();
    for (residue, m) in vector.iter().zip(monos) {
        if *residue == 0 {
            continue;
        }
        let Some(value) = rational_reconstruct(*residue, field) else {
            return Ok(None);
        };
        terms.push((m.clone(), value));
    }
    if terms.is_empty() {
        return Ok(None);
    }
    Ok(Some(canonical_integral(terms)?))
}

/// Clears denominators, divides by the coefficient gcd, and normalizes the
/// sign so the graded-lex leading coefficient is positive.
pub fn canonical_integral(terms: Vec<(Monomial, BigRational)>) -> Result<MultiPoly, NgError> {
    let n = terms
        .first()
        .map(|(m, _)| m.num_vars())
        .ok_or_else(|| NgError::Internal("empty candidate polynomial".into()))?;
    let lcm = terms.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut ints: Vec<(Monomial, BigInt)> = terms
        .into_iter()
        .map(|(m, c)| {
            let v = (c * BigRational::from_integer(lcm.clone())).to_integer();
            (m, v)
        })
        .collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    if gcd.is_zero() {
        return Err(NgError::Internal("zero candidate polynomial".into()));
    }
    for (_, c) in &mut ints {
        *c /= &gcd;
    }
    let lead_negative = ints
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .max_by(|(a, _), (b, _)| a.cmp_grlex(b))
        .is_some_and(|(_, c)| c.is_negative());
    if lead_negative {
        for (_, c) in &mut ints {
            *c = -c.clone();
        }
    }
    MultiPoly::from_terms(
        n,
        ints.into_iter().map(|(m, c)| (m.0, BigRational::from_integer(c))),
    )
}

/// Wang-style rational reconstruction: the unique fraction `num/den` with
/// both sides below sqrt(p/2) congruent to `a`, if one exists.
fn rational_reconstruct(a: u64, field: &PrimeField) -> Option<BigRational> {
    if a == 0 {
        return Some(BigRational::zero());
    }
    let p = BigInt::from(field.prime());
    let bound = (p.clone() / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (p, BigInt::from(a));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 >= bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if num.gcd(&den) != BigInt::one() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Pointwise smoothness test against one implicit equation.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MembershipReport {
    pub on_variety: bool,
    pub gradient_vanishes: bool,
    pub in_singular_locus: bool,
    pub value: String,
    pub gradient: Vec<String>,
}

/// Evaluates `f` and its gradient at `point`; the point lies in the
/// singular locus exactly when both vanish.
pub fn singular_locus_membership(
    f: &MultiPoly,
    point: &[BigRational],
) -> Result<MembershipReport, NgError> {
    let value = f.eval_rational(point)?;
    let gradient: Vec<BigRational> = (0..f.num_vars())
        .map(|v| f.partial(v).eval_rational(point))
        .collect::<Result<_, _>>()?;
    let on_variety = value.is_zero();
    let gradient_vanishes = gradient.iter().all(Zero::is_zero);
    Ok(MembershipReport {
        on_variety,
        gradient_vanishes,
        in_singular_locus: on_variety && gradient_vanishes,
        value: value.to_string(),
        gradient: gradient.iter().map(ToString::to_string).collect(),
    })
}

/// Singular points of a plane curve `f(x, y) = 0`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlaneSingularReport {
    /// Rational singular points as coordinate pairs, sorted.
    pub points: Vec<[String; 2]>,
    /// True when elimination certifies that no further singular points
    /// exist over the complex numbers.
    pub exhaustive: bool,
}

/// Locates the singular points of a plane curve by eliminating each
/// variable with resultants and enumerating rational roots. When every
/// eliminant splits into rational factors the list is provably complete
/// even over the complex numbers.
pub fn plane_curve_singular_points(f: &MultiPoly) -> Result<PlaneSingularReport, NgError> {
    if f.num_vars() != 2 {
        return Err(NgError::Config("plane-curve analysis needs exactly 2 variables".into()));
    }
    if f.is_zero() {
        return Err(NgError::Config("plane-curve analysis of the zero polynomial".into()));
    }
    let fx = f.partial(0);
    let fy = f.partial(1);
    let mut eliminants = Vec::new();
    for (a, b) in [(f, &fy), (&fx, &fy), (f, &fx)] {
        let r = univar::sylvester_resultant(a, b, 1)?;
        if !r.is_zero() {
            eliminants.push(univar::univar_in(&r, 0)?);
        }
    }
    if eliminants.is_empty() {
        return Err(NgError::Config(
            "curve shares a component with its derivatives; singular locus is not finite".into(),
        ));
    }
    let g = eliminants
        .iter()
        .skip(1)
        .fold(eliminants[0].clone(), |acc, e| univar::gcd(&acc, e));
    if g.is_empty() {
        return Err(NgError::Internal("gcd of nonzero eliminants vanished".into()));
    }
    let (x_candidates, x_split) = univar::rational_roots(&g)?;
    let mut exhaustive = x_split;
    let mut points = Vec::new();
    for x0 in x_candidates {
        let sections: Vec<univar::Univar> = [f, &fx, &fy]
            .iter()
            .map(|p| univar::specialize(p, 0, &x0))
            .filter(|v| !v.is_empty())
            .collect();
        if sections.is_empty() {
            return Err(NgError::Config(format!(
                "curve and both derivatives vanish along the line x = {x0}"
            )));
        }
        let h = sections
            .iter()
            .skip(1)
            .fold(sections[0].clone(), |acc, s| univar::gcd(&acc, s));
        if h.is_empty() {
            return Err(NgError::Internal("gcd of nonzero sections vanished".into()));
        }
        let (y_candidates, y_split) = univar::rational_roots(&h)?;
        exhaustive &= y_split;
        for y0 in y_candidates {
            let point = [x0.clone(), y0];
            if singular_locus_membership(f, &point)?.in_singular_locus {
                points.push(point);
            }
        }
    }
    points.sort();
    Ok(PlaneSingularReport {
        points: points
            .iter()
            .map(|[x, y]| [x.to_string(), y.to_string()])
            .collect(),
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn scalar_multiple(a: &MultiPoly, b: &MultiPoly) -> bool {
        let Some((ml, cl)) = a.leading_term() else {
            return b.is_zero();
        };
        let ratio = b.coeff(ml) / cl;
        if ratio.is_zero() {
            return false;
        }
        a.scale(&ratio) == *b
    }

    #[test]
    fn node_curve_implicitizes_to_the_known_cubic() {
        let surface = implicitize_map(&fixtures::node_curve(), 4, None, 11).unwrap();
        assert_eq!(surface.degree, 3);
        assert!(scalar_multiple(&surface.polynomial, &fixtures::node_implicit()));
    }

    #[test]
    fn cusp_curve_implicitizes_to_the_known_cubic() {
        let surface = implicitize_map(&fixtures::cusp_curve(), 4, None, 12).unwrap();
        assert_eq!(surface.degree, 3);
        assert!(scalar_multiple(&surface.polynomial, &fixtures::cusp_implicit()));
    }

    #[test]
    fn network_fixture_implicitizes_to_the_reference_cubic() {
        let surface = implicitize(&fixtures::mlp_d1(), 3, None, 7).unwrap();
        assert_eq!(surface.degree, 3);
        assert!(scalar_multiple(&surface.polynomial, &fixtures::d1_implicit_cubic()));
    }

    #[test]
    fn membership_distinguishes_smooth_and_singular_points() {
        let f = fixtures::node_implicit();
        // t = 2 on the curve: (3, 6) is smooth.
        let smooth = singular_locus_membership(&f, &[q(3), q(6)]).unwrap();
        assert!(smooth.on_variety && !smooth.gradient_vanishes);
        let origin = singular_locus_membership(&f, &[q(0), q(0)]).unwrap();
        assert!(origin.in_singular_locus);
        let off = singular_locus_membership(&f, &[q(1), q(1)]).unwrap();
        assert!(!off.on_variety);
    }

    #[test]
    fn plane_singularities_of_both_cubics_are_the_origin_only() {
        for f in [fixtures::node_implicit(), fixtures::cusp_implicit()] {
            let report = plane_curve_singular_points(&f).unwrap();
            assert_eq!(report.points, vec![["0".to_string(), "0".to_string()]]);
            assert!(report.exhaustive);
        }
    }

    #[test]
    fn smooth_conic_has_no_singular_points() {
        // x^2 + y^2 - 1.
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let f = x
            .pow(2)
            .add(&y.pow(2))
            .unwrap()
            .sub(&MultiPoly::constant_int(2, 1))
            .unwrap();
        let report = plane_curve_singular_points(&f).unwrap();
        assert!(report.points.is_empty());
        assert!(report.exhaustive);
    }

    #[test]
    fn canonical_form_is_coprime_with_positive_leading_coefficient() {
        let terms = vec![
            (Monomial(vec![2, 0]), BigRational::new((-4).into(), 6.into())),
            (Monomial(vec![0, 1]), BigRational::new(2.into(), 9.into())),
        ];
        let poly = canonical_integral(terms).unwrap();
        // -2/3 x^2 + 2/9 y scales to -6 x^2 + 2 y, then to -3 x^2 + y,
        // then flips sign: 3 x^2 - y.
        assert_eq!(poly.coeff(&Monomial(vec![2, 0])), q(3));
        assert_eq!(poly.coeff(&Monomial(vec![0, 1])), q(-1));
    }

    #[test]
    fn reconstruction_roundtrips_small_fractions() {
        let field = PrimeField::new(2_305_843_009_213_693_951).unwrap();
        for (num, den) in [(3i64, 7u64), (-22, 5), (1, 1), (0, 1), (-9, 2)] {
            let q = BigRational::new(num.into(), den.into());
            let residue = field.from_rational(&q).unwrap();
            assert_eq!(rational_reconstruct(residue, &field), Some(q));
        }
    }
}
