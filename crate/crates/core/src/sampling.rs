//! Seeded random draws from the built-in map families.

use rand::Rng;

use crate::dynamics::BundleAutomorphism;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::torus::{CohomologyClass, LiftedMap, TorusPoint};
use crate::trig::TrigPolynomial;

/// Family names drawn by [`random_map`] in dimension `dim`.
pub fn builtin_families(dim: usize) -> &'static [&'static str] {
    match dim {
        1 => &["identity", "rotation", "affine", "arnold"],
        2 => &[
            "identity",
            "rotation",
            "affine",
            "sinusoidal-shear",
            "skew-product",
        ],
        _ => &["identity", "rotation", "affine"],
    }
}

/// A random unimodular `M` with `Mᵀa = a`: `M = I + k·wvᵀ` with `w ⟂ a` and
/// `v ∥ a`, so `Mᵀa = a + k·v(wᵀa) = a` and `det M = 1 + k·vᵀw = 1`.
fn random_preserving_matrix<R: Rng>(a: &CohomologyClass, rng: &mut R) -> Result<IntMatrix> {
    let n = a.dim();
    let ints = a.integer_entries();
    let k = rng.random_range(-2i64..=2);
    if n != 2 || k == 0 {
        return Ok(IntMatrix::identity(n));
    }
    let Some(av) = ints else {
        return Ok(IntMatrix::identity(n));
    };
    let g = num_integer::gcd(av[0], av[1]).max(1);
    let v = [av[0] / g, av[1] / g];
    let w = if av == [0, 0] { [1, 0] } else { [-v[1], v[0]] };
    let v = if av == [0, 0] { [0, 1] } else { v };
    IntMatrix::from_rows(&[
        vec![1 + k * w[0] * v[0], k * w[0] * v[1]],
        vec![k * w[1] * v[0], 1 + k * w[1] * v[1]],
    ])
}

/// Draw one built-in family member preserving `a`.
pub fn random_map<R: Rng>(a: &CohomologyClass, rng: &mut R) -> Result<LiftedMap> {
    let fams = builtin_families(a.dim());
    random_map_from(a, fams[rng.random_range(0..fams.len())], rng)
}

pub fn random_map_from<R: Rng>(
    a: &CohomologyClass,
    family: &str,
    rng: &mut R,
) -> Result<LiftedMap> {
    let n = a.dim();
    let vec = |rng: &mut R| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..1.0)).collect() };
    match family {
        "identity" => Ok(LiftedMap::identity(n)),
        "rotation" => LiftedMap::rotation(&vec(rng)),
        "affine" => {
            let m = random_preserving_matrix(a, rng)?;
            LiftedMap::affine(m, &vec(rng))
        }
        "arnold" if n == 1 => {
            LiftedMap::arnold(rng.random_range(0.0..1.0), rng.random_range(-1.0..=1.0))
        }
        "sinusoidal-shear" if n == 2 => LiftedMap::sinusoidal_shear(rng.random_range(-0.3..0.3)),
        "skew-product" if n == 2 => {
            let c = TrigPolynomial::fourier_1d(
                rng.random_range(-0.5..0.5),
                &[rng.random_range(-0.2..0.2)],
                &[rng.random_range(-0.2..0.2), rng.random_range(-0.1..0.1)],
            )?;
            LiftedMap::skew_product(rng.random_range(0.0..1.0), c)
        }
        other => Err(Error::InvalidParameter(format!(
            "no built-in family `{other}` in dimension {n}"
        ))),
    }
}

/// A random map together with a fiber shift in `[-3, 3)`.
pub fn random_automorphism<R: Rng>(a: &CohomologyClass, rng: &mut R) -> Result<BundleAutomorphism> {
    let g = random_map(a, rng)?;
    Ok(BundleAutomorphism::new(g, rng.random_range(-3.0..3.0)))
}

pub fn random_point<R: Rng>(dim: usize, rng: &mut R) -> TorusPoint {
    let x: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
    TorusPoint::new(&x)
}

/// Nonzero integer classes used for random draws: `(1)` on `T¹`, and a few
/// small vectors on `T²`.
pub fn random_class<R: Rng>(dim: usize, rng: &mut R) -> Result<CohomologyClass> {
    match dim {
        1 => CohomologyClass::integer(&[rng.random_range(1..=3)]),
        2 => {
            const CHOICES: [[i64; 2]; 5] = [[1, 0], [0, 1], [1, 2], [2, -1], [3, 1]];
            CohomologyClass::integer(&CHOICES[rng.random_range(0..CHOICES.len())])
        }
        _ => CohomologyClass::integer(&vec![1; dim]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::preserves_class;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_maps_preserve_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let dim = rng.random_range(1..=2);
            let a = random_class(dim, &mut rng).unwrap();
            let g = random_map(&a, &mut rng).unwrap();
            assert!(
                preserves_class(&g, &a).unwrap(),
                "{} vs {:?}",
                g.family(),
                a
            );
            assert!(g.matrix().is_unimodular());
        }
    }

    #[test]
    fn every_family_is_drawn() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = CohomologyClass::integer(&[1, 2]).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            seen.insert(random_map(&a, &mut rng).unwrap().family().to_string());
        }
        assert_eq!(seen.len(), builtin_families(2).len());
    }
}
