use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::exact::ExactAffineAutomorphism;
use crate::error::{Error, Result};
use crate::torus::CohomologyClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsOptions {
    pub radius: usize,
    /// Largest number of distinct elements the search may hold.
    pub ball_cap: usize,
}

impl Default for BfsOptions {
    fn default() -> Self {
        Self {
            radius: 12,
            ball_cap: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WordNorm {
    Found { length: usize },
    NotFound { radius: usize },
}

impl WordNorm {
    pub fn length(&self) -> Option<usize> {
        match self {
            Self::Found { length } => Some(*length),
            Self::NotFound { .. } => None,
        }
    }
}

fn integral_class(a: &CohomologyClass) -> Result<Vec<i64>> {
    a.integer_entries()
        .ok_or_else(|| Error::InvalidClass("exact word norms need an integral class".into()))
}

/// Canonical forms of `S ∪ S⁻¹`, deduplicated, in input order.
fn symmetrize(
    a: &[i64],
    generators: &[ExactAffineAutomorphism],
) -> Result<Vec<ExactAffineAutomorphism>> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("generating set is empty".into()));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for s in generators {
        if !s.preserves(a) {
            return Err(Error::ClassNotPreserved { map: s.to_string() });
        }
        for e in [s.canonical(a)?, s.inverse()?.canonical(a)?] {
            if seen.insert(e.clone()) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// Exact word norms of several targets from a single breadth-first search.
pub fn word_norms_bfs(
    a: &CohomologyClass,
    generators: &[ExactAffineAutomorphism],
    targets: &[ExactAffineAutomorphism],
    opts: &BfsOptions,
) -> Result<Vec<WordNorm>> {
    let av = integral_class(a)?;
    let letters = symmetrize(&av, generators)?;
    let keys: Vec<ExactAffineAutomorphism> = targets
        .iter()
        .map(|t| t.canonical(&av))
        .collect::<Result<_>>()?;
    let mut found: Vec<Option<usize>> = vec![None; keys.len()];
    let identity = ExactAffineAutomorphism::identity(av.len());
    let mut dist: HashMap<ExactAffineAutomorphism, usize> = HashMap::new();
    dist.insert(identity.clone(), 0);
    let mut frontier = vec![identity];
    let mut radius = 0;
    loop {
        for (k, slot) in keys.iter().zip(found.iter_mut()) {
            if slot.is_none() {
                *slot = dist.get(k).copied();
            }
        }
        if found.iter().all(Option::is_some) || radius == opts.radius || frontier.is_empty() {
            break;
        }
        radius += 1;
        let mut next = Vec::new();
        for w in &frontier {
            for s in &letters {
                let e = w.compose(s)?.canonical(&av)?;
                if !dist.contains_key(&e) {
                    dist.insert(e.clone(), radius);
                    next.push(e);
                    if dist.len() > opts.ball_cap {
                        return Err(Error::BallCapExceeded {
                            cap: opts.ball_cap,
                            radius,
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(found
        .into_iter()
        .map(|f| match f {
            Some(length) => WordNorm::Found { length },
            None => WordNorm::NotFound {
                radius: opts.radius,
            },
        })
        .collect())
}

/// `|g|_S`, the length of a shortest word in `S ∪ S⁻¹` equal to `g`.
pub fn word_norm_bfs(
    a: &CohomologyClass,
    generators: &[ExactAffineAutomorphism],
    g: &ExactAffineAutomorphism,
    opts: &BfsOptions,
) -> Result<WordNorm> {
    Ok(word_norms_bfs(a, generators, std::slice::from_ref(g), opts)?[0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationLengthReport {
    /// `|gⁿ|_S` for `n = 1..=max_power`, `None` beyond the search radius.
    pub norms: Vec<Option<usize>>,
    pub ratios: Vec<Option<f64>>,
    /// `min_n |gⁿ|/n` over the computed powers; an upper estimate of `τ(g)` by subadditivity.
    pub estimate: Option<f64>,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_lower_bound: Option<f64>,
    /// Whether `|gⁿ| ≥ n·τ_lower` held for every computed power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent_with_certificate: Option<bool>,
}

/// Slack allowed when checking `|gⁿ| ≥ n·τ_lower`.
const CERTIFICATE_SLACK: f64 = 1e-12;

pub fn translation_length_estimate(
    a: &CohomologyClass,
    generators: &[ExactAffineAutomorphism],
    g: &ExactAffineAutomorphism,
    max_power: usize,
    certificate_lower_bound: Option<f64>,
    opts: &BfsOptions,
) -> Result<TranslationLengthReport> {
    if max_power == 0 {
        return Err(Error::InvalidParameter(
            "max_power must be at least 1".into(),
        ));
    }
    let mut powers = Vec::with_capacity(max_power);
    let mut cur = g.clone();
    for _ in 0..max_power {
        powers.push(cur.clone());
        cur = cur.compose(g)?;
    }
    let norms: Vec<Option<usize>> = word_norms_bfs(a, generators, &powers, opts)?
        .iter()
        .map(WordNorm::length)
        .collect();
    let ratios: Vec<Option<f64>> = norms
        .iter()
        .enumerate()
        .map(|(i, l)| l.map(|l| l as f64 / (i + 1) as f64))
        .collect();
    let estimate = ratios.iter().flatten().copied().reduce(f64::min);
    let consistent = certificate_lower_bound.map(|tau| {
        norms
            .iter()
            .enumerate()
            .all(|(i, l)| l.is_none_or(|l| l as f64 >= (i + 1) as f64 * tau - CERTIFICATE_SLACK))
    });
    Ok(TranslationLengthReport {
        complete: norms.iter().all(Option::is_some),
        norms,
        ratios,
        estimate,
        certificate_lower_bound,
        consistent_with_certificate: consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn setup() -> (
        CohomologyClass,
        ExactAffineAutomorphism,
        ExactAffineAutomorphism,
    ) {
        let a = CohomologyClass::integer(&[1, 0]).unwrap();
        let t1 = ExactAffineAutomorphism::fiber_translation(2, q(1, 1));
        let r = ExactAffineAutomorphism::rotation(&[q(1, 3), q(0, 1)]);
        (a, t1, r)
    }

    /// `T_1^i r^j` has `ρ = i + j/3`; with `r³ = T_1` its norm is `min |u|+|v|` over `3u + v = 3i + j`.
    fn abelian_norm(thirds: i64) -> usize {
        (-100i64..=100)
            .map(|u| (u.abs() + (thirds - 3 * u).abs()) as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn bfs_examples() {
        let (a, t1, r) = setup();
        let opts = BfsOptions::default();
        let t5 = ExactAffineAutomorphism::fiber_translation(2, q(5, 1));
        assert_eq!(
            word_norm_bfs(&a, std::slice::from_ref(&t1), &t5, &opts).unwrap(),
            WordNorm::Found { length: 5 }
        );
        let id = ExactAffineAutomorphism::identity(2);
        assert_eq!(
            word_norm_bfs(&a, std::slice::from_ref(&t1), &id, &opts).unwrap(),
            WordNorm::Found { length: 0 }
        );
        let g = ExactAffineAutomorphism::fiber_translation(2, q(2, 1))
            .compose(&r)
            .unwrap()
            .compose(&r)
            .unwrap();
        assert_eq!(
            word_norm_bfs(&a, &[t1.clone(), r.clone()], &g, &opts).unwrap(),
            WordNorm::Found { length: 4 }
        );
        let far = ExactAffineAutomorphism::fiber_translation(2, q(20, 1));
        assert_eq!(
            word_norm_bfs(&a, &[t1], &far, &opts).unwrap(),
            WordNorm::NotFound { radius: 12 }
        );
    }

    #[test]
    fn bfs_matches_abelian_oracle() {
        let (a, t1, r) = setup();
        let mut targets = Vec::new();
        let mut thirds = Vec::new();
        for i in -3i64..=3 {
            for j in 0..3 {
                let mut e = ExactAffineAutomorphism::fiber_translation(2, q(i, 1));
                for _ in 0..j {
                    e = e.compose(&r).unwrap();
                }
                targets.push(e);
                thirds.push(3 * i + j);
            }
        }
        let norms = word_norms_bfs(&a, &[t1, r], &targets, &BfsOptions::default()).unwrap();
        for (n, t) in norms.iter().zip(&thirds) {
            assert_eq!(n.length(), Some(abelian_norm(*t)), "thirds {t}");
        }
    }

    #[test]
    fn ball_cap_enforced() {
        let a = CohomologyClass::integer(&[0, 0]).unwrap();
        let gens = [
            ExactAffineAutomorphism::rotation(&[q(1, 7), q(0, 1)]),
            ExactAffineAutomorphism::rotation(&[q(0, 1), q(1, 11)]),
        ];
        let target = ExactAffineAutomorphism::fiber_translation(2, q(1, 1));
        let err = word_norm_bfs(
            &a,
            &gens,
            &target,
            &BfsOptions {
                radius: 12,
                ball_cap: 50,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::BallCapExceeded { cap: 50, .. }));
    }

    #[test]
    fn translation_length_examples() {
        let (a, t1, r) = setup();
        let opts = BfsOptions::default();
        let rep =
            translation_length_estimate(&a, std::slice::from_ref(&t1), &t1, 8, Some(1.0), &opts)
                .unwrap();
        assert_eq!(rep.norms, (1..=8).map(Some).collect::<Vec<_>>());
        assert_eq!(rep.estimate, Some(1.0));
        assert_eq!(rep.consistent_with_certificate, Some(true));

        let id = ExactAffineAutomorphism::identity(2);
        assert_eq!(
            translation_length_estimate(&a, std::slice::from_ref(&t1), &id, 3, None, &opts)
                .unwrap()
                .estimate,
            Some(0.0)
        );

        let g = t1.compose(&r).unwrap();
        let rep = translation_length_estimate(&a, &[t1, r], &g, 9, Some(4.0 / 3.0), &opts).unwrap();
        let expected: Vec<Option<usize>> = (1..=9).map(|n| Some(abelian_norm(4 * n))).collect();
        assert_eq!(rep.norms, expected);
        assert_eq!(rep.estimate, Some(4.0 / 3.0));
        assert_eq!(rep.consistent_with_certificate, Some(true));
    }
}
