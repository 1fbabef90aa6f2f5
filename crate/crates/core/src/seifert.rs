//! Seifert invariants with vanishing Euler number and the homomorphism
//! `φ : π₁(X) → ℚ` that is nonzero on the fiber class `h`.
//!
//! The Euler number is `e = −Σ β_j/α_j`. Presentation of `π₁` for an
//! orientable base of genus `g`:
//! `⟨a_i, b_i, q_j, h | h central, q_j^{α_j} h^{±β_j} = 1, q_1⋯q_n [a_1,b_1]⋯[a_g,b_g] = 1⟩`,
//! where the sign in the exponent of `h` is the [`RelationConvention`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeifertData {
    pub genus: i64,
    pub pairs: Vec<(i64, i64)>,
}

impl SeifertData {
    pub fn new(genus: i64, pairs: Vec<(i64, i64)>) -> Result<Self> {
        let d = Self { genus, pairs };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.genus < 0 {
            return Err(Error::InvalidSeifert(
                "non-orientable bases (genus < 0) are not supported".into(),
            ));
        }
        if self.pairs.is_empty() {
            return Err(Error::InvalidSeifert(
                "at least one (alpha, beta) pair is required".into(),
            ));
        }
        if let Some(j) = self.pairs.iter().position(|p| p.0 == 0) {
            return Err(Error::InvalidSeifert(format!("alpha_{} is zero", j + 1)));
        }
        Ok(())
    }

    /// `α = Π α_j`.
    pub fn alpha_product(&self) -> BigInt {
        self.pairs.iter().map(|p| BigInt::from(p.0)).product()
    }

    /// `Σ β_j/α_j`.
    pub fn beta_sum(&self) -> BigRational {
        self.pairs
            .iter()
            .map(|&(a, b)| BigRational::new(b.into(), a.into()))
            .sum()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let d: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSeifertData {
    pub name: String,
    pub genus: i64,
    pub pairs: Vec<(i64, i64)>,
}

impl NamedSeifertData {
    pub fn data(&self) -> Result<SeifertData> {
        SeifertData::new(self.genus, self.pairs.clone())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Corpus {
    dataset: Vec<NamedSeifertData>,
}

/// Parse `[[dataset]]` tables with `name`, `genus` and `pairs` keys.
pub fn parse_datasets(text: &str) -> Result<Vec<NamedSeifertData>> {
    let c: Corpus = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    for d in &c.dataset {
        d.data()
            .map_err(|e| Error::Config(format!("dataset `{}`: {e}", d.name)))?;
    }
    Ok(c.dataset)
}

/// `e = −Σ β_j/α_j`.
pub fn euler_number(data: &SeifertData) -> BigRational {
    -data.beta_sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationConvention {
    /// `q_j^{α_j} h^{β_j} = 1`
    HPositive,
    /// `q_j^{α_j} = h^{β_j}`
    HNegative,
}

impl RelationConvention {
    fn sign(self) -> i64 {
        match self {
            Self::HPositive => 1,
            Self::HNegative => -1,
        }
    }
}

mod rational_strings {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| s.parse().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// Values of `φ` on the generators. Rationals serialize as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberClassHomomorphism {
    #[serde(with = "rational_strings::vec")]
    pub values_q: Vec<BigRational>,
    #[serde(with = "rational_strings")]
    pub value_h: BigRational,
    /// `φ(a_1), φ(b_1), …, φ(a_g), φ(b_g)`.
    #[serde(with = "rational_strings::vec")]
    pub values_ab: Vec<BigRational>,
    pub relation_convention: RelationConvention,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomomorphismResiduals {
    /// `α_j φ(q_j) ± β_j φ(h)`.
    #[serde(with = "rational_strings::vec")]
    pub relations: Vec<BigRational>,
    /// `Σ φ(q_j)`; commutators vanish in an abelian target.
    #[serde(with = "rational_strings")]
    pub long_relation: BigRational,
    /// `φ([h, x])` for every other generator; identically zero in `ℚ`.
    #[serde(with = "rational_strings::vec")]
    pub centrality: Vec<BigRational>,
}

impl HomomorphismResiduals {
    pub fn all_zero(&self) -> bool {
        self.relations
            .iter()
            .chain(&self.centrality)
            .all(Zero::is_zero)
            && self.long_relation.is_zero()
    }
}

/// `φ(h) = α`, `φ(q_j) = ∓α β_j/α_j` for the given convention, with no
/// check on the Euler number.
pub fn force_construct(
    data: &SeifertData,
    convention: RelationConvention,
) -> FiberClassHomomorphism {
    let alpha = BigRational::from_integer(data.alpha_product());
    let s = BigRational::from_integer((-convention.sign()).into());
    let values_q = data
        .pairs
        .iter()
        .map(|&(a, b)| &s * &alpha * BigRational::new(b.into(), a.into()))
        .collect();
    FiberClassHomomorphism {
        values_q,
        value_h: alpha,
        values_ab: vec![BigRational::zero(); 2 * data.genus.max(0) as usize],
        relation_convention: convention,
    }
}

pub fn verify_homomorphism(
    data: &SeifertData,
    phi: &FiberClassHomomorphism,
) -> Result<HomomorphismResiduals> {
    if phi.values_q.len() != data.pairs.len()
        || phi.values_ab.len() != 2 * data.genus.max(0) as usize
    {
        return Err(Error::InvalidSeifert(format!(
            "homomorphism has {} q-values and {} surface values for data with {} pairs and genus {}",
            phi.values_q.len(),
            phi.values_ab.len(),
            data.pairs.len(),
            data.genus
        )));
    }
    let s = BigRational::from_integer(phi.relation_convention.sign().into());
    let relations = data
        .pairs
        .iter()
        .zip(&phi.values_q)
        .map(|(&(a, b), q)| {
            BigRational::from_integer(a.into()) * q
                + &s * BigRational::from_integer(b.into()) * &phi.value_h
        })
        .collect();
    let long_relation = phi.values_q.iter().sum();
    let centrality = vec![BigRational::zero(); phi.values_ab.len() + phi.values_q.len()];
    Ok(HomomorphismResiduals {
        relations,
        long_relation,
        centrality,
    })
}

fn require_zero_euler(data: &SeifertData) -> Result<()> {
    data.validate()?;
    let e = euler_number(data);
    if !e.is_zero() {
        return Err(Error::NonzeroEuler {
            euler: e.to_string(),
            sum: data.beta_sum().to_string(),
        });
    }
    Ok(())
}

/// Construct `φ` under a fixed convention and verify it.
pub fn construct_h1_class_with(
    data: &SeifertData,
    convention: RelationConvention,
) -> Result<FiberClassHomomorphism> {
    require_zero_euler(data)?;
    let phi = force_construct(data, convention);
    if !verify_homomorphism(data, &phi)?.all_zero() {
        return Err(Error::Internal(format!(
            "relations fail under {convention:?} despite e = 0"
        )));
    }
    Ok(phi)
}

/// Construct `φ`, trying [`RelationConvention::HPositive`] first.
pub fn construct_h1_class(data: &SeifertData) -> Result<FiberClassHomomorphism> {
    require_zero_euler(data)?;
    for c in [RelationConvention::HPositive, RelationConvention::HNegative] {
        let phi = force_construct(data, c);
        if verify_homomorphism(data, &phi)?.all_zero() {
            debug_assert!(!phi.value_h.is_zero());
            return Ok(phi);
        }
    }
    Err(Error::Internal(
        "no sign convention satisfies the relations".into(),
    ))
}

/// `φ(h) ≠ 0` and all residuals vanish.
pub fn is_nonvanishing_on_fiber(data: &SeifertData, phi: &FiberClassHomomorphism) -> Result<bool> {
    Ok(!phi.value_h.is_zero() && verify_homomorphism(data, phi)?.all_zero())
}
