//! The torus `Tⁿ = ℝⁿ/ℤⁿ`, the flat bundle `ℝⁿ ×_{ℤⁿ} A` over it, and lifted maps.
//!
//! A point of the bundle is a pair `(x̃, k)` with `x̃ ∈ ℝⁿ` and `k ∈ A`, subject to
//! the deck relation `(x̃, k) ~ (x̃ + m, k − ⟨a, m⟩)` for `m ∈ ℤⁿ`. A homeomorphism
//! of the torus is carried by an equivariant lift `g̃(x̃ + m) = g̃(x̃) + M m`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::matrix::IntMatrix;
use crate::trig::TrigPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coefficients {
    Integer,
    Real,
}

/// A class `a ∈ H¹(Tⁿ; A)`, stored as the vector of its values on the standard loops.
///
/// The linear form `x ↦ ⟨a, x⟩` on the cover is the standard primitive of the
/// representative `α = Σ aᵢ dxᵢ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologyClass {
    kind: Coefficients,
    entries: Vec<f64>,
}

impl CohomologyClass {
    pub fn integer(entries: &[i64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidClass(
                "class must have at least one entry".into(),
            ));
        }
        Ok(Self {
            kind: Coefficients::Integer,
            entries: entries.iter().map(|&v| v as f64).collect(),
        })
    }

    pub fn real(entries: &[f64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidClass(
                "class must have at least one entry".into(),
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidClass("non-finite entry".into()));
        }
        Ok(Self {
            kind: Coefficients::Real,
            entries: entries.to_vec(),
        })
    }

    /// Validating constructor for deserialized data.
    pub fn new(kind: Coefficients, entries: Vec<f64>) -> Result<Self> {
        match kind {
            Coefficients::Integer => {
                if entries
                    .iter()
                    .any(|v| v.fract() != 0.0 || v.abs() > 2f64.powi(53))
                {
                    return Err(Error::InvalidClass(
                        "integer class has non-integral entries".into(),
                    ));
                }
                let ints: Vec<i64> = entries.iter().map(|&v| v as i64).collect();
                Self::integer(&ints)
            }
            Coefficients::Real => Self::real(&entries),
        }
    }

    pub fn kind(&self) -> Coefficients {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entries as exact integers, when every entry is integral.
    pub fn integer_entries(&self) -> Option<Vec<i64>> {
        self.entries
            .iter()
            .map(|&v| (v.fract() == 0.0 && v.abs() <= 2f64.powi(53)).then_some(v as i64))
            .collect()
    }

    /// `⟨a, v⟩`.
    pub fn pair(&self, v: &[f64]) -> f64 {
        self.entries.iter().zip(v).map(|(a, x)| a * x).sum()
    }

    pub fn pair_int(&self, m: &[i64]) -> f64 {
        self.entries.iter().zip(m).map(|(a, &x)| a * x as f64).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    /// Positive generator `d` of the period lattice `⟨a, ℤⁿ⟩ = dℤ`, when `a` is integral and nonzero.
    pub fn period_generator(&self) -> Option<i64> {
        let ints = self.integer_entries()?;
        let g = ints.iter().fold(0i64, |g, &v| num_integer::gcd(g, v));
        (g != 0).then_some(g)
    }
}

/// Reduce a real into `[0, 1)`, returning `(fractional part, integer shift)`.
pub(crate) fn reduce_unit(x: f64) -> (f64, i64) {
    let fl = x.floor();
    let mut r = x - fl;
    let mut m = fl as i64;
    if r >= 1.0 {
        r = 0.0;
        m += 1;
    }
    (r, m)
}

/// A point of `Tⁿ` with coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: &[f64]) -> Self {
        Self {
            coords: coords.iter().map(|&c| reduce_unit(c).0).collect(),
        }
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Sup-norm distance on the torus.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        torus_distance(&self.coords, &other.coords)
    }
}

pub(crate) fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(1.0);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

/// A point `[x̃, k]` of the bundle `ℝⁿ ×_{ℤⁿ} A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundlePoint {
    pub cover: Vec<f64>,
    pub fiber: f64,
}

impl BundlePoint {
    pub fn new(cover: &[f64], fiber: f64) -> Self {
        Self {
            cover: cover.to_vec(),
            fiber,
        }
    }

    pub fn base(&self) -> TorusPoint {
        TorusPoint::new(&self.cover)
    }

    /// The fiber translation `T_r`.
    pub fn translate_fiber(&self, r: f64) -> Self {
        Self {
            cover: self.cover.clone(),
            fiber: self.fiber + r,
        }
    }
}

/// Representative of `p` with cover point in `[0,1)ⁿ`.
pub fn canonicalize(a: &CohomologyClass, p: &BundlePoint) -> Result<BundlePoint> {
    check_dim(a.dim(), p.cover.len())?;
    let mut shift = Vec::with_capacity(p.cover.len());
    let cover = p
        .cover
        .iter()
        .map(|&c| {
            let (r, m) = reduce_unit(c);
            shift.push(m);
            r
        })
        .collect();
    Ok(BundlePoint {
        cover,
        fiber: p.fiber + a.pair_int(&shift),
    })
}

type Evaluator = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type Derivative = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
type InverseBuilder = Arc<dyn Fn() -> LiftedMap + Send + Sync>;

/// A homeomorphism of `Tⁿ` given by an equivariant lift to `ℝⁿ`.
#[derive(Clone)]
pub struct LiftedMap {
    dim: usize,
    matrix: IntMatrix,
    family: String,
    params: Vec<(String, f64)>,
    lipschitz_bound: Option<f64>,
    displacement_lipschitz: Option<f64>,
    eval: Evaluator,
    derivative: Option<Derivative>,
    inverse: Option<InverseBuilder>,
}

impl fmt::Debug for LiftedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiftedMap")
            .field("family", &self.family)
            .field("params", &self.params)
            .field("matrix", &self.matrix)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .finish()
    }
}

impl LiftedMap {
    /// A map from an arbitrary evaluator. `lipschitz_bound` is a sup-norm
    /// Lipschitz constant of the lift, if known.
    pub fn custom<F>(
        family: &str,
        matrix: IntMatrix,
        lipschitz_bound: Option<f64>,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if !matrix.is_unimodular() {
            return Err(Error::InvalidMatrix(format!(
                "determinant {} is not ±1",
                matrix.det()
            )));
        }
        Ok(Self {
            dim: matrix.dim(),
            matrix,
            family: family.to_string(),
            params: Vec::new(),
            lipschitz_bound,
            displacement_lipschitz: lipschitz_bound.map(|l| 1.0 + l),
            eval: Arc::new(f),
            derivative: None,
            inverse: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            dim: n,
            matrix: IntMatrix::identity(n),
            family: "identity".into(),
            params: Vec::new(),
            lipschitz_bound: Some(1.0),
            displacement_lipschitz: Some(0.0),
            eval: Arc::new(|x: &[f64]| x.to_vec()),
            derivative: Some(Arc::new(|_: &[f64], w: &[f64]| w.to_vec())),
            inverse: Some(Arc::new(move || LiftedMap::identity(n))),
        }
    }

    /// Rigid rotation `x̃ ↦ x̃ + v`.
    pub fn rotation(v: &[f64]) -> Result<Self> {
        if v.is_empty() || v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "rotation vector must be nonempty and finite".into(),
            ));
        }
        let shift = v.to_vec();
        let neg: Vec<f64> = v.iter().map(|c| -c).collect();
        let n = v.len();
        Ok(Self {
            dim: n,
            matrix: IntMatrix::identity(n),
            family: "rotation".into(),
            params: indexed_params("shift", v),
            lipschitz_bound: Some(1.0),
            displacement_lipschitz: Some(0.0),
            eval: Arc::new(move |x: &[f64]| x.iter().zip(&shift).map(|(a, b)| a + b).collect()),
            derivative: Some(Arc::new(|_: &[f64], w: &[f64]| w.to_vec())),
            inverse: Some(Arc::new(move || {
                LiftedMap::rotation(&neg).expect("negated rotation is valid")
            })),
        })
    }

    /// Affine map `x̃ ↦ M x̃ + v` with `M ∈ GL(n, ℤ)`.
    pub fn affine(matrix: IntMatrix, v: &[f64]) -> Result<Self> {
        check_dim(matrix.dim(), v.len())?;
        if !matrix.is_unimodular() {
            return Err(Error::InvalidMatrix(format!(
                "determinant {} is not ±1",
                matrix.det()
            )));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite translation".into()));
        }
        let inv = matrix.inverse()?;
        let inv_shift: Vec<f64> = inv.apply_f64(v).into_iter().map(|c| -c).collect();
        let mut params = indexed_params("translation", v);
        for (i, row) in matrix.rows().iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                params.push((format!("m{i}{j}"), e as f64));
            }
        }
        let (m_eval, m_der, shift) = (matrix.clone(), matrix.clone(), v.to_vec());
        Ok(Self {
            dim: matrix.dim(),
            lipschitz_bound: Some(matrix.inf_norm()),
            displacement_lipschitz: Some(matrix.inf_norm_minus_identity()),
            family: "affine".into(),
            params,
            eval: Arc::new(move |x: &[f64]| {
                m_eval
                    .apply_f64(x)
                    .into_iter()
                    .zip(&shift)
                    .map(|(a, b)| a + b)
                    .collect()
            }),
            derivative: Some(Arc::new(move |_: &[f64], w: &[f64]| m_der.apply_f64(w))),
            inverse: Some(Arc::new(move || {
                LiftedMap::affine(inv.clone(), &inv_shift)
                    .expect("inverse of unimodular affine map")
            })),
            matrix,
        })
    }

    /// Arnold circle family `x ↦ x + ω + (K/2π) sin 2πx`; a homeomorphism for `|K| ≤ 1`.
    pub fn arnold(omega: f64, coupling: f64) -> Result<Self> {
        if !(omega.is_finite() && coupling.is_finite()) || coupling.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "Arnold map needs finite ω and |K| ≤ 1, got ω={omega}, K={coupling}"
            )));
        }
        let amp = coupling / TAU;
        Ok(Self {
            dim: 1,
            matrix: IntMatrix::identity(1),
            family: "arnold".into(),
            params: vec![("omega".into(), omega), ("coupling".into(), coupling)],
            lipschitz_bound: Some(1.0 + coupling.abs()),
            displacement_lipschitz: Some(coupling.abs()),
            eval: Arc::new(move |x: &[f64]| vec![x[0] + omega + amp * (TAU * x[0]).sin()]),
            derivative: Some(Arc::new(move |x: &[f64], w: &[f64]| {
                vec![(1.0 + coupling * (TAU * x[0]).cos()) * w[0]]
            })),
            inverse: Some(Arc::new(move || arnold_inverse(omega, coupling))),
        })
    }

    /// Sinusoidal shear `(x, y) ↦ (x + ε sin 2πy, y)` on `T²`.
    pub fn sinusoidal_shear(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::InvalidParameter("non-finite shear amplitude".into()));
        }
        Ok(Self {
            dim: 2,
            matrix: IntMatrix::identity(2),
            family: "sinusoidal-shear".into(),
            params: vec![("epsilon".into(), epsilon)],
            lipschitz_bound: Some(1.0 + TAU * epsilon.abs()),
            displacement_lipschitz: Some(TAU * epsilon.abs()),
            eval: Arc::new(move |x: &[f64]| vec![x[0] + epsilon * (TAU * x[1]).sin(), x[1]]),
            derivative: Some(Arc::new(move |x: &[f64], w: &[f64]| {
                vec![w[0] + TAU * epsilon * (TAU * x[1]).cos() * w[1], w[1]]
            })),
            inverse: Some(Arc::new(move || {
                LiftedMap::sinusoidal_shear(-epsilon).expect("negated shear is valid")
            })),
        })
    }

    /// Skew product `(x, y) ↦ (x + ω, y + c(x))` on `T²`.
    pub fn skew_product(omega: f64, c: TrigPolynomial) -> Result<Self> {
        check_dim(1, c.dim())?;
        if !omega.is_finite() {
            return Err(Error::InvalidParameter("non-finite skew rotation".into()));
        }
        let lc = c.lipschitz();
        let mut params = vec![("omega".into(), omega), ("c0".into(), c.constant_term())];
        for t in c.terms() {
            params.push((format!("cos{}", t.freq[0]), t.cos));
            params.push((format!("sin{}", t.freq[0]), t.sin));
        }
        let (ce, cd, ci) = (c.clone(), c.clone(), c);
        Ok(Self {
            dim: 2,
            matrix: IntMatrix::identity(2),
            family: "skew-product".into(),
            params,
            lipschitz_bound: Some(1.0 + lc),
            displacement_lipschitz: Some(lc),
            eval: Arc::new(move |x: &[f64]| vec![x[0] + omega, x[1] + ce.eval(&x[..1])]),
            derivative: Some(Arc::new(move |x: &[f64], w: &[f64]| {
                vec![w[0], w[1] + cd.derivative(&x[..1], &w[..1])]
            })),
            inverse: Some(Arc::new(move || skew_inverse(omega, ci.clone()))),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    /// Sup-norm Lipschitz constant of the displacement `g̃ − id`.
    pub fn displacement_lipschitz(&self) -> Option<f64> {
        self.displacement_lipschitz
    }

    pub fn with_lipschitz_bound(mut self, bound: f64) -> Self {
        self.lipschitz_bound = Some(bound);
        let from_bound = 1.0 + bound;
        self.displacement_lipschitz = Some(
            self.displacement_lipschitz
                .map_or(from_bound, |d| d.min(from_bound)),
        );
        self
    }

    pub fn with_derivative<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(f));
        self
    }

    pub fn with_inverse<F>(mut self, f: F) -> Self
    where
        F: Fn() -> LiftedMap + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(f));
        self
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    /// `Dg̃(x)·w`, or `None` if no analytic derivative is registered.
    pub fn derivative(&self, x: &[f64], w: &[f64]) -> Option<Vec<f64>> {
        self.derivative.as_ref().map(|d| d(x, w))
    }

    pub fn inverse(&self) -> Result<LiftedMap> {
        self.inverse
            .as_ref()
            .map(|b| b())
            .ok_or_else(|| Error::NoInverse(self.family.clone()))
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LiftedMap) -> Result<LiftedMap> {
        check_dim(self.dim, other.dim)?;
        let (g, h) = (self.clone(), other.clone());
        let lip = self
            .lipschitz_bound
            .zip(other.lipschitz_bound)
            .map(|(a, b)| a * b);
        // (g∘h − id) = (g − id)∘h + (h − id)
        let disp = match (self.displacement_lipschitz, other.displacement_lipschitz) {
            (Some(dg), Some(dh)) => Some(dg * other.lipschitz_bound.unwrap_or(1.0 + dh) + dh),
            _ => None,
        };
        let derivative: Option<Derivative> = match (&self.derivative, &other.derivative) {
            (Some(dg), Some(dh)) => {
                let (dg, dh, h_eval) = (dg.clone(), dh.clone(), other.eval.clone());
                Some(Arc::new(move |x: &[f64], w: &[f64]| {
                    dg(&h_eval(x), &dh(x, w))
                }))
            }
            _ => None,
        };
        let inverse: Option<InverseBuilder> = match (&self.inverse, &other.inverse) {
            (Some(gi), Some(hi)) => {
                let (gi, hi) = (gi.clone(), hi.clone());
                Some(Arc::new(move || {
                    hi().compose(&gi()).expect("inverse dimensions agree")
                }))
            }
            _ => None,
        };
        let (ge, he) = (g.eval.clone(), h.eval.clone());
        Ok(LiftedMap {
            dim: self.dim,
            matrix: self.matrix.mul(&other.matrix),
            family: format!("({})∘({})", g.family, h.family),
            params: Vec::new(),
            lipschitz_bound: lip,
            displacement_lipschitz: disp,
            eval: Arc::new(move |x: &[f64]| ge(&he(x))),
            derivative,
            inverse,
        })
    }

    /// `self^k` for `k ≥ 0`; negative powers go through the inverse.
    pub fn power(&self, k: i64) -> Result<LiftedMap> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = LiftedMap::identity(self.dim);
        for _ in 0..k.unsigned_abs() {
            out = base.compose(&out)?;
        }
        Ok(out)
    }
}

fn indexed_params(name: &str, v: &[f64]) -> Vec<(String, f64)> {
    v.iter()
        .enumerate()
        .map(|(i, &c)| (format!("{name}{i}"), c))
        .collect()
}

/// Solve `y = x + ω + (K/2π) sin 2πx` for `x` by bracketed Newton iteration.
fn arnold_inverse(omega: f64, coupling: f64) -> LiftedMap {
    let amp = coupling / TAU;
    let eval = move |y: &[f64]| {
        let target = y[0] - omega;
        // |x - target| ≤ |amp|, and the forward map is nondecreasing.
        let (mut lo, mut hi) = (target - amp.abs() - 1e-12, target + amp.abs() + 1e-12);
        let mut x = target;
        for _ in 0..200 {
            let f = x + amp * (TAU * x).sin() - target;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = 1.0 + coupling * (TAU * x).cos();
            let newton = x - f / d;
            x = if d > 1e-3 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        vec![x]
    };
    LiftedMap {
        dim: 1,
        matrix: IntMatrix::identity(1),
        family: "arnold-inverse".into(),
        params: vec![("omega".into(), omega), ("coupling".into(), coupling)],
        lipschitz_bound: (coupling.abs() < 1.0).then(|| 1.0 / (1.0 - coupling.abs())),
        displacement_lipschitz: (coupling.abs() < 1.0)
            .then(|| coupling.abs() / (1.0 - coupling.abs())),
        eval: Arc::new(eval),
        derivative: None,
        inverse: Some(Arc::new(move || {
            LiftedMap::arnold(omega, coupling).expect("valid Arnold parameters")
        })),
    }
}

fn skew_inverse(omega: f64, c: TrigPolynomial) -> LiftedMap {
    let lc = c.lipschitz();
    let (ce, cd, cf) = (c.clone(), c.clone(), c);
    LiftedMap {
        dim: 2,
        matrix: IntMatrix::identity(2),
        family: "skew-product-inverse".into(),
        params: vec![("omega".into(), omega)],
        lipschitz_bound: Some(1.0 + lc),
        displacement_lipschitz: Some(lc),
        eval: Arc::new(move |x: &[f64]| {
            let u = x[0] - omega;
            vec![u, x[1] - ce.eval(&[u])]
        }),
        derivative: Some(Arc::new(move |x: &[f64], w: &[f64]| {
            vec![w[0], w[1] - cd.derivative(&[x[0] - omega], &w[..1])]
        })),
        inverse: Some(Arc::new(move || {
            LiftedMap::skew_product(omega, cf.clone()).expect("valid skew product")
        })),
    }
}

/// Whether `g` preserves `a`, i.e. `Mᵀ a = a`.
///
/// Integral classes are compared in exact integer arithmetic; real classes up
/// to a relative rounding tolerance of `1e-12`.
pub fn preserves_class(g: &LiftedMap, a: &CohomologyClass) -> Result<bool> {
    check_dim(a.dim(), g.dim())?;
    if let Some(ints) = a.integer_entries() {
        return Ok(g.matrix.transpose_apply_i64(&ints) == ints);
    }
    let image = g.matrix.transpose_apply_f64(a.entries());
    let scale = 1.0 + a.l1_norm() * g.matrix.inf_norm();
    Ok(image
        .iter()
        .zip(a.entries())
        .all(|(u, v)| (u - v).abs() <= 1e-12 * scale))
}

pub(crate) fn require_preserves(g: &LiftedMap, a: &CohomologyClass) -> Result<()> {
    if preserves_class(g, a)? {
        Ok(())
    } else {
        Err(Error::ClassNotPreserved {
            map: g.family.clone(),
        })
    }
}

/// Residual above which an equivariance report is flagged as failed.
pub const EQUIVARIANCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

/// Sample `|g̃(x̃+m) − g̃(x̃) − Mm|_∞` over random `x̃ ∈ [-2,2]ⁿ`, `m ∈ {-3..3}ⁿ`.
pub fn check_equivariance(g: &LiftedMap, samples: usize) -> Result<EquivarianceReport> {
    check_equivariance_seeded(g, samples, 0x5eed)
}

pub fn check_equivariance_seeded(
    g: &LiftedMap,
    samples: usize,
    seed: u64,
) -> Result<EquivarianceReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "at least one sample is required".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let m: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
        let shifted: Vec<f64> = x.iter().zip(&m).map(|(a, &b)| a + b as f64).collect();
        let lhs = g.apply(&shifted);
        let base = g.apply(&x);
        let mm = g.matrix.apply_i64(&m);
        for i in 0..n {
            worst = worst.max((lhs[i] - base[i] - mm[i] as f64).abs());
        }
    }
    Ok(EquivarianceReport {
        samples,
        max_residual: worst,
        passed: worst <= EQUIVARIANCE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shear() -> LiftedMap {
        LiftedMap::affine(
            IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap(),
            &[0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let a = CohomologyClass::integer(&[1, 0]).unwrap();
        let p = canonicalize(&a, &BundlePoint::new(&[1.25, 0.7], 0.0)).unwrap();
        assert_eq!(p.cover, vec![0.25, 0.7]);
        assert_eq!(p.fiber, 1.0);

        let q = canonicalize(&a, &BundlePoint::new(&[0.25, 0.7], 3.0)).unwrap();
        assert_eq!(q, BundlePoint::new(&[0.25, 0.7], 3.0));

        let b = CohomologyClass::integer(&[2, 5]).unwrap();
        let r = canonicalize(&b, &BundlePoint::new(&[1.0, 1.0], 0.0)).unwrap();
        assert_eq!(r, BundlePoint::new(&[0.0, 0.0], 7.0));
        // re-expanding with m = (1,1) recovers the input
        assert_eq!(r.fiber - b.pair_int(&[1, 1]), 0.0);
    }

    #[test]
    fn canonicalize_rejects_dimension_mismatch() {
        let a = CohomologyClass::integer(&[1]).unwrap();
        assert!(matches!(
            canonicalize(&a, &BundlePoint::new(&[0.1, 0.2], 0.0)),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn canonicalize_handles_tiny_negative() {
        let a = CohomologyClass::integer(&[3]).unwrap();
        let p = canonicalize(&a, &BundlePoint::new(&[-1e-18], 0.0)).unwrap();
        assert!(p.cover[0] >= 0.0 && p.cover[0] < 1.0);
        let q = canonicalize(&a, &p).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn preserves_class_examples() {
        let g = shear();
        assert!(preserves_class(&g, &CohomologyClass::integer(&[1, 0]).unwrap()).unwrap());
        assert!(!preserves_class(&g, &CohomologyClass::integer(&[0, 1]).unwrap()).unwrap());
        let id = LiftedMap::identity(2);
        assert!(preserves_class(&id, &CohomologyClass::real(&[0.3, -1.7]).unwrap()).unwrap());
    }

    #[test]
    fn equivariance_examples() {
        let rot = LiftedMap::rotation(&[0.3, 0.1]).unwrap();
        assert!(check_equivariance(&rot, 200).unwrap().max_residual <= 1e-15);
        assert!(check_equivariance(&shear(), 200).unwrap().max_residual <= 1e-12);

        // shear evaluator declared with the identity matrix
        let wrong = LiftedMap::custom("bad-shear", IntMatrix::identity(2), None, |x: &[f64]| {
            vec![x[0], x[1] + x[0]]
        })
        .unwrap();
        let rep = check_equivariance(&wrong, 200).unwrap();
        assert!(rep.max_residual >= 1.0);
        assert!(!rep.passed);
    }

    #[test]
    fn builtin_families_are_equivariant() {
        let c = TrigPolynomial::fourier_1d(0.3, &[0.05], &[0.1]).unwrap();
        let maps = vec![
            LiftedMap::identity(3),
            LiftedMap::rotation(&[0.61803398875, 0.2]).unwrap(),
            shear(),
            LiftedMap::affine(
                IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap(),
                &[0.1, 0.4],
            )
            .unwrap(),
            LiftedMap::arnold(0.2, 0.9).unwrap(),
            LiftedMap::sinusoidal_shear(0.1).unwrap(),
            LiftedMap::skew_product(0.3819660113, c).unwrap(),
        ];
        for g in maps {
            let rep = check_equivariance(&g, 1000).unwrap();
            assert!(
                rep.max_residual <= 1e-12,
                "{}: {}",
                g.family(),
                rep.max_residual
            );
        }
    }

    #[test]
    fn inverses_undo_maps() {
        let c = TrigPolynomial::fourier_1d(0.3, &[], &[0.1]).unwrap();
        let maps = vec![
            LiftedMap::rotation(&[0.3, 0.1]).unwrap(),
            LiftedMap::affine(
                IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap(),
                &[0.1, 0.4],
            )
            .unwrap(),
            LiftedMap::sinusoidal_shear(0.1).unwrap(),
            LiftedMap::skew_product(0.4, c).unwrap(),
        ];
        for g in maps {
            let gi = g.inverse().unwrap();
            let x = [0.37, -1.2];
            let y = gi.apply(&g.apply(&x));
            assert!(
                (y[0] - x[0]).abs() < 1e-12 && (y[1] - x[1]).abs() < 1e-12,
                "{}",
                g.family()
            );
        }
        let arnold = LiftedMap::arnold(0.13, 0.95).unwrap();
        let inv = arnold.inverse().unwrap();
        for x in [-0.7, 0.0, 0.25, 0.5, 3.3] {
            assert!((inv.apply(&arnold.apply(&[x]))[0] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn arnold_rejects_non_homeomorphism() {
        assert!(LiftedMap::arnold(0.1, 1.5).is_err());
    }

    #[test]
    fn composition_matrix_and_closure() {
        let a = CohomologyClass::integer(&[1, 0]).unwrap();
        let g = shear();
        let h = LiftedMap::affine(
            IntMatrix::from_rows(&[vec![1, 0], vec![3, 1]]).unwrap(),
            &[0.5, 0.25],
        )
        .unwrap();
        let gh = g.compose(&h).unwrap();
        assert_eq!(gh.matrix().rows(), vec![vec![1, 0], vec![4, 1]]);
        assert!(preserves_class(&gh, &a).unwrap());
        assert!(check_equivariance(&gh, 100).unwrap().passed);
    }
}
