//! TOML description of a moment functional and its modifications.
//!
//! ```toml
//! kind = "ball"          # table | ball | bessel_laguerre | product | random
//! d = 2
//! mu = "1/2"
//! masses = [{ point = ["0", "0"], lambda = "1" }]
//! lambda2 = ["-1", "0", "-1"]
//! lambda1 = ["0", "0"]
//! lambda0 = "1"
//! ```
//!
//! Numbers may be written as TOML integers, floats, or strings such as
//! `"p/q"`. A `table` functional lists its moments under `[moments]` with keys
//! `"(i,j)"`; a `product` functional lists one entry per variable under
//! `factors`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Deserialize;

use crate::christoffel::QuadraticMultiplier;
use crate::error::{Error, Result};
use crate::families::{ball, bessel_laguerre, univariate};
use crate::moments::MomentFunctional;
use crate::multiindex::MultiIndex;
use crate::scalar::{parse_rational, Scalar};
use crate::uvarov::UvarovSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Table,
    Ball,
    BesselLaguerre,
    Product,
    Random,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn text(&self) -> String {
        match self {
            Number::Int(v) => v.to_string(),
            Number::Float(v) => format!("{v:?}"),
            Number::Text(s) => s.clone(),
        }
    }

    /// Converts to the backend; floats are read through their shortest decimal form.
    pub fn value<S: Scalar>(&self, what: &str) -> Result<S> {
        let text = self.text();
        let parsed = if S::EXACT {
            parse_rational(&text).map(|q| S::from_rational(&q))
        } else {
            S::parse_scalar(&text)
        };
        parsed.ok_or_else(|| Error::Invalid(format!("{what}: cannot parse {text:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassEntry {
    pub point: Vec<Number>,
    pub lambda: Number,
}

/// One univariate factor of a product functional.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Factor {
    /// Normalized Lebesgue measure on `[-1, 1]`.
    Legendre,
    /// `t^alpha e^{-t}`, normalized.
    Laguerre { alpha: Number },
    /// Bessel functional `b^{(a,b)}`.
    Bessel { a: Number, b: Number },
    /// Explicit moments `mu_0, mu_1, ...`; missing ones are an error.
    Table { moments: Vec<Number> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub kind: Kind,
    pub d: Option<usize>,
    pub mu: Option<Number>,
    pub g: Option<Number>,
    pub gamma: Option<Number>,
    #[serde(default)]
    pub masses: Vec<MassEntry>,
    pub lambda2: Option<Vec<Number>>,
    pub lambda1: Option<Vec<Number>>,
    pub lambda0: Option<Number>,
    pub moments: Option<BTreeMap<String, Number>>,
    pub factors: Option<Vec<Factor>>,
    pub seed: Option<u64>,
    pub degree: Option<usize>,
    pub tol: Option<f64>,
}

impl SpecFile {
    /// Parses TOML; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Invalid(format!("spec file: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// A random functional with the given seed.
    pub fn random(d: usize, seed: u64) -> Self {
        Self {
            kind: Kind::Random,
            d: Some(d),
            mu: None,
            g: None,
            gamma: None,
            masses: Vec::new(),
            lambda2: None,
            lambda1: None,
            lambda0: None,
            moments: None,
            factors: None,
            seed: Some(seed),
            degree: None,
            tol: None,
        }
    }

    pub fn dim(&self) -> Result<usize> {
        let d = match self.kind {
            Kind::BesselLaguerre => 2,
            Kind::Product => self.factors.as_ref().map_or(0, Vec::len),
            _ => self.d.unwrap_or(2),
        };
        if let Some(given) = self.d {
            if given != d {
                return Err(Error::Invalid(format!(
                    "d = {given} conflicts with the {d} variables implied by the spec"
                )));
            }
        }
        if d == 0 {
            return Err(Error::Invalid(
                "functional needs at least one variable".into(),
            ));
        }
        Ok(d)
    }

    fn required<'a>(&self, field: &'a Option<Number>, name: &str) -> Result<&'a Number> {
        field
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("kind {:?} needs `{name}`", self.kind)))
    }

    pub fn bessel_laguerre_params<S: Scalar>(
        &self,
        max_degree: usize,
    ) -> Result<bessel_laguerre::Params<S>> {
        let g = self.required(&self.g, "g")?.value("g")?;
        let gamma = self.required(&self.gamma, "gamma")?.value("gamma")?;
        bessel_laguerre::Params::new(g, gamma, max_degree)
    }

    /// The base functional `u`. `max_degree` feeds parameter admissibility checks.
    pub fn functional<S: Scalar>(
        &self,
        max_degree: usize,
        seed: u64,
    ) -> Result<MomentFunctional<S>> {
        let d = self.dim()?;
        match self.kind {
            Kind::Ball => {
                let mu: S = self.required(&self.mu, "mu")?.value("mu")?;
                ball::check_parameter(&mu)?;
                Ok(ball::functional(d, &mu))
            }
            Kind::BesselLaguerre => {
                bessel_laguerre::functional(&self.bessel_laguerre_params(max_degree)?)
            }
            Kind::Random => {
                let seed = self.seed.unwrap_or(seed);
                let exact = crate::random::functional(d, seed);
                Ok(exact.map_backend(|q| S::from_rational(q)))
            }
            Kind::Table => self.table(d),
            Kind::Product => self.product(),
        }
    }

    fn table<S: Scalar>(&self, d: usize) -> Result<MomentFunctional<S>> {
        let entries = self
            .moments
            .as_ref()
            .ok_or_else(|| Error::Invalid("kind table needs a [moments] section".into()))?;
        let mut map = HashMap::new();
        for (key, value) in entries {
            let nu = parse_index(key, d)?;
            map.insert(nu, value.value(&format!("moment {key}"))?);
        }
        Ok(MomentFunctional::table(d, map))
    }

    fn product<S: Scalar>(&self) -> Result<MomentFunctional<S>> {
        let factors = self
            .factors
            .as_ref()
            .ok_or_else(|| Error::Invalid("kind product needs `factors`".into()))?;
        let parts: Vec<MomentFunctional<S>> = factors
            .iter()
            .map(factor_functional)
            .collect::<Result<_>>()?;
        let d = parts.len();
        Ok(MomentFunctional::from_fn(
            d,
            "product",
            move |nu: &MultiIndex| {
                let mut acc = S::one();
                for (k, part) in parts.iter().enumerate() {
                    acc *= part.moment(&MultiIndex::new(vec![nu.exponents()[k]]))?;
                }
                Ok(acc)
            },
        ))
    }

    /// The point masses, if any are declared.
    pub fn uvarov<S: Scalar>(&self) -> Result<Option<UvarovSpec<S>>> {
        if self.masses.is_empty() {
            return Ok(None);
        }
        let d = self.dim()?;
        let mut points = Vec::with_capacity(self.masses.len());
        let mut masses = Vec::with_capacity(self.masses.len());
        for (i, m) in self.masses.iter().enumerate() {
            let p: Vec<S> = m
                .point
                .iter()
                .map(|c| c.value(&format!("masses[{i}].point")))
                .collect::<Result<_>>()?;
            points.push(p);
            masses.push(m.lambda.value(&format!("masses[{i}].lambda"))?);
        }
        UvarovSpec::new(d, points, masses).map(Some)
    }

    /// The quadratic multiplier, if `lambda2` is present.
    pub fn multiplier<S: Scalar>(&self) -> Result<Option<QuadraticMultiplier<S>>> {
        let Some(a2) = &self.lambda2 else {
            return Ok(None);
        };
        let d = self.dim()?;
        let parse = |v: &[Number], name: &str| -> Result<Vec<S>> {
            v.iter().map(|c| c.value(name)).collect()
        };
        let a2 = parse(a2, "lambda2")?;
        let a1 = match &self.lambda1 {
            Some(v) => parse(v, "lambda1")?,
            None => vec![S::zero(); d],
        };
        let a0 = match &self.lambda0 {
            Some(v) => v.value("lambda0")?,
            None => S::zero(),
        };
        QuadraticMultiplier::new(d, a2, a1, a0).map(Some)
    }
}

fn factor_functional<S: Scalar>(f: &Factor) -> Result<MomentFunctional<S>> {
    Ok(match f {
        Factor::Legendre => {
            univariate::functional_from("legendre", |k| Ok(univariate::legendre_moment(k)))
        }
        Factor::Laguerre { alpha } => {
            let alpha: S = alpha.value("alpha")?;
            univariate::functional_from("laguerre", move |k| {
                Ok(univariate::laguerre_moment(k, &alpha))
            })
        }
        Factor::Bessel { a, b } => {
            let a: S = a.value("a")?;
            let b: S = b.value("b")?;
            univariate::functional_from("bessel", move |k| univariate::bessel_moment(k, &a, &b))
        }
        Factor::Table { moments } => {
            let values: Vec<S> = moments
                .iter()
                .map(|m| m.value("factor moment"))
                .collect::<Result<_>>()?;
            univariate::functional_from("table", move |k| {
                values
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::MissingMoment(format!("factor moment {k}")))
            })
        }
    })
}

/// Parses `"(i,j,...)"` into a multi-index of length `d`.
pub fn parse_index(key: &str, d: usize) -> Result<MultiIndex> {
    let inner = key
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Invalid(format!("moment key {key:?} must look like \"(i,j)\"")))?;
    let exps: Vec<u32> = inner
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Invalid(format!("moment key {key:?} has a non-integer exponent")))?;
    if exps.len() != d {
        return Err(Error::Invalid(format!(
            "moment key {key:?} needs {d} exponents"
        )));
    }
    Ok(MultiIndex::new(exps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn ball_with_modifications() {
        let spec = SpecFile::parse(
            r#"
            kind = "ball"
            d = 2
            mu = "1/2"
            masses = [{ point = [0, "1/2"], lambda = 2 }]
            lambda2 = [-1, 0, -1]
            lambda0 = 1
            "#,
        )
        .unwrap();
        let u: MomentFunctional<Rational> = spec.functional(4, 0).unwrap();
        assert_eq!(u.moment(&MultiIndex::new(vec![2, 0])).unwrap(), q(1, 4));
        let masses = spec.uvarov::<Rational>().unwrap().unwrap();
        assert_eq!(masses.points()[0], vec![q(0, 1), q(1, 2)]);
        let lam = spec.multiplier::<Rational>().unwrap().unwrap();
        assert_eq!(lam.a1(), &[q(0, 1), q(0, 1)]);
        let uf: MomentFunctional<f64> = spec.functional(4, 0).unwrap();
        assert_eq!(uf.moment(&MultiIndex::new(vec![2, 2])).unwrap(), 1.0 / 24.0);
    }

    #[test]
    fn table_and_product() {
        let spec = SpecFile::parse(
            r#"
            kind = "table"
            d = 2
            [moments]
            "(0,0)" = "1"
            "(1,0)" = "1/3"
            "#,
        )
        .unwrap();
        let u: MomentFunctional<Rational> = spec.functional(1, 0).unwrap();
        assert_eq!(u.moment(&MultiIndex::new(vec![1, 0])).unwrap(), q(1, 3));
        assert!(matches!(
            u.moment(&MultiIndex::new(vec![0, 1])),
            Err(Error::MissingMoment(_))
        ));

        let spec = SpecFile::parse(
            r#"
            kind = "product"
            factors = [{ family = "legendre" }, { family = "laguerre", alpha = 1 }]
            "#,
        )
        .unwrap();
        assert_eq!(spec.dim().unwrap(), 2);
        let u: MomentFunctional<Rational> = spec.functional(3, 0).unwrap();
        assert_eq!(
            u.moment(&MultiIndex::new(vec![2, 2])).unwrap(),
            q(1, 3) * q(6, 1)
        );
    }

    #[test]
    fn exact_backend_rejects_irrational_moments() {
        let spec = SpecFile::parse("kind = \"bessel_laguerre\"\ng = 1\ngamma = \"1/2\"\n").unwrap();
        match spec.functional::<Rational>(3, 0) {
            Err(Error::IrrationalMoment(name)) => assert!(name.contains("<u, 1>")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(spec.functional::<f64>(3, 0).is_ok());
    }

    #[test]
    fn parse_errors_report_location() {
        let err = SpecFile::parse("kind = \"ball\"\nmu = [\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
        assert!(SpecFile::parse("kind = \"sphere\"").is_err());
        assert!(parse_index("(1,2", 2).is_err());
        assert!(parse_index("(1,2,3)", 2).is_err());
        assert_eq!(
            parse_index("( 1, 2 )", 2).unwrap(),
            MultiIndex::new(vec![1, 2])
        );
    }
}
