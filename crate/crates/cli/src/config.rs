//! Run configuration: the spec file merged with command-line overrides.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use mvop::random::{sample_christoffel_pair, sample_uvarov_case};
use mvop::spec_file::{Kind, MassEntry, Number, SpecFile};
use mvop::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

pub const DEFAULT_DEGREE: usize = 3;
pub const DEFAULT_FLOAT_TOL: f64 = 1e-10;

/// Flags shared by every subcommand; `None` means "take it from the spec file".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub spec: Option<PathBuf>,
    pub degree: Option<usize>,
    pub backend: Option<Backend>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub masses: Vec<String>,
    pub lambda2: Option<Vec<String>>,
    pub lambda1: Option<Vec<String>>,
    pub lambda0: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: SpecFile,
    pub degree: usize,
    /// The degree when set by flag or file rather than defaulted.
    pub explicit_degree: Option<usize>,
    pub backend: Backend,
    pub tol: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn resolve(o: &Overrides, default_backend: Backend) -> Result<Self> {
        let mut spec = match &o.spec {
            Some(path) => SpecFile::from_path(path)?,
            None => SpecFile::random(2, o.seed.unwrap_or(0)),
        };
        if !o.masses.is_empty() {
            spec.masses = o
                .masses
                .iter()
                .map(|m| parse_mass(m))
                .collect::<Result<_>>()?;
        }
        if let Some(a2) = &o.lambda2 {
            spec.lambda2 = Some(numbers(a2));
        }
        if let Some(a1) = &o.lambda1 {
            spec.lambda1 = Some(numbers(a1));
        }
        if let Some(a0) = &o.lambda0 {
            spec.lambda0 = Some(Number::Text(a0.clone()));
        }
        if let Some(seed) = o.seed {
            spec.seed = Some(seed);
        }
        let backend = o.backend.unwrap_or(default_backend);
        let tol = o.tol.or(spec.tol).unwrap_or(match backend {
            Backend::Exact => 0.0,
            Backend::Float => DEFAULT_FLOAT_TOL,
        });
        let explicit_degree = o.degree.or(spec.degree);
        Ok(Self {
            degree: explicit_degree.unwrap_or(DEFAULT_DEGREE),
            explicit_degree,
            seed: spec.seed.unwrap_or(0),
            spec,
            backend,
            tol,
        })
    }

    /// For a random functional without declared masses, the first seed at or
    /// after the configured one that gives a certified two-point modification.
    pub fn with_sampled_masses(&self) -> Result<Self> {
        if self.spec.kind != Kind::Random || !self.spec.masses.is_empty() {
            return Ok(self.clone());
        }
        let (seed, sys) = sample_uvarov_case(self.spec.dim()?, self.degree, 2, self.seed);
        let mut out = self.clone();
        out.seed = seed;
        out.spec.seed = Some(seed);
        out.spec.masses = sys
            .spec()
            .points()
            .iter()
            .zip(sys.spec().masses())
            .map(|(p, m)| MassEntry {
                point: p.iter().map(text).collect(),
                lambda: text(m),
            })
            .collect();
        Ok(out)
    }

    /// For a random functional without a declared multiplier, the first seed
    /// giving a pair quasi-definite through the working degree.
    pub fn with_sampled_multiplier(&self) -> Result<Self> {
        if self.spec.kind != Kind::Random || self.spec.lambda2.is_some() {
            return Ok(self.clone());
        }
        let pair =
            sample_christoffel_pair(self.spec.dim()?, self.degree + 1, self.degree, self.seed);
        let mut out = self.clone();
        out.seed = pair.seed;
        out.spec.seed = Some(pair.seed);
        out.spec.lambda2 = Some(pair.multiplier.a2().iter().map(text).collect());
        out.spec.lambda1 = Some(pair.multiplier.a1().iter().map(text).collect());
        out.spec.lambda0 = Some(text(pair.multiplier.a0()));
        Ok(out)
    }
}

fn text(q: &Rational) -> Number {
    Number::Text(q.to_string())
}

fn numbers(values: &[String]) -> Vec<Number> {
    values
        .iter()
        .map(|v| Number::Text(v.trim().to_string()))
        .collect()
}

/// `x1,x2,...:lambda`.
fn parse_mass(flag: &str) -> Result<MassEntry> {
    let (point, lambda) = flag
        .split_once(':')
        .with_context(|| format!("mass {flag:?} must look like x1,x2:lambda"))?;
    let point: Vec<Number> = point
        .split(',')
        .map(|c| Number::Text(c.trim().to_string()))
        .collect();
    if point.iter().any(|c| c.text().is_empty()) {
        bail!("mass {flag:?} has an empty coordinate");
    }
    Ok(MassEntry {
        point,
        lambda: Number::Text(lambda.trim().to_string()),
    })
}

/// Parses a flag value in the active backend.
pub fn scalar<S: Scalar>(text: &str, what: &str) -> Result<S> {
    Number::Text(text.to_string())
        .value(what)
        .map_err(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("disk.toml");
        std::fs::write(&path, "kind = \"ball\"\nd = 2\nmu = \"1/2\"\ndegree = 5\nmasses = [{ point = [0, 0], lambda = 1 }]\n")
            .unwrap();
        let o = Overrides {
            spec: Some(path),
            degree: Some(2),
            masses: vec!["1/2,0:3".into()],
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&o, Backend::Exact).unwrap();
        assert_eq!(cfg.degree, 2);
        assert_eq!(cfg.tol, 0.0);
        let spec = cfg.spec.uvarov::<Rational>().unwrap().unwrap();
        assert_eq!(spec.masses(), &[<Rational as Scalar>::from_i64(3)]);
        assert_eq!(spec.points()[0][0], <Rational as Scalar>::from_ratio(1, 2));
    }

    #[test]
    fn malformed_masses_are_rejected() {
        assert!(parse_mass("0,0").is_err());
        assert!(parse_mass(",1:2").is_err());
    }

    #[test]
    fn random_specs_are_sampled_deterministically() {
        let o = Overrides {
            seed: Some(11),
            degree: Some(2),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&o, Backend::Exact).unwrap();
        let a = cfg.with_sampled_masses().unwrap();
        let b = cfg.with_sampled_masses().unwrap();
        assert_eq!(a.spec, b.spec);
        assert_eq!(a.spec.masses.len(), 2);
        assert!(cfg
            .with_sampled_multiplier()
            .unwrap()
            .spec
            .lambda2
            .is_some());
    }
}
