use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use mvop::christoffel::{
    build_from_connection, connection, consistency_checks, recover_multiplier, verify_pair, Check,
    Identity,
};
use mvop::spec_file::Kind;
use mvop::uvarov::UvarovSystem;
use mvop::{Error, MultiIndex, OpSystem, Scalar};

use crate::config::{scalar, RunConfig};
use crate::experiments;
use crate::table::{cell, float, Table};

/// Tables produced by a command, whether every verification passed, and
/// human-readable remarks for stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passing() -> Self {
        Self {
            passed: true,
            ..Default::default()
        }
    }

    pub fn absorb(&mut self, other: Outcome) {
        self.tables.extend(other.tables);
        self.passed &= other.passed;
        self.notes.extend(other.notes);
    }
}

fn matrix_rows<S: Scalar>(t: &mut Table, prefix: &[String], m: &mvop::Matrix<S>) {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let mut row = prefix.to_vec();
            row.extend([r.to_string(), c.to_string(), cell(&m[(r, c)])]);
            t.push(row);
        }
    }
}

pub fn build<S: Scalar>(cfg: &RunConfig) -> Result<Outcome> {
    let u = cfg.spec.functional::<S>(cfg.degree, cfg.seed)?;
    u.moment(&MultiIndex::zero(u.dim()))?;
    let ops = OpSystem::build_truncating(&u, cfg.degree, cfg.tol);
    let failed_at = match ops.failure() {
        None => None,
        Some(Error::SingularMomentMatrix { degree }) => Some(*degree),
        Some(other) => return Err(other.clone().into()),
    };

    let mut gram = Table::new("gram", &["degree", "row", "col", "value"]);
    let mut rec = Table::new(
        "recurrence",
        &["degree", "variable", "coefficient", "row", "col", "value"],
    );
    let mut verdicts = Table::new("quasi_definite", &["degree", "det(H_n)", "verdict"]);
    for n in 0..ops.len() {
        matrix_rows(&mut gram, &[n.to_string()], ops.gram(n));
        verdicts.push(vec![
            n.to_string(),
            cell(&ops.gram(n).determinant()),
            "quasi-definite".into(),
        ]);
        for i in 0..ops.dim() {
            let var = format!("x{}", i + 1);
            matrix_rows(
                &mut rec,
                &[n.to_string(), var.clone(), "B".into()],
                &ops.b(n, i)?,
            );
            if n >= 1 {
                matrix_rows(&mut rec, &[n.to_string(), var, "C".into()], &ops.c(n, i));
            }
        }
    }
    let mut out = Outcome {
        tables: Vec::new(),
        passed: failed_at.is_none(),
        notes: Vec::new(),
    };
    if let Some(n) = failed_at {
        verdicts.push(vec![n.to_string(), cell(&S::zero()), "singular".into()]);
        out.notes.push(format!(
            "build: moment matrix singular at degree {n}; the functional is not quasi-definite"
        ));
    } else {
        out.notes.push(format!(
            "build: quasi-definite through degree {}",
            cfg.degree
        ));
    }
    out.tables = vec![gram, rec, verdicts];
    Ok(out)
}

pub fn uvarov<S: Scalar>(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg
        .spec
        .uvarov::<S>()?
        .context("no point masses: declare `masses` in the spec file or pass --mass")?;
    let u = cfg.spec.functional::<S>(cfg.degree, cfg.seed)?;
    let base = OpSystem::build(&u, cfg.degree, cfg.tol).context("the unmodified functional")?;
    let sys = UvarovSystem::new(base, spec);

    let mut cert = Table::new("uvarov", &["degree", "det(I+Lambda K_{n-1})", "verdict"]);
    let mut passed = true;
    for v in sys.certify() {
        let verdict = match (v.invertible, v.gram_invertible) {
            (true, true) => "ok",
            (false, _) => "singular",
            (true, false) => "gram-singular",
        };
        passed &= verdict == "ok";
        cert.push(vec![
            v.degree.to_string(),
            cell(&v.determinant),
            verdict.into(),
        ]);
    }
    let mut out = Outcome {
        tables: vec![cert],
        passed,
        notes: Vec::new(),
    };
    match sys.first_failure() {
        Some(k) => out.notes.push(format!(
            "uvarov: I + Lambda K_{} is singular; the modified functional is not quasi-definite at degree {}",
            k as isize - 1,
            k as isize - 1
        )),
        None => {
            let mut gram = Table::new("modified_gram", &["degree", "row", "col", "value"]);
            for n in 0..=cfg.degree {
                matrix_rows(&mut gram, &[n.to_string()], &sys.modified_gram(n)?);
            }
            out.tables.push(gram);
            out.notes.push(format!("uvarov: certified through degree {}", cfg.degree));
        }
    }
    if let Some((mu, lambda)) = ball_with_origin_mass(cfg)? {
        out.absorb(experiments::uvarov_crosscheck(
            mu,
            lambda,
            cfg.degree,
            cfg.tol.max(1e-10),
        )?);
    }
    Ok(out)
}

/// `(mu, lambda)` for a disk functional with a single mass at the origin.
fn ball_with_origin_mass(cfg: &RunConfig) -> Result<Option<(f64, f64)>> {
    let spec = &cfg.spec;
    if spec.kind != Kind::Ball || spec.dim()? != 2 || spec.masses.len() != 1 {
        return Ok(None);
    }
    let mass = &spec.masses[0];
    let at_origin = mass
        .point
        .iter()
        .map(|c| c.value::<f64>("mass point"))
        .collect::<mvop::Result<Vec<f64>>>()?
        .iter()
        .all(|&c| c == 0.0);
    if !at_origin {
        return Ok(None);
    }
    let mu = spec
        .mu
        .as_ref()
        .context("kind ball needs `mu`")?
        .value("mu")?;
    Ok(Some((mu, mass.lambda.value("mass")?)))
}

fn christoffel_table(checks: &[Check], tol: f64) -> (Table, bool) {
    let mut worst: BTreeMap<(usize, Identity), (f64, bool)> = BTreeMap::new();
    for c in checks {
        let e = worst.entry((c.degree, c.identity)).or_insert((0.0, true));
        e.0 = e.0.max(c.residual);
        e.1 &= c.exact;
    }
    let mut t = Table::new("christoffel", &["degree", "equation", "residual"]);
    for ((degree, id), (residual, exact)) in &worst {
        let shown = if *exact {
            "EXACT".to_string()
        } else {
            float(*residual)
        };
        t.push(vec![degree.to_string(), id.label().into(), shown]);
    }
    (t, checks.iter().all(|c| c.passes(tol)))
}

pub fn christoffel<S: Scalar>(cfg: &RunConfig, mutate_n3: Option<&str>) -> Result<Outcome> {
    let lambda = cfg.spec.multiplier::<S>()?.context(
        "no multiplier: declare `lambda2` (and optionally `lambda1`, `lambda0`) or pass --lambda2",
    )?;
    let u_fun = cfg.spec.functional::<S>(cfg.degree + 1, cfg.seed)?;
    let u =
        OpSystem::build(&u_fun, cfg.degree + 1, cfg.tol).context("the unmodified functional")?;
    let v_fun = lambda.apply(&u_fun)?;
    let v =
        OpSystem::build(&v_fun, cfg.degree, cfg.tol).context("the modified functional lambda u")?;

    let mut out = Outcome::passing();
    match mutate_n3 {
        None => {
            let checks = verify_pair(&u, &v, &lambda)?;
            let (table, ok) = christoffel_table(&checks, cfg.tol);
            out.tables.push(table);
            out.passed = ok;

            let conn = connection(&u, &v)?;
            let recovered = recover_multiplier(&u, &conn, &v.gram(0)[(0, 0)])?;
            let mut rec = Table::new("recovery", &["coefficient", "given", "recovered"]);
            let close = |a: &S, b: &S| {
                a == b || (a.clone() - b.clone()).abs_f64() <= cfg.tol * a.abs_f64().max(1.0)
            };
            let labelled = |name: &str, a: &[S], b: &[S], rec: &mut Table, ok: &mut bool| {
                for (k, (x, y)) in a.iter().zip(b).enumerate() {
                    *ok &= close(x, y);
                    rec.push(vec![format!("{name}[{k}]"), cell(x), cell(y)]);
                }
            };
            let mut ok = true;
            labelled("lambda2", lambda.a2(), recovered.a2(), &mut rec, &mut ok);
            labelled("lambda1", lambda.a1(), recovered.a1(), &mut rec, &mut ok);
            labelled(
                "lambda0",
                &[lambda.a0().clone()],
                &[recovered.a0().clone()],
                &mut rec,
                &mut ok,
            );
            out.tables.push(rec);
            if !ok {
                out.notes
                    .push("christoffel: recovered multiplier differs from the given one".into());
            }
            out.passed &= ok;
        }
        Some(delta) => {
            let delta: S = scalar(delta, "--mutate-n3")?;
            let mut conn = connection(&u, &v)?;
            if conn.top() < 3 {
                bail!("--mutate-n3 needs --degree 3 or more");
            }
            conn.n_mut(3)[(0, 0)] += delta;
            let checks = consistency_checks(&u, &conn)?;
            let (table, ok) = christoffel_table(&checks, cfg.tol);
            out.tables.push(table);
            out.passed = ok;
            if let Some(first) = checks.iter().find(|c| !c.passes(cfg.tol)) {
                out.notes.push(format!(
                    "christoffel: mutated N_3 flagged by equation {} at degree {}",
                    first.identity.label(),
                    first.degree
                ));
            }
            if let Err(e) = build_from_connection(&u, &conn, None) {
                out.notes.push(format!(
                    "christoffel: reconstruction from the mutated connection fails: {e}"
                ));
            }
        }
    }
    if out.passed && mutate_n3.is_none() {
        out.notes.push(format!(
            "christoffel: every identity holds through degree {}",
            cfg.degree
        ));
    }
    Ok(out)
}

/// Every verification the spec supports: the base system, the Uvarov
/// modification, and the Christoffel modification.
pub fn verify_all<S: Scalar>(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = build::<S>(cfg)?;
    let with_masses = cfg.with_sampled_masses()?;
    if !with_masses.spec.masses.is_empty() {
        out.absorb(uvarov::<S>(&with_masses)?);
    } else {
        out.notes
            .push("verify-all: no point masses declared; Uvarov checks skipped".into());
    }
    let with_multiplier = cfg.with_sampled_multiplier()?;
    if with_multiplier.spec.lambda2.is_some() {
        out.absorb(christoffel::<S>(&with_multiplier, None)?);
    } else {
        out.notes
            .push("verify-all: no multiplier declared; Christoffel checks skipped".into());
    }
    Ok(out)
}
