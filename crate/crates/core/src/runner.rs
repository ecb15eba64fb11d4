//! Runs verification suites on scenarios and renders the reports.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::checks::{check_algebra_laws, check_functor_identities};
use crate::clifford::CliffordAlgebra;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::functor::{isometry_extension, CliffordExtension, Rescaling, Similarity};
use crate::linalg::Mat;
use crate::lipschitz::{
    check_kernel_lemma, check_lipschitz_properties, check_monoid_generated_by_v, enumerate_h, enumerate_m, g_from_m,
    kernel_of_xi, PointSet, RayGroup,
};
use crate::metric::QuadraticSpace;
use crate::ortho::{cartan_dieudonne, i_weak, reflection_subgroup};
use crate::projective::{
    build_theta, classify_scenario, distinguished_e, verify_lambda_rho_alpha, verify_rescaling, verify_sign_flip,
    verify_similarity_equivariance, verify_with_theta, ClassificationReport, ThetaMap,
};
use crate::scenario::{Scenario, Suite};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the suites listed in each scenario.
    pub suites: Option<BTreeSet<Suite>>,
    /// Overrides every other budget.
    pub budget: Option<u64>,
    pub jobs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub details: Value,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub id: String,
    pub space: String,
    pub clause: String,
    pub table: Option<String>,
    pub budget: u64,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl ScenarioReport {
    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == name)
    }

    /// Every suite whose name starts with `prefix`.
    pub fn suites_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a SuiteReport> + 'a {
        self.suites.iter().filter(move |s| s.suite.starts_with(prefix))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenarios: Vec<ScenarioReport>,
    pub passed: bool,
}

impl RunReport {
    pub fn scenario(&self, id: &str) -> Option<&ScenarioReport> {
        self.scenarios.iter().find(|s| s.id == id)
    }
}

/// Runs every scenario, in parallel up to `options.jobs`, keeping input order.
pub fn run(scenarios: &[Scenario], options: &RunOptions) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| Error::validation("jobs", e.to_string()))?;
    let reports: Vec<ScenarioReport> =
        pool.install(|| scenarios.par_iter().map(|s| run_scenario(s, options)).collect());
    let passed = reports.iter().all(|r| r.passed);
    Ok(RunReport {
        scenarios: reports,
        passed,
    })
}

pub fn run_scenario(s: &Scenario, options: &RunOptions) -> ScenarioReport {
    let budget = Budget(options.budget.or(s.budget).unwrap_or_else(|| Budget::from_env().0));
    let c = classify_scenario(&s.space);
    let suites = options.suites.clone().unwrap_or_else(|| s.suites.clone());
    let mut ctx = Context::new(&s.space, budget);
    let mut reports = Vec::new();
    for suite in suites {
        match suite {
            Suite::Rescale => {
                for c in &s.rescale {
                    reports.push(guarded(&format!("rescale({c})"), || ctx.rescale(*c)));
                }
            }
            Suite::Similarity => {
                let spec = s.similarity.as_ref();
                reports.push(guarded("similarity", || {
                    let spec = spec.ok_or_else(|| Error::validation("similarity", "no similarity given"))?;
                    ctx.similarity(&spec.target, &spec.matrix)
                }));
            }
            other => reports.push(guarded(other.name(), || ctx.suite(other))),
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    ScenarioReport {
        id: s.id.clone(),
        space: s.space.to_string(),
        clause: c.clause.to_string(),
        table: c.table.map(|t| t.to_string()),
        budget: budget.0,
        suites: reports,
        passed,
    }
}

fn guarded(name: &str, f: impl FnOnce() -> Result<(Vec<Check>, Value)>) -> SuiteReport {
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let (checks, details, error) = match outcome {
        Ok(Ok((checks, details))) => (checks, details, None),
        Ok(Err(e)) => (Vec::new(), Value::Null, Some(e.to_string())),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (Vec::new(), Value::Null, Some(format!("internal error: {msg}")))
        }
    };
    SuiteReport {
        suite: name.to_string(),
        passed: error.is_none() && checks.iter().all(|c| c.passed),
        checks,
        error,
        details,
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

/// A unit different from 1 when the field has one.
pub fn default_ratio(field: Field) -> Scalar {
    match field {
        Field::Prime(2) => field.one(),
        Field::Gf4 => Field::gf4_generator(),
        _ => field.from_i64(2),
    }
}

/// Enumerations shared between the suites of one scenario.
struct Context {
    space: QuadraticSpace,
    budget: Budget,
    alg: Option<Arc<CliffordAlgebra>>,
    m: Option<PointSet>,
    g: Option<RayGroup>,
    h: Option<RayGroup>,
    theta: Option<ThetaMap>,
    classification: Option<ClassificationReport>,
}

impl Context {
    fn new(space: &QuadraticSpace, budget: Budget) -> Self {
        Context {
            space: space.clone(),
            budget,
            alg: None,
            m: None,
            g: None,
            h: None,
            theta: None,
            classification: None,
        }
    }

    fn alg(&mut self) -> Result<Arc<CliffordAlgebra>> {
        if self.alg.is_none() {
            self.alg = Some(CliffordAlgebra::new(self.space.clone())?);
        }
        Ok(self.alg.clone().expect("set above"))
    }

    fn m(&mut self) -> Result<&PointSet> {
        if self.m.is_none() {
            let alg = self.alg()?;
            self.m = Some(enumerate_m(&alg, &self.budget)?);
        }
        Ok(self.m.as_ref().expect("set above"))
    }

    fn g(&mut self) -> Result<&RayGroup> {
        if self.g.is_none() {
            let budget = self.budget;
            let g = g_from_m(self.m()?, &budget)?;
            self.g = Some(g);
        }
        Ok(self.g.as_ref().expect("set above"))
    }

    fn h(&mut self) -> Result<&RayGroup> {
        if self.h.is_none() {
            let alg = self.alg()?;
            self.h = Some(enumerate_h(&alg, &self.budget)?);
        }
        Ok(self.h.as_ref().expect("set above"))
    }

    fn theta(&mut self) -> Result<&ThetaMap> {
        if self.theta.is_none() {
            let alg = self.alg()?;
            self.theta = Some(build_theta(&alg, &self.budget)?);
        }
        Ok(self.theta.as_ref().expect("set above"))
    }

    fn classification(&mut self) -> Result<&ClassificationReport> {
        if self.classification.is_none() {
            let budget = self.budget;
            let r = verify_with_theta(self.theta()?, &budget)?;
            self.classification = Some(r);
        }
        Ok(self.classification.as_ref().expect("set above"))
    }

    fn suite(&mut self, suite: Suite) -> Result<(Vec<Check>, Value)> {
        match suite {
            Suite::Core => self.core(),
            Suite::Lipschitz => self.lipschitz(),
            Suite::Ortho => self.ortho(),
            Suite::Theorems => self.theorems(),
            Suite::Tables => self.tables(),
            Suite::Rescale | Suite::Similarity => unreachable!("handled by the caller"),
        }
    }

    fn core(&mut self) -> Result<(Vec<Check>, Value)> {
        let alg = self.alg()?;
        let laws = check_algebra_laws(&alg, &self.budget)?;
        let mode = |exhaustive: bool| if exhaustive { "exhaustive" } else { "sampled" };
        let mut checks = vec![check(
            "algebra-laws",
            laws.holds(),
            format!("{}, {} pairs", mode(laws.exhaustive), laws.pairs),
        )];
        if let Some(odd) = laws.no_odd_units {
            checks.push(check("no-odd-units", odd, "Q(V) = {0}"));
        }
        let c = default_ratio(self.space.field());
        let ext = CliffordExtension::with_algebras(Similarity::rescaling(&self.space, c)?, alg.clone(), {
            CliffordAlgebra::new(self.space.scaled(c))?
        })?;
        let ids = check_functor_identities(&ext, &self.budget)?;
        checks.push(check(
            "functor-identities",
            ids.holds(),
            format!("c = {c}, {}, {} pairs", mode(ids.exhaustive), ids.pairs),
        ));
        Ok((checks, json!({ "algebra_laws": laws, "functor_identities": ids })))
    }

    fn lipschitz(&mut self) -> Result<(Vec<Check>, Value)> {
        let alg = self.alg()?;
        let budget = self.budget;
        let m = self.m()?.clone();
        let g = self.g()?.clone();
        let h = self.h()?.clone();
        let intersection: Vec<_> = m.rays.iter().filter(|r| h.contains(r)).cloned().collect();
        let g_is_intersection = intersection == g.rays();
        let monoid = check_monoid_generated_by_v(&alg, &m, &budget)?;
        let props = check_lipschitz_properties(&alg, &m)?;
        let ker = kernel_of_xi(&alg, &g, &budget)?;
        let lemma = check_kernel_lemma(&alg, &ker, &budget)?;
        let checks = vec![
            check(
                "point-sets",
                g_is_intersection,
                format!(
                    "|M| = {} ({} even, {} odd), |H| = {}, |G| = {}",
                    m.len(),
                    m.even().len(),
                    m.odd().len(),
                    h.len(),
                    g.len()
                ),
            ),
            check(
                "monoid",
                monoid.consistent(),
                format!(
                    "closure of V: {}, full: {}, exception: {}",
                    monoid.vector_closure,
                    monoid.full,
                    monoid.exception.map_or("none".to_string(), |e| format!("{e:?}"))
                ),
            ),
            check("properties", props.holds(), format!("{} points", props.checked)),
            check(
                "kernel-xi",
                ker.agree(),
                format!("{} even, {} odd", ker.even().len(), ker.odd().len()),
            ),
            check("kernel-lemma", lemma.holds(), format!("{lemma:?}")),
        ];
        let details = json!({
            "m": m.len(), "g": g.len(), "h": h.len(),
            "monoid": monoid, "properties": props, "kernel_lemma": lemma,
            "kernel_xi": ker.from_action,
        });
        Ok((checks, details))
    }

    fn ortho(&mut self) -> Result<(Vec<Check>, Value)> {
        let budget = self.budget;
        let space = self.space.clone();
        let theta = self.theta()?;
        let po = theta.po();
        let o = po.o_weak();
        let iw = i_weak(&space);
        let id = Mat::identity(space.field(), space.dim());
        let neg = id.neg();
        let minus_in_o = neg != id && o.contains(&neg);
        let mut checks = vec![
            check("o-weak", o.is_closed(), format!("|O'| = {}", o.len())),
            check(
                "i-weak",
                iw.consistent() && minus_in_o == (iw.order == 2),
                format!("|I'| = {}", iw.order),
            ),
            check(
                "po-weak",
                po.len() * iw.order == o.len(),
                format!("|PO'| = {}", po.len()),
            ),
            check(
                "twisted-adjoint",
                theta.xi_onto_o_weak() && theta.xi_is_homomorphism(),
                format!("{{xi_p}} = O', homomorphism on {} pairs", theta.g().len().pow(2)),
            ),
        ];
        let o = o.clone();
        let details_theta = json!({ "o_weak": o.len(), "po_weak": po.len(), "i_weak": iw });
        let cd = if space.field().is_finite() {
            let refl = reflection_subgroup(&space, &budget)?;
            let cd = cartan_dieudonne(&space, &o, &refl);
            let detail = format!(
                "|refl| = {}, |O'| = {}, exception: {}{}",
                cd.reflections,
                cd.o_weak,
                cd.exception.map_or("none".to_string(), |e| format!("{e:?}")),
                if cd.flagged { ", flagged: open question" } else { "" }
            );
            checks.push(check("cartan-dieudonne", cd.as_expected(), detail));
            Some(cd)
        } else {
            None
        };
        Ok((checks, json!({ "groups": details_theta, "cartan_dieudonne": cd })))
    }

    fn theorems(&mut self) -> Result<(Vec<Check>, Value)> {
        let alg = self.alg()?;
        let budget = self.budget;
        let r = self.classification()?.clone();
        let c = &r.classification;
        let mut checks = vec![
            check(
                "clause",
                r.matched,
                format!(
                    "{}: ker even {} (pred {}), odd {} (pred {}), theta(G0) = PO' {} (pred {})",
                    c.clause,
                    r.kernel_even,
                    c.kernel_even,
                    r.kernel_odd,
                    c.kernel_odd,
                    r.g0_image_is_po,
                    c.g0_image_is_po.map_or("-".to_string(), |b| b.to_string())
                ),
            ),
            check(
                "theta",
                r.homomorphism && r.surjective && r.kernel_routes_agree,
                format!(
                    "|G| = {}, |PO'| = {}, |ker| = {}",
                    r.g_order,
                    r.po_order,
                    r.kernel.len()
                ),
            ),
        ];
        if let Some(f) = &r.families {
            let mut ok = f.planes > 0 && f.even_included;
            if c.clause == crate::projective::Clause::Iso2D {
                ok &= f.regular_planes > 0 && f.odd_included;
            }
            checks.push(check(
                "kernel-families",
                ok,
                format!(
                    "{} radical planes, {} with a regular vector",
                    f.planes, f.regular_planes
                ),
            ));
        }
        let s = alg.space();
        let e = if s.dim() > 0 && s.field().characteristic() != 2 && s.radical().is_empty() {
            let e = distinguished_e(&alg)?;
            checks.push(check(
                "distinguished-e",
                e.basis_independent && e.xi_is_minus_id && e.commutation,
                format!("{}", e.ray),
            ));
            Some(e)
        } else {
            None
        };
        let h = self.h()?.clone();
        let g = self.g()?.clone();
        let tr = verify_lambda_rho_alpha(&alg, &h, &g, &budget)?;
        checks.push(check(
            "translations",
            tr.holds(),
            format!("{} pairs{}", tr.pairs, if tr.sampled { " (sampled)" } else { "" }),
        ));
        Ok((
            checks,
            json!({ "classification": r, "distinguished_e": e, "translations": tr }),
        ))
    }

    fn tables(&mut self) -> Result<(Vec<Check>, Value)> {
        let r = self.classification()?.clone();
        let listed = r.classification.tables();
        let mut checks: Vec<Check> = r
            .tables
            .iter()
            .map(|t| check(t.table.name(), t.bijection, "explicit bijection"))
            .collect();
        use crate::projective::TableRow;
        checks.push(check(
            "membership",
            r.injective == listed.contains(&TableRow::Table1) && r.even_bijective == listed.contains(&TableRow::Table2),
            format!(
                "theta injective {}, theta|G0 bijective {}",
                r.injective, r.even_bijective
            ),
        ));
        Ok((
            checks,
            json!({ "tables": r.tables, "primary": r.classification.table, "also_in": r.classification.also_in }),
        ))
    }

    fn rescale(&mut self, c: Scalar) -> Result<(Vec<Check>, Value)> {
        let alg = self.alg()?;
        let budget = self.budget;
        let rep = verify_rescaling(&alg, c, &budget)?;
        let resc = Rescaling::with_algebra(&alg, c)?;
        let eq = verify_similarity_equivariance(resc.forward(), &budget)?;
        let ids = check_functor_identities(resc.forward(), &budget)?;
        let mut checks = vec![
            check(
                "odot-invariants",
                rep.holds(),
                format!(
                    "filtration {}, translations {}, reversal {}, H {}, M/G {}, action {}",
                    rep.filtration, rep.translations, rep.reversal, rep.h, rep.m_and_g, rep.g_action
                ),
            ),
            check("equivariance", eq.holds(), format!("|G| = {}", eq.g_order)),
            check(
                "functor-identities",
                ids.holds(),
                format!("{} pairs{}", ids.pairs, if ids.exhaustive { "" } else { " (sampled)" }),
            ),
        ];
        let s = alg.space();
        let minus_one = -s.field().one();
        let sign_flip = if s.field() == Field::Rational && s.dim() == 1 && s.q(0) == minus_one && c == minus_one {
            let r = verify_sign_flip(s, &budget)?;
            checks.push(check(
                "sign-flip",
                r.holds(),
                format!(
                    "quotients of order {} and {}, zero divisor {}",
                    r.source_quotient_order, r.target_quotient_order, r.zero_divisor
                ),
            ));
            Some(r)
        } else {
            None
        };
        Ok((
            checks,
            json!({ "rescaling": rep, "equivariance": eq, "functor_identities": ids, "sign_flip": sign_flip }),
        ))
    }

    fn similarity(&mut self, target: &QuadraticSpace, matrix: &Mat) -> Result<(Vec<Check>, Value)> {
        let alg = self.alg()?;
        let budget = self.budget;
        let sim = Similarity::new(self.space.clone(), target.clone(), matrix.clone(), &budget)?;
        let ext = CliffordExtension::with_algebras(sim, alg, CliffordAlgebra::new(target.clone())?)?;
        let eq = verify_similarity_equivariance(&ext, &budget)?;
        let ids = check_functor_identities(&ext, &budget)?;
        let mut checks = vec![
            check(
                "equivariance",
                eq.holds(),
                format!("ratio {}, |G| = {}", eq.ratio, eq.g_order),
            ),
            check(
                "functor-identities",
                ids.holds(),
                format!("{} pairs{}", ids.pairs, if ids.exhaustive { "" } else { " (sampled)" }),
            ),
        ];
        let iso = isometry_extension(&ext)?;
        if let Some(iso) = &iso {
            checks.push(check(
                "isometry-extension",
                iso.splits && iso.multiplicative,
                format!("root {}", iso.root),
            ));
        }
        let iso_json = iso.map(|i| json!({ "root": i.root, "splits": i.splits, "multiplicative": i.multiplicative }));
        Ok((
            checks,
            json!({ "equivariance": eq, "functor_identities": ids, "isometry": iso_json }),
        ))
    }
}

pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    for s in &report.scenarios {
        let table = s.table.as_deref().unwrap_or("no table");
        let _ = writeln!(out, "== {}  {}  {}, {}", s.id, s.space, s.clause, table);
        for suite in &s.suites {
            if let Some(e) = &suite.error {
                let _ = writeln!(out, "   {:<14} {:<20} {:<5} {}", suite.suite, "-", "ERROR", e);
            }
            for c in &suite.checks {
                let verdict = if c.passed { "pass" } else { "FAIL" };
                let _ = writeln!(out, "   {:<14} {:<20} {:<5} {}", suite.suite, c.name, verdict, c.detail);
            }
        }
    }
    let failed = report.scenarios.iter().filter(|s| !s.passed).count();
    let _ = writeln!(
        out,
        "== summary: {} scenarios, {} passed, {} failed",
        report.scenarios.len(),
        report.scenarios.len() - failed,
        failed
    );
    out
}

/// One JSON record per scenario, then a summary record.
pub fn render_records(report: &RunReport) -> String {
    let mut out = String::new();
    for s in &report.scenarios {
        let _ = writeln!(out, "{}", serde_json::to_string(s).expect("serializable"));
    }
    let summary = json!({ "summary": { "scenarios": report.scenarios.len(), "passed": report.passed } });
    let _ = writeln!(out, "{summary}");
    out
}

/// Named point sets and groups of a space, each as a list of printed elements.
pub fn dump_sets(space: &QuadraticSpace, which: &[String], budget: &Budget) -> Result<Vec<(String, Vec<String>)>> {
    let alg = CliffordAlgebra::new(space.clone())?;
    let mut out = Vec::new();
    for name in which {
        let items: Vec<String> = match name.as_str() {
            "m" => enumerate_m(&alg, budget)?.rays.iter().map(|r| r.to_string()).collect(),
            "g" => crate::lipschitz::enumerate_g(&alg, budget)?
                .rays()
                .iter()
                .map(|r| r.to_string())
                .collect(),
            "h" => enumerate_h(&alg, budget)?
                .rays()
                .iter()
                .map(|r| r.to_string())
                .collect(),
            "o" => crate::ortho::enumerate_o_weak(space, budget)?
                .elements()
                .iter()
                .map(|m| m.to_string())
                .collect(),
            "po" => {
                let o = crate::ortho::enumerate_o_weak(space, budget)?;
                crate::ortho::project_to_po_weak(space, o)
                    .classes()
                    .iter()
                    .map(|m| m.to_string())
                    .collect()
            }
            other => {
                return Err(Error::validation(
                    "set",
                    format!("unknown set `{other}`, expected one of m, g, h, o, po"),
                ))
            }
        };
        out.push((name.clone(), items));
    }
    Ok(out)
}
