//! Named check suites driven by a [`RunConfig`], and the JSON-lines report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{RunConfig, Suite};
use crate::connection::checks::{flatness_suite, simplicial_suite, ConnectionSetup};
use crate::error::Result;
use crate::fmod;
use crate::holonomy::checks::{holonomy_suite, HolonomySetup};
use crate::report::CheckRecord;
use crate::schottky::checks::forms_suite;
use crate::tgn::{self, Bounds, GradedQuotient, SimplicialMap};

fn guarded(suite: Suite, check: &str, inst: Value, r: Result<Vec<CheckRecord>>) -> Vec<CheckRecord> {
    r.unwrap_or_else(|e| vec![CheckRecord::errored(suite.name(), check, inst, &e.to_string())])
}

pub fn algebra_suite(g: usize, n: usize, degree: usize) -> Result<Vec<CheckRecord>> {
    let b = Bounds::with_total(degree, degree, degree);
    let tq = GradedQuotient::tgn(g, n, b)?;
    let mut out = vec![tgn::check_derived_relations(&tq), tgn::check_semidirect(&tq)];
    if n >= 2 {
        let source = GradedQuotient::tgn(g, n - 1, b)?;
        let map = SimplicialMap::new(&source, &tq)?;
        out.push(tgn::check_simplicial_well_defined(&map));
        for a in 1..=g {
            // (ad x)^k y has bidegree (k, 1)
            for k in [1, 2].into_iter().filter(|k| b.contains(*k, 1)) {
                out.push(tgn::check_coproduct_lemma(&map, a, k));
            }
        }
    }
    Ok(out)
}

/// Quotients built by the module suite may be larger than the library
/// default: at `(g, n) = (2, 4)` the bidegree (3, 2) slice has 75040 free
/// brackets.
pub const MODULES_SIZE_CAP: usize = 400_000;

type Job = Box<dyn Fn() -> Result<CheckRecord> + Send + Sync>;

/// Module checks at x-degree `degree` (exact sequences), `degree − 1`
/// (decompositions and property (P)) and `degree − 2` (kernel of the
/// multiplication map on `V_i ⊗ V_j`). A job that errors becomes a failing
/// record of its own.
pub fn modules_suite(g: usize, n: usize, degree: usize) -> Result<Vec<CheckRecord>> {
    let gr = degree.saturating_sub(1);
    let quotient = move |p: usize| GradedQuotient::tgn_capped(g, n, Bounds::new(p + 1, 2), MODULES_SIZE_CAP);
    let mut jobs: Vec<(&str, Job)> = vec![
        ("module_dims", Box::new(move || Ok(fmod::check_module_dims(g, n, degree)))),
        ("exact_sequences", Box::new(move || Ok(fmod::check_exact_sequences(g, n, degree)))),
        ("gr_decomposition", Box::new(move || Ok(fmod::check_gr_decomposition(&quotient(gr)?, gr)))),
        ("y_filtration", Box::new(move || Ok(fmod::check_y_filtration(g, n, gr)))),
    ];
    if n >= 2 {
        jobs.push((
            "property_P",
            Box::new(move || Ok(fmod::check_property_p(&fmod::module_mij(g, n, 1, 2, degree)?, 1, 2, gr))),
        ));
        jobs.push((
            "property_P",
            Box::new(move || {
                let t = fmod::module_m(g, n, 1, degree)?.tensor(&fmod::module_mij(g, n, 1, 2, degree)?);
                Ok(fmod::check_property_p(&t, 1, 2, gr))
            }),
        ));
        let pa = degree.saturating_sub(2);
        jobs.push(("prop_alg", Box::new(move || Ok(fmod::check_prop_alg(&quotient(pa)?, 1, 2, pa)))));
    }
    if n >= 3 {
        jobs.push((
            "property_P",
            Box::new(move || Ok(fmod::check_property_p(&fmod::module_mijk(g, n, [1, 2, 3], degree)?, 1, 2, gr))),
        ));
    }
    let inst = json!({ "g": g, "n": n, "degree": degree });
    Ok(jobs
        .par_iter()
        .map(|(name, job)| job().unwrap_or_else(|e| CheckRecord::errored("modules", name, inst.clone(), &e.to_string())))
        .collect())
}

fn run_one(config: &RunConfig, suite: Suite) -> Vec<CheckRecord> {
    let (g, n) = (config.g, config.n);
    let inst = json!({ "g": g, "n": n });
    let curve = match config.curve() {
        Ok(c) => c,
        Err(e) => return vec![CheckRecord::errored(suite.name(), "setup", inst, &e.to_string())],
    };
    let connection = || {
        let mut s = ConnectionSetup::new(curve.clone(), n, Bounds::new(config.pmax, config.qmax), config.seed);
        s.tuples = config.tuples;
        s
    };
    let r = match suite {
        Suite::Algebra => algebra_suite(g, n, config.algebra_degree),
        Suite::Modules => modules_suite(g, n, config.module_degree),
        Suite::Forms => forms_suite(&curve, config.seed),
        Suite::Flatness => flatness_suite(&connection()),
        Suite::Simplicial => simplicial_suite(&connection()),
        Suite::Holonomy => {
            let mut s = HolonomySetup::new(curve.clone(), n, config.order);
            s.options = config.transport_options();
            holonomy_suite(&s)
        }
        Suite::All => unreachable!("expanded by the caller"),
    };
    guarded(suite, "setup", inst, r)
}

/// Runs the selected suites in report order. Numeric records are re-judged
/// with the configured safety factor.
pub fn run_suites(config: &RunConfig) -> Result<Vec<CheckRecord>> {
    config.validate()?;
    let mut out = Vec::new();
    for suite in config.suite.expand() {
        if suite == Suite::Simplicial && config.n < 2 {
            continue;
        }
        out.extend(run_one(config, suite));
    }
    apply_safety(&mut out, config.safety);
    Ok(out)
}

/// Numeric records (positive budget) additionally need `residual < budget × safety`.
pub fn apply_safety(records: &mut [CheckRecord], safety: f64) {
    for r in records {
        if r.budget > 0.0 {
            r.pass = r.pass && r.residual < r.budget * safety;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunSummary {
    pub summary: bool,
    pub suite: Suite,
    pub config: RunConfig,
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<String>,
    pub exit_code: i32,
    /// seconds since the epoch; the only field allowed to differ between reruns
    pub timestamp: Option<u64>,
}

impl RunSummary {
    pub fn new(config: &RunConfig, records: &[CheckRecord], timestamp: Option<u64>) -> Self {
        let s = crate::report::summarize(records);
        Self {
            summary: true,
            suite: config.suite,
            config: config.clone(),
            total: s.total,
            passed: s.passed,
            exit_code: if s.failed.is_empty() { 0 } else { 1 },
            failed: s.failed,
            timestamp,
        }
    }
}

/// One JSON object per record, then the summary object.
pub fn render(records: &[CheckRecord], summary: &RunSummary) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    s.push_str(&serde_json::to_string(summary)?);
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModuleDims {
    pub module: String,
    pub dims: Vec<usize>,
}

/// Dimension tables for `dims`: the bigraded Hilbert table of `t_{g,n}` in
/// the `(Pmax, Qmax)` window and per-degree dimensions of the modules.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DimTables {
    pub hilbert: tgn::HilbertTable,
    pub modules: Vec<ModuleDims>,
}

impl DimTables {
    pub fn compute(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let (g, n, d) = (config.g, config.n, config.module_degree);
        let hilbert = GradedQuotient::tgn(g, n, Bounds::new(config.pmax, config.qmax))?.hilbert_table();
        let mut modules = vec![("M_1".to_string(), fmod::module_m(g, n, 1, d)?)];
        if n >= 2 {
            modules.push(("M_12".into(), fmod::module_mij(g, n, 1, 2, d)?));
        }
        if n >= 3 {
            modules.push(("M_123".into(), fmod::module_mijk(g, n, [1, 2, 3], d)?));
        }
        modules.push(("V".into(), fmod::module_v(g, n, d)?));
        let modules = modules.into_iter().map(|(module, m)| ModuleDims { module, dims: m.dims().to_vec() }).collect();
        Ok(Self { hilbert, modules })
    }

    pub fn modules_csv(&self) -> String {
        let mut s = String::from("module,degree,dim\n");
        for m in &self.modules {
            for (d, k) in m.dims.iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", m.module, d, k));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_algebra_run_passes() {
        let c = RunConfig { suite: Suite::Algebra, algebra_degree: 3, ..RunConfig::default() };
        let recs = run_suites(&c).unwrap();
        assert!(recs.len() >= 5 && recs.iter().all(|r| r.pass), "{recs:?}");
        let s = RunSummary::new(&c, &recs, None);
        assert_eq!(s.exit_code, 0);
        let text = render(&recs, &s).unwrap();
        assert_eq!(text.lines().count(), recs.len() + 1);
        let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        assert_eq!(last["summary"], true);
    }

    #[test]
    fn dimension_tables() {
        let c = RunConfig { g: 1, n: 1, pmax: 1, qmax: 1, ..RunConfig::default() };
        let t = DimTables::compute(&c).unwrap();
        assert!(t.hilbert.to_csv().contains("\n1,0,1\n"));
        assert_eq!(t.modules[0].dims, vec![1, 0, 0, 0]);
        assert!(t.modules_csv().starts_with("module,degree,dim\nM_1,0,1\n"));
        let c = RunConfig { g: 1, n: 2, pmax: 1, qmax: 1, ..RunConfig::default() };
        assert_eq!(DimTables::compute(&c).unwrap().hilbert.get(1, 1), Some(1));
    }

    #[test]
    fn tighter_safety_can_only_fail_more() {
        let c = RunConfig { suite: Suite::Forms, safety: 1e-30, ..RunConfig::default() };
        let recs = run_suites(&c).unwrap();
        assert!(recs.iter().any(|r| !r.pass));
        assert!(recs.iter().filter(|r| r.budget == 0.0).all(|r| r.pass));
    }
}
