//! Scenario files and the run pipeline.
//!
//! A scenario is a TOML document naming a system and a scene (built-in by
//! name, or a custom region tree), grid parameters, and a list of requested
//! computations and checks. [`run`] executes the pipeline in dependency order
//! (lattice → graph → fields → checks), writes CSV dumps and PGM heatmaps to
//! the output directory, and records everything in a `manifest.json` whose
//! file list carries SHA-256 content hashes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{self, BoundaryClassification};
use crate::clearance::{self, ClearanceField, EnvelopeMap};
use crate::cost::INF;
use crate::error::{Error, Result};
use crate::export;
use crate::reach::{self, PrimitiveGraph};
use crate::scene::{build_lattice, builtin_scene, Lattice, NodeClass, Region, Scene};
use crate::space::Axis;
use crate::systems::{builtin_system_with, integrate_trajectory, DEFAULT_CONTROLS_PER_AXIS};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub system: String,
    pub scene: SceneRef,
    /// Per-axis grid spacing.
    pub spacing: Vec<f64>,
    /// Primitive duration; defaults to the graph module's recommendation.
    pub tau: Option<f64>,
    pub controls_per_axis: Option<usize>,
    /// Envelope jump threshold override.
    pub kappa: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub compute: Vec<ComputeSpec>,
    #[serde(default)]
    pub check: Vec<CheckSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SceneRef {
    Named(String),
    Custom(CustomScene),
}

/// Inline scene: bounding box plus an obstacle region tree of half-spaces
/// under union/intersection/complement. `periods[a] > 0` makes axis `a`
/// periodic with that period.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomScene {
    pub name: String,
    pub bounds: Vec<(f64, f64)>,
    pub periods: Option<Vec<f64>>,
    pub obstacle: Region,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComputeSpec {
    /// Forward cost field from a state; writes `cost_<i>.csv` / `.pgm`.
    CostFrom { source: Vec<f64> },
    /// Clearance + envelope; writes `clearance.*` and `envelope.*`.
    Clearance,
    /// Record the clearance value at a state in the manifest, no pass/fail.
    ClearanceProbe { at: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    CostValue {
        from: Vec<f64>,
        to: Vec<f64>,
        expect: f64,
        tol: f64,
    },
    ClearanceValue {
        at: Vec<f64>,
        expect: f64,
        tol: f64,
        witness: Option<Vec<f64>>,
        witness_tol: Option<f64>,
    },
    /// Integrate a constant-control trajectory and check clearance
    /// monotonicity along it; `max_jumps` caps the allowed upward jumps.
    ClearanceAlong {
        start: Vec<f64>,
        control: Vec<f64>,
        duration: f64,
        max_jumps: Option<usize>,
    },
    EnvelopeFlag {
        at: Vec<f64>,
        expect: bool,
    },
    EnvelopeGenerator {
        at: Vec<f64>,
        radii: Option<Vec<f64>>,
        thresholds: Option<Vec<f64>>,
        expect: bool,
    },
    H1 {
        at: Vec<f64>,
        xi: Option<Vec<f64>>,
        r_star: f64,
        expect: bool,
    },
    Shelf {
        at: Vec<f64>,
        expect_shelf: bool,
    },
    ExactSuite,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub kind: String,
    pub description: String,
    pub measured: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub version: String,
    pub system: String,
    pub scene: String,
    pub spacing: Vec<f64>,
    pub tau: f64,
    pub controls_per_axis: usize,
    pub kappa: f64,
    pub seed: u64,
    pub node_count: usize,
    pub free_nodes: usize,
    pub boundary_nodes: usize,
    pub edge_count: usize,
    pub timings_s: BTreeMap<String, f64>,
    /// Named numeric results (clearance values, counts, ...). Infinite
    /// values serialize as the string "inf".
    pub records: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<CheckOutcome>,
    pub files: Vec<FileEntry>,
    pub pass: bool,
}

pub fn load_scenario(path: &Path) -> Result<ScenarioSpec> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn resolve_scene(spec: &SceneRef) -> Result<Scene> {
    match spec {
        SceneRef::Named(name) => builtin_scene(name),
        SceneRef::Custom(c) => {
            if c.bounds.is_empty() {
                return Err(Error::Config("custom scene needs bounds".into()));
            }
            let topology: Vec<Axis> = match &c.periods {
                None => vec![Axis::Line; c.bounds.len()],
                Some(p) => {
                    if p.len() != c.bounds.len() {
                        return Err(Error::Config("periods length must match bounds".into()));
                    }
                    p.iter()
                        .map(|&period| {
                            if period > 0.0 {
                                Axis::Circle { period }
                            } else {
                                Axis::Line
                            }
                        })
                        .collect()
                }
            };
            Ok(Scene {
                name: c.name.clone(),
                bounds: c.bounds.clone(),
                axis_topology: topology,
                obstacle: std::sync::Arc::new(c.obstacle.clone()),
            })
        }
    }
}

fn record_value(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!("inf")
    }
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|c| format!("{c}")).collect();
    format!("({})", parts.join(","))
}

/// Whether the scenario needs clearance/envelope fields at all.
fn needs_clearance(spec: &ScenarioSpec) -> bool {
    spec.compute
        .iter()
        .any(|c| matches!(c, ComputeSpec::Clearance | ComputeSpec::ClearanceProbe { .. }))
        || spec
            .check
            .iter()
            .any(|c| !matches!(c, CheckSpec::CostValue { .. } | CheckSpec::H1 { .. } | CheckSpec::Shelf { .. }))
}

/// Execute a scenario and write all artifacts into `out_dir`.
///
/// `spacing_override` replaces the spacing of every non-periodic axis;
/// `seed_override` replaces the scenario seed.
pub fn run(
    spec: &ScenarioSpec,
    out_dir: &Path,
    spacing_override: Option<f64>,
    seed_override: Option<u64>,
) -> Result<Manifest> {
    fs::create_dir_all(out_dir)?;
    let seed = seed_override.unwrap_or(spec.seed);
    let scene = resolve_scene(&spec.scene)?;
    let mut spacing = spec.spacing.clone();
    if let Some(h) = spacing_override {
        for (s, ax) in spacing.iter_mut().zip(&scene.axis_topology) {
            if matches!(ax, Axis::Line) {
                *s = h;
            }
        }
    }
    let controls = spec.controls_per_axis.unwrap_or(DEFAULT_CONTROLS_PER_AXIS);
    let system = builtin_system_with(&spec.system, controls)?;

    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    let t0 = Instant::now();
    let lattice = build_lattice(&scene, &spacing)?;
    timings.insert("lattice".into(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let tau = spec.tau.unwrap_or_else(|| reach::default_tau(&system, &lattice));
    let graph = reach::build_graph(&system, &lattice, tau)?;
    timings.insert("graph".into(), t0.elapsed().as_secs_f64());

    let mut records: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    let mut files: Vec<FileEntry> = Vec::new();
    let mut checks: Vec<CheckOutcome> = Vec::new();

    let push_file = |files: &mut Vec<FileEntry>, path: &Path| -> Result<()> {
        files.push(FileEntry {
            name: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: export::sha256_file(path)?,
        });
        Ok(())
    };

    // Fields.
    let mut fields: Option<(ClearanceField, EnvelopeMap, f64)> = None;
    if needs_clearance(spec) {
        let t0 = Instant::now();
        let cf = clearance::clearance_field(&graph, &lattice)?;
        let kappa = spec
            .kappa
            .unwrap_or_else(|| clearance::default_kappa(&graph, &lattice));
        let em = clearance::envelope(&cf, &lattice, kappa);
        timings.insert("clearance".into(), t0.elapsed().as_secs_f64());

        let finite: Vec<u64> = (0..lattice.node_count())
            .filter(|&i| lattice.class(i) == NodeClass::Free)
            .map(|i| cf.clr_ticks(i))
            .filter(|&t| t != INF)
            .collect();
        records.insert(
            "clr_min".into(),
            record_value(finite.iter().min().map_or(f64::INFINITY, |&t| crate::cost::to_cost(t))),
        );
        records.insert(
            "clr_max_finite".into(),
            record_value(finite.iter().max().map_or(f64::INFINITY, |&t| crate::cost::to_cost(t))),
        );
        records.insert(
            "envelope_cells".into(),
            record_value(em.envelope.iter().filter(|&&b| b).count() as f64),
        );

        let t0 = Instant::now();
        let p = out_dir.join("clearance.csv");
        export::write_clearance_csv(&p, &lattice, &cf)?;
        push_file(&mut files, &p)?;
        let p = out_dir.join("clearance.pgm");
        export::write_pgm(&p, &lattice, &cf.field.ticks)?;
        push_file(&mut files, &p)?;
        let p = out_dir.join("envelope.csv");
        export::write_envelope_csv(&p, &lattice, &em)?;
        push_file(&mut files, &p)?;
        let p = out_dir.join("envelope.pgm");
        export::write_pgm_mask(&p, &lattice, &em.envelope)?;
        push_file(&mut files, &p)?;
        timings.insert("export".into(), t0.elapsed().as_secs_f64());

        fields = Some((cf, em, kappa));
    }

    for (i, comp) in spec.compute.iter().enumerate() {
        match comp {
            ComputeSpec::CostFrom { source } => {
                let field = reach::cost_from(&graph, &lattice, source)?;
                let p = out_dir.join(format!("cost_{i}.csv"));
                export::write_cost_csv(&p, &lattice, &field)?;
                push_file(&mut files, &p)?;
                let p = out_dir.join(format!("cost_{i}.pgm"));
                export::write_pgm(&p, &lattice, &field.ticks)?;
                push_file(&mut files, &p)?;
            }
            ComputeSpec::ClearanceProbe { at } => {
                let (cf, _, _) = fields.as_ref().expect("clearance computed");
                let got = cf.clr(lattice.snap(at));
                records.insert(format!("clr{}", fmt_point(at)), record_value(got));
            }
            ComputeSpec::Clearance => {}
        }
    }

    // Checks. Boundary classification is shared by H1 and shelf checks.
    let mut bc_cache: Option<BoundaryClassification> = None;
    let classify = |graph: &PrimitiveGraph, lattice: &Lattice, cache: &mut Option<BoundaryClassification>| {
        if cache.is_none() {
            let probe = analysis::default_rho_probe(graph, lattice);
            *cache = Some(analysis::classify_boundary(graph, lattice, probe));
        }
    };

    let t0 = Instant::now();
    for c in &spec.check {
        let outcome = match c {
            CheckSpec::CostValue {
                from,
                to,
                expect,
                tol,
            } => {
                let field = reach::cost_from(&graph, &lattice, from)?;
                let got = field.value(lattice.snap(to));
                records.insert(
                    format!("d_c{}->{}", fmt_point(from), fmt_point(to)),
                    record_value(got),
                );
                CheckOutcome {
                    kind: "cost_value".into(),
                    description: format!(
                        "d_c{}->{} = {got} vs {expect} ± {tol}",
                        fmt_point(from),
                        fmt_point(to)
                    ),
                    measured: Some(got),
                    pass: (got - expect).abs() <= *tol,
                }
            }
            CheckSpec::ClearanceValue {
                at,
                expect,
                tol,
                witness,
                witness_tol,
            } => {
                let (cf, _, _) = fields.as_ref().expect("clearance computed");
                let node = lattice.snap(at);
                let got = cf.clr(node);
                records.insert(format!("clr{}", fmt_point(at)), record_value(got));
                let mut pass = (got - expect).abs() <= *tol;
                let mut desc = format!("clr{} = {got} vs {expect} ± {tol}", fmt_point(at));
                if let Some(w) = witness {
                    let wtol = witness_tol.unwrap_or(0.15);
                    match cf.witness[node] {
                        Some(wn) => {
                            let wc = lattice.coords(wn as usize);
                            let d = crate::space::distance(&lattice.axis_topology, &wc, w);
                            desc.push_str(&format!(
                                ", witness {} within {wtol} of {} (dist {d:.3})",
                                fmt_point(&wc),
                                fmt_point(w)
                            ));
                            pass &= d <= wtol;
                        }
                        None => {
                            desc.push_str(", no witness");
                            pass = false;
                        }
                    }
                }
                CheckOutcome {
                    kind: "clearance_value".into(),
                    description: desc,
                    measured: Some(got),
                    pass,
                }
            }
            CheckSpec::ClearanceAlong {
                start,
                control,
                duration,
                max_jumps,
            } => {
                let (cf, _, kappa) = fields.as_ref().expect("clearance computed");
                let traj = integrate_trajectory(
                    &system,
                    start,
                    &[(control.clone(), *duration)],
                    crate::systems::DEFAULT_STEP,
                )?;
                let rep = analysis::check_clearance_along(cf, &traj, &graph, &lattice, *kappa)?;
                let jumps_ok = max_jumps.map_or(true, |m| rep.upward_jumps.len() <= m);
                CheckOutcome {
                    kind: "clearance_along".into(),
                    description: format!(
                        "from {} control {}: {} upward jumps, {} downward violations",
                        fmt_point(start),
                        fmt_point(control),
                        rep.upward_jumps.len(),
                        rep.downward_violations
                    ),
                    measured: Some(rep.upward_jumps.len() as f64),
                    pass: rep.pass && jumps_ok,
                }
            }
            CheckSpec::EnvelopeFlag { at, expect } => {
                let (_, em, _) = fields.as_ref().expect("clearance computed");
                let node = lattice.snap(at);
                let got = em.envelope[node];
                CheckOutcome {
                    kind: "envelope_flag".into(),
                    description: format!("envelope{} = {got} vs {expect}", fmt_point(at)),
                    measured: Some(f64::from(got)),
                    pass: got == *expect,
                }
            }
            CheckSpec::EnvelopeGenerator {
                at,
                radii,
                thresholds,
                expect,
            } => {
                let (cf, em, kappa) = fields.as_ref().expect("clearance computed");
                let (dr, dt) = analysis::default_envgen_levels(*kappa);
                let radii = radii.clone().unwrap_or(dr);
                let thresholds = thresholds.clone().unwrap_or(dt);
                let node = lattice.snap(at);
                let rep = analysis::detect_envelope_generator(
                    cf, em, &lattice, node, &radii, &thresholds,
                )?;
                records.insert(
                    format!("envgen{}", fmt_point(at)),
                    record_value(f64::from(rep.verdict)),
                );
                CheckOutcome {
                    kind: "envelope_generator".into(),
                    description: format!(
                        "envelope generator at {}: {} vs {expect}",
                        fmt_point(at),
                        rep.verdict
                    ),
                    measured: Some(f64::from(rep.verdict)),
                    pass: rep.verdict == *expect,
                }
            }
            CheckSpec::H1 {
                at,
                xi,
                r_star,
                expect,
            } => {
                classify(&graph, &lattice, &mut bc_cache);
                let bc = bc_cache.as_ref().unwrap();
                let node = lattice.snap(at);
                let rep =
                    analysis::check_h1(&system, &lattice, bc, node, xi.as_deref(), *r_star, seed);
                CheckOutcome {
                    kind: "h1".into(),
                    description: format!(
                        "H1 at {}: holds={} (a={}, b={}, h={:.3}) vs {expect}",
                        fmt_point(at),
                        rep.holds,
                        rep.a_holds,
                        rep.b_holds,
                        rep.hamiltonian_value
                    ),
                    measured: Some(rep.hamiltonian_value),
                    pass: rep.holds == *expect,
                }
            }
            CheckSpec::Shelf { at, expect_shelf } => {
                classify(&graph, &lattice, &mut bc_cache);
                let bc = bc_cache.as_ref().unwrap();
                let node = lattice.snap(at);
                let got = bc.is_shelf(node);
                CheckOutcome {
                    kind: "shelf".into(),
                    description: format!("shelf{} = {got} vs {expect_shelf}", fmt_point(at)),
                    measured: Some(f64::from(got)),
                    pass: got == *expect_shelf,
                }
            }
            CheckSpec::ExactSuite => {
                let (cf, em, _) = fields.as_ref().expect("clearance computed");
                let rep = analysis::run_exact_suite(&graph, &lattice, cf, em, seed);
                CheckOutcome {
                    kind: "exact_suite".into(),
                    description: format!(
                        "triangle {} / bellman {} / rho_min {} / nesting {} / downward {}",
                        rep.triangle_violations,
                        rep.bellman_violations,
                        rep.rho_min_mismatches,
                        rep.nesting_violations,
                        rep.downward_jump_violations
                    ),
                    measured: None,
                    pass: rep.pass,
                }
            }
        };
        checks.push(outcome);
    }
    timings.insert("checks".into(), t0.elapsed().as_secs_f64());

    let pass = checks.iter().all(|c| c.pass);
    let n = lattice.node_count();
    let manifest = Manifest {
        scenario: spec.name.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        system: system.name.clone(),
        scene: scene.name.clone(),
        spacing,
        tau,
        controls_per_axis: controls,
        kappa: fields.as_ref().map_or(0.0, |(_, _, k)| *k),
        seed,
        node_count: n,
        free_nodes: (0..n)
            .filter(|&i| lattice.class(i) == NodeClass::Free)
            .count(),
        boundary_nodes: (0..n)
            .filter(|&i| lattice.class(i) == NodeClass::Boundary)
            .count(),
        edge_count: graph.edge_count(),
        timings_s: timings,
        records,
        checks,
        files,
        pass,
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corner_spec(checks: &str) -> ScenarioSpec {
        let text = format!(
            r#"
name = "corner-test"
system = "galaga"
scene = "galaga-corner"
spacing = [0.25, 0.25]
tau = 0.25
seed = 11
{checks}
"#
        );
        toml::from_str(&text).unwrap()
    }

    #[test]
    fn minimal_scenario_runs_and_writes_manifest() {
        let spec = corner_spec("[[compute]]\nkind = \"clearance\"");
        let dir = tempfile::tempdir().unwrap();
        let m = run(&spec, dir.path(), None, None).unwrap();
        assert!(m.pass);
        assert!(dir.path().join("manifest.json").exists());
        assert!(dir.path().join("clearance.csv").exists());
        assert!(dir.path().join("envelope.pgm").exists());
        // Every listed file exists and its hash matches the content.
        for f in &m.files {
            let p = dir.path().join(&f.name);
            assert_eq!(export::sha256_file(&p).unwrap(), f.sha256);
        }
    }

    #[test]
    fn failing_check_flips_pass() {
        let spec = corner_spec(
            "[[check]]\nkind = \"clearance_value\"\nat = [-0.5, -1.0]\nexpect = 9.0\ntol = 0.01",
        );
        let dir = tempfile::tempdir().unwrap();
        let m = run(&spec, dir.path(), None, None).unwrap();
        assert!(!m.pass);
        assert_eq!(m.checks.len(), 1);
        assert!(!m.checks[0].pass);
    }

    #[test]
    fn coarse_corner_checks_pass() {
        let spec = corner_spec(
            r#"
[[check]]
kind = "clearance_value"
at = [-0.5, -1.0]
expect = 0.5
tol = 0.26

[[check]]
kind = "exact_suite"
"#,
        );
        let dir = tempfile::tempdir().unwrap();
        let m = run(&spec, dir.path(), None, None).unwrap();
        assert!(m.pass, "{:#?}", m.checks);
        assert!(m.records.contains_key("clr(-0.5,-1)"));
    }

    #[test]
    fn custom_scene_region_tree() {
        let text = r#"
name = "custom"
system = "galaga"
spacing = [0.25, 0.25]
tau = 0.25

[scene]
name = "left-wall"
bounds = [[-2.0, 2.0], [-2.0, 2.0]]

[scene.obstacle.Halfspace]
normal = [1.0, 0.0]
offset = -1.0
strict = false

[[compute]]
kind = "clearance"
"#;
        let spec: ScenarioSpec = toml::from_str(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let m = run(&spec, dir.path(), None, None).unwrap();
        assert!(m.pass);
        assert_eq!(m.scene, "left-wall");
        assert!(m.boundary_nodes > 0);
    }

    #[test]
    fn parse_error_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.toml");
        fs::write(&p, "name = [unclosed").unwrap();
        assert!(matches!(load_scenario(&p), Err(Error::Parse(_))));
    }

    #[test]
    fn seed_override_lands_in_manifest() {
        let spec = corner_spec("[[compute]]\nkind = \"clearance\"");
        let dir = tempfile::tempdir().unwrap();
        let m = run(&spec, dir.path(), None, Some(99)).unwrap();
        assert_eq!(m.seed, 99);
    }
}
