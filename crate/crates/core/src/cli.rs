//! Batch driver: `catprob <command> [options]`.
//!
//! Every command writes a JSON-lines report (to `--out` or stdout) and exits
//! with 0 when all checks pass, 1 when a check fails and 2 on usage,
//! input or resource errors. Elapsed time goes to stderr only, so reports
//! are byte-identical across runs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::codensity::CodensityInstance;
use crate::dayconv::{associator_iso, exactness_in_degree, hom_tensor_adjunction, left_unit_iso, representable_iso, right_unit_iso, IsoCheck};
use crate::error::{Error, Result};
use crate::fincat::SetFunctor;
use crate::finprob::{law_suite, strength_suite, KleisliLaw, LawConfig, MonadSpec};
use crate::io::{self, Spec};
use crate::metrics::{self, MetricConfig};
use crate::polymeasure::{extend_to_measure, validate_polymeasure, Polymeasure};
use crate::presets::{self, Preset};
use crate::rational::fmt_rational;
use crate::report::{Report, Verdict};
use crate::starmonad::{extension_suite, star_law_suite, MultVariant, StarConfig};

#[derive(Parser, Debug)]
#[command(name = "catprob", version, about = "Exact checks of finite probability monads, codensity monads, polymeasures and transport metrics")]
pub struct Cli {
    /// Seed for randomized suites (required by starlaws and metric-suite).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Denominator bound for enumerated distributions.
    #[arg(long, global = true)]
    pub grid: Option<u32>,
    /// Size budget for comma categories and enumerations.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    Exact,
    NotExact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MultChoice {
    Exact,
    SquaredDensity,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load and validate files of any supported format.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Monad laws, commutativity, affineness and optional Kleisli-law and
    /// strength checks over grid distributions.
    Lawcheck {
        #[arg(long, default_value = "distribution")]
        monad: String,
        /// `inclusion` or `halving`.
        #[arg(long)]
        kleisli: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_carrier: usize,
        #[arg(long)]
        nested_grid: Option<u32>,
        /// Also compare the derived double strength with the product.
        #[arg(long)]
        strength: bool,
    },
    /// Codensity monad of a preset: sizes of T(n), laws, affineness, lift.
    Codensity {
        #[command(flatten)]
        source: PresetArg,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        carrier_size: Vec<usize>,
        #[arg(long)]
        laws: bool,
        #[arg(long)]
        affine: bool,
        #[arg(long)]
        lift: bool,
    },
    /// Day convolution isomorphisms and the hom–tensor adjunction count.
    Day {
        #[command(flatten)]
        source: PresetArg,
    },
    /// Compare T(∏A_i) with the product-comma limit in one degree.
    Exactness {
        #[command(flatten)]
        source: PresetArg,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        carriers: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "exact")]
        expect: Expectation,
    },
    /// Validate and extend a polymeasure file, or run the extension suite.
    Polymeasure {
        file: Option<PathBuf>,
        #[arg(long)]
        suite: bool,
        /// Product shapes for the suite, e.g. `2x2,2x3`.
        #[arg(long, value_delimiter = ',', default_value = "2x2,2x3")]
        shapes: Vec<String>,
    },
    /// Seeded *-monad laws and op-multicategory axioms.
    Starlaws {
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long, default_value_t = 3)]
        max_carrier: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long, default_value_t = 5)]
        max_leaves: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mult: MultChoice,
    },
    /// Kantorovich distance by LP duality, with the primal transport value.
    Kantorovich {
        #[command(flatten)]
        files: MetricFiles,
        /// Cross-check by enumerating the dual polytope's vertices.
        #[arg(long)]
        vertex: bool,
    },
    /// Prokhorov distance by per-subset breakpoints.
    Prokhorov {
        #[command(flatten)]
        files: MetricFiles,
    },
    /// Seeded Huber, duality, symmetry, triangle and identity checks.
    MetricSuite {
        #[arg(long, default_value_t = 500)]
        draws: usize,
        #[arg(long, default_value_t = 6)]
        max_points: usize,
    },
    /// List the built-in presets, or write them as files.
    Presets {
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
pub struct PresetArg {
    /// Built-in preset name.
    #[arg(long, conflicts_with = "preset_file")]
    pub preset: Option<String>,
    #[arg(long)]
    pub preset_file: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct MetricFiles {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub p: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
}

impl PresetArg {
    fn load(&self) -> Result<Preset> {
        match (&self.preset, &self.preset_file) {
            (Some(n), _) => presets::by_name(n),
            (None, Some(f)) => io::load_preset(f),
            (None, None) => Err(Error::precondition("one of --preset or --preset-file is required")),
        }
    }
}

/// Parse arguments, run, write the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    // the output path is not an input, so it stays out of the echo
    let mut echo: Vec<String> = Vec::new();
    let mut rest = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = rest.next() {
        if a == "--out" {
            rest.next();
        } else if !a.starts_with("--out=") {
            echo.push(a);
        }
    }
    let start = Instant::now();
    let result = run(&cli, echo);
    let elapsed = start.elapsed();
    match result {
        Ok(report) => {
            let text = report.render();
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            eprintln!("elapsed {:.3}s", elapsed.as_secs_f64());
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            for v in report.failures() {
                eprintln!("FAIL {}: {}", v.check, v.detail.as_deref().unwrap_or(""));
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn need_seed(cli: &Cli) -> Result<u64> {
    cli.seed.ok_or_else(|| Error::precondition("this suite is randomized; pass --seed"))
}

/// Run a parsed command.
pub fn run(cli: &Cli, echo: Vec<String>) -> Result<Report> {
    let name = command_name(&cli.command);
    let mut r = Report::new(name, echo, cli.seed);
    match &cli.command {
        Command::Validate { files } => {
            for f in files {
                let id = format!("validate[{}]", f.display());
                match io::load_spec(f) {
                    Ok(s) => r.push(Verdict::pass(id, 1).with_detail(s.kind())),
                    Err(e @ Error::Validation(_)) => {
                        let raw = std::fs::read_to_string(f).ok().and_then(|t| serde_json::from_str(&t).ok());
                        r.push(Verdict::fail(id, 1, e.to_string(), raw));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Command::Lawcheck { monad, kleisli, max_carrier, nested_grid, strength } => {
            let m = MonadSpec::by_name(monad)?;
            let law = match kleisli.as_deref() {
                None => None,
                Some("inclusion") => Some(KleisliLaw::inclusion()),
                Some("halving") => Some(KleisliLaw::halving()),
                Some(o) => return Err(Error::domain(format!("unknown Kleisli law {o:?}; known: inclusion, halving"))),
            };
            let d = LawConfig::default();
            let grid = cli.grid.unwrap_or(d.grid);
            let cfg = LawConfig { max_carrier: *max_carrier, grid, nested_grid: nested_grid.unwrap_or(grid), ..d };
            r.extend(law_suite(&m, &cfg, law.as_ref()));
            if *strength {
                if m.chi.is_none() {
                    return Err(Error::domain(format!("{} has no product strength to compare with", m.name)));
                }
                r.extend(strength_suite(&m, &cfg));
            }
        }
        Command::Codensity { source, carrier_size, laws, affine, lift } => {
            let p = source.load()?;
            let mut inst = CodensityInstance::from_preset(&p);
            if let Some(b) = cli.budget {
                let steps = inst.step_budget;
                inst = inst.with_budgets(b, steps);
            }
            for &n in carrier_size {
                let t = inst.codensity_object(n)?;
                r.value(format!("T({n})"), t.len());
                if *laws {
                    r.extend(inst.monad_law_checks(n));
                }
                if *lift {
                    let l = inst.subprob_lift_check(n)?;
                    r.value(format!("T(1+{n})"), l.t_one_plus_a);
                    r.value(format!("lift_limit({n})"), l.limit_size);
                    let v = if l.verified() {
                        Verdict::pass(format!("codensity.subprob_lift[{n}]"), l.nu_checked as u64)
                    } else {
                        Verdict::fail(format!("codensity.subprob_lift[{n}]"), l.nu_checked as u64, format!("{l:?}"), Some(json!({"preset": p.name, "carrier_size": n})))
                    };
                    r.push(v);
                }
            }
            if *affine {
                let a = inst.affine_check()?;
                if let Some(s) = a.t1_size {
                    r.value("T(1)", s);
                }
                let ok = a.holds() && a.eta1_bijective == Some(true);
                r.push(if ok {
                    Verdict::pass("codensity.affine", 1)
                } else {
                    Verdict::fail("codensity.affine", 1, format!("{a:?}"), Some(json!({"preset": p.name, "failing_object": a.failing_object})))
                });
            }
        }
        Command::Day { source } => {
            let p = source.load()?;
            let d = p.monoidal.as_ref().ok_or_else(|| Error::domain(format!("preset {} has no monoidal structure", p.name)))?;
            let c = &d.underlying;
            let iso = |id: String, i: IsoCheck| {
                if i.holds() {
                    Verdict::pass(id, 1)
                } else {
                    let detail = format!("well-defined {}, bijective {}, natural {}", i.well_defined, i.bijective, i.natural);
                    Verdict::fail(id, 1, detail, Some(json!({"preset": p.name, "components": i.components})))
                }
            };
            for a in 0..c.num_objects() {
                for b in 0..c.num_objects() {
                    r.push(iso(format!("day.representable_iso[{},{}]", c.objects()[a], c.objects()[b]), representable_iso(d, a, b)));
                }
            }
            let mut fs: Vec<(String, SetFunctor)> = vec![("K".into(), p.k.clone())];
            for a in 0..c.num_objects() {
                fs.push((format!("y({})", c.objects()[a]), SetFunctor::representable(c, a)));
            }
            for (n, f) in &fs {
                r.push(iso(format!("day.left_unit[{n}]"), left_unit_iso(d, f)));
                r.push(iso(format!("day.right_unit[{n}]"), right_unit_iso(d, f)));
            }
            let y = &fs[1].1;
            r.push(iso("day.associator[K,y,K]".into(), associator_iso(d, &p.k, y, &p.k)));
            let adj = hom_tensor_adjunction(d, &p.k, y, &p.k)?;
            r.value("adjunction.day_side", adj.day_side);
            r.value("adjunction.binatural_side", adj.binatural_side);
            let ok = adj.day_side == adj.binatural_side && adj.transfer_ok;
            r.push(if ok {
                Verdict::pass("day.adjunction", adj.day_side as u64)
            } else {
                Verdict::fail("day.adjunction", adj.day_side as u64, format!("{adj:?}"), Some(json!({"preset": p.name})))
            });
        }
        Command::Exactness { source, degree, carriers, expect } => {
            let p = source.load()?;
            let (d, lax) = match (&p.monoidal, &p.lax) {
                (Some(d), Some(l)) => (d, l),
                _ => return Err(Error::domain(format!("preset {} has no lax monoidal functor", p.name))),
            };
            let carriers = match (degree, carriers) {
                (Some(k), Some(c)) if c.len() != *k => return Err(Error::precondition(format!("degree {k} needs {k} carriers, got {}", c.len()))),
                (_, Some(c)) => c.clone(),
                (Some(k), None) => vec![1; *k],
                (None, None) => return Err(Error::precondition("pass --degree or --carriers")),
            };
            let mut inst = CodensityInstance::from_preset(&p);
            if let Some(b) = cli.budget {
                let steps = inst.step_budget;
                inst = inst.with_budgets(b, steps);
            }
            let e = exactness_in_degree(&inst, d, lax, &carriers)?;
            r.value("left", e.left);
            r.value("right", e.right);
            r.value("ran_eval", e.ran_eval);
            r.value("exact", e.exact());
            let k = carriers.len();
            let want = *expect == Expectation::Exact;
            let id = format!("exactness.degree{k}");
            let detail = format!("{} vs {}: {}", e.left, e.right, if e.exact() { "exact" } else { "not exact" });
            r.push(if e.exact() == want {
                Verdict::pass(id, 1).with_detail(detail)
            } else {
                Verdict::fail(id, 1, detail, Some(json!({"preset": p.name, "carriers": carriers, "witness": e.witness})))
            });
            r.push(if e.ran_eval == e.right {
                Verdict::pass("exactness.ran_eval", 1)
            } else {
                Verdict::fail("exactness.ran_eval", 1, format!("Ran gives {} but the limit has {}", e.ran_eval, e.right), Some(json!({"preset": p.name, "carriers": carriers})))
            });
        }
        Command::Polymeasure { file, suite, shapes } => {
            if file.is_none() && !suite {
                return Err(Error::precondition("pass a polymeasure file or --suite"));
            }
            if let Some(f) = file {
                let gamma = match io::load_spec(f)? {
                    Spec::Polymeasure(g) => g,
                    Spec::PolyTable(t) => {
                        let v = validate_polymeasure(&t.to_table()?);
                        match v.canonical {
                            Some(g) => g,
                            None => {
                                let vs: Vec<String> = v.violations.iter().map(|x| x.to_string()).collect();
                                r.push(Verdict::fail("polymeasure.valid", 1, vs[0].clone(), Some(json!({"table": Spec::PolyTable(t).to_json(), "violations": vs}))));
                                return Ok(r);
                            }
                        }
                    }
                    s => return Err(Error::parse(format!("{}: expected a polymeasure, found a {}", f.display(), s.kind()))),
                };
                check_polymeasure(&mut r, &gamma)?;
            }
            if *suite {
                let shapes = shapes.iter().map(|s| parse_shape(s)).collect::<Result<Vec<_>>>()?;
                r.extend(extension_suite(&shapes, cli.grid.unwrap_or(3)));
            }
        }
        Command::Starlaws { draws, max_carrier, max_arity, max_leaves, mult } => {
            let cfg = StarConfig {
                seed: need_seed(cli)?,
                draws: *draws,
                grid: cli.grid.unwrap_or(4),
                max_carrier: *max_carrier,
                max_arity: *max_arity,
                max_leaves: *max_leaves,
            };
            let variant = match mult {
                MultChoice::Exact => MultVariant::Exact,
                MultChoice::SquaredDensity => MultVariant::SquaredDensity,
            };
            r.extend(star_law_suite(&cfg, variant));
        }
        Command::Kantorovich { files, vertex } => {
            let (m, p, q) = load_metric_files(files)?;
            let (dk, h) = metrics::kantorovich_dual_potential(&p, &q, &m)?;
            r.value("kantorovich", fmt_rational(&dk));
            r.value("potential", h.iter().zip(m.points()).map(|(v, x)| format!("{x}:{}", fmt_rational(v))).collect::<Vec<_>>().join(","));
            let w = metrics::wasserstein_primal(&p, &q, &m)?;
            r.value("wasserstein", fmt_rational(&w));
            let inst = || json!({"space": m.to_json(), "p": p.to_json(), "q": q.to_json()});
            if m.diameter() <= crate::rational::one() {
                let bad = (w != dk).then(|| (format!("dual {} ≠ primal {}", fmt_rational(&dk), fmt_rational(&w)), inst()));
                r.push(Verdict::from_outcome("kantorovich.duality", 1, bad));
            }
            if *vertex {
                let v = metrics::kantorovich_vertex_enumeration(&p, &q, &m)?;
                let bad = (v != dk).then(|| (format!("vertex optimum {} ≠ simplex {}", fmt_rational(&v), fmt_rational(&dk)), inst()));
                r.push(Verdict::from_outcome("kantorovich.vertex_enumeration", 1, bad));
            }
        }
        Command::Prokhorov { files } => {
            let (m, p, q) = load_metric_files(files)?;
            let limit = cli.budget.unwrap_or(metrics::PROKHOROV_MAX_POINTS).min(metrics::PROKHOROV_MAX_POINTS);
            let res = metrics::prokhorov_detailed(&p, &q, &m, limit)?;
            r.value("prokhorov", fmt_rational(&res.value));
            r.value("attained", res.attained);
            r.value("binding", res.binding.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
        }
        Command::MetricSuite { draws, max_points } => {
            let cfg = MetricConfig { seed: need_seed(cli)?, draws: *draws, max_points: *max_points, grid: cli.grid.unwrap_or(6) };
            r.extend(metrics::metric_inequality_suite(&cfg)?);
        }
        Command::Presets { export } => {
            for n in presets::NAMES {
                let p = presets::by_name(n)?;
                if let Some(dir) = export {
                    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                    io::write_json(&dir.join(format!("{n}.json")), &io::preset_to_json(&p))?;
                }
                r.value(*n, format!("{} objects, {} morphisms", p.base.num_objects(), p.base.num_morphisms()));
            }
        }
    }
    Ok(r)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Lawcheck { .. } => "lawcheck",
        Command::Codensity { .. } => "codensity",
        Command::Day { .. } => "day",
        Command::Exactness { .. } => "exactness",
        Command::Polymeasure { .. } => "polymeasure",
        Command::Starlaws { .. } => "starlaws",
        Command::Kantorovich { .. } => "kantorovich",
        Command::Prokhorov { .. } => "prokhorov",
        Command::MetricSuite { .. } => "metric-suite",
        Command::Presets { .. } => "presets",
    }
}

fn parse_shape(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|n| n.trim().parse::<usize>().map_err(|_| Error::parse(format!("malformed shape {s:?}; expected e.g. 2x3"))))
        .collect()
}

fn check_polymeasure(r: &mut Report, gamma: &Polymeasure) -> Result<()> {
    let v = validate_polymeasure(&gamma.full_table());
    r.push(if v.is_valid() {
        Verdict::pass("polymeasure.valid", 1)
    } else {
        Verdict::fail("polymeasure.valid", 1, v.violations[0].to_string(), Some(gamma.to_json()))
    });
    let ext = extend_to_measure(gamma)?;
    r.value("extension", ext.to_json());
    let back = crate::polymeasure::restrict_to_rectangles(&ext, gamma.carriers())?;
    let bad = (back != *gamma).then(|| ("restricting the extension does not give the polymeasure back".to_string(), gamma.to_json()));
    r.push(Verdict::from_outcome("polymeasure.extension_roundtrip", 1, bad));
    Ok(())
}

fn load_metric_files(f: &MetricFiles) -> Result<(metrics::FiniteMetricSpace, crate::finprob::Distribution, crate::finprob::Distribution)> {
    let m = io::load_metric_space(&f.space)?;
    let p = io::load_distribution(&f.p)?;
    let q = io::load_distribution(&f.q)?;
    Ok((m, p, q))
}

/// The report as it would be written, for callers that run in-process.
pub fn run_to_text(args: &[&str]) -> Result<(String, bool)> {
    let mut full = vec!["catprob"];
    full.extend_from_slice(args);
    let cli = Cli::try_parse_from(&full).map_err(|e| Error::precondition(e.to_string()))?;
    let r = run(&cli, args.iter().map(|s| s.to_string()).collect())?;
    Ok((r.render(), r.passed()))
}

pub fn default_data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Report;

    fn data(rel: &str) -> String {
        default_data_dir().join(rel).display().to_string()
    }

    #[test]
    fn kantorovich_example_files() {
        let (s, ok) = run_to_text(&["kantorovich", "--space", &data("example/space.json"), "--p", &data("example/p.json"), "--q", &data("example/q.json")]).unwrap();
        assert!(ok);
        let r = Report::parse(&s).unwrap();
        assert_eq!(r.header.values["kantorovich"], "3/10");
        assert_eq!(r.header.values["wasserstein"], "3/10");
    }

    #[test]
    fn prokhorov_example_files() {
        let (s, _) = run_to_text(&["prokhorov", "--space", &data("example/space.json"), "--p", &data("example/p.json"), "--q", &data("example/q.json")]).unwrap();
        let r = Report::parse(&s).unwrap();
        assert_eq!(r.header.values["prokhorov"], "1/2");
        assert_eq!(r.header.values["attained"], "true");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with_args(["catprob", "lawcheck", "--monad", "broken-mult", "--max-carrier", "2", "--grid", "2", "--out", "/dev/null"]), 1);
        assert_eq!(main_with_args(["catprob", "codensity", "--preset", "end2", "--carrier-size", "99"]), 2);
        assert_eq!(main_with_args(["catprob", "no-such-command"]), 2);
        assert_eq!(main_with_args(["catprob", "metric-suite", "--draws", "1"]), 2);
        assert_eq!(main_with_args(["catprob", "exactness", "--preset", "one", "--degree", "1", "--out", "/dev/null"]), 0);
    }

    #[test]
    fn broken_mult_witness() {
        let (s, ok) = run_to_text(&["lawcheck", "--monad", "broken-mult", "--max-carrier", "2", "--grid", "2"]).unwrap();
        assert!(!ok);
        let r = Report::parse(&s).unwrap();
        let f = r.failures().find(|v| v.check.ends_with("associativity")).expect("associativity fails");
        assert!(f.witness.is_some());
    }

    #[test]
    fn exactness_expectations() {
        let (_, ok) = run_to_text(&["exactness", "--preset", "and2", "--degree", "2", "--carriers", "1,1", "--expect", "not-exact"]).unwrap();
        assert!(ok);
        let (s, ok) = run_to_text(&["exactness", "--preset", "and2", "--degree", "2", "--carriers", "1,1"]).unwrap();
        assert!(!ok);
        let r = Report::parse(&s).unwrap();
        assert_eq!((r.header.values["left"].as_str(), r.header.values["right"].as_str()), ("4", "16"));
    }

    #[test]
    fn parse_shapes() {
        assert_eq!(parse_shape("2x3").unwrap(), vec![2, 3]);
        assert!(parse_shape("2y3").is_err());
    }
}
