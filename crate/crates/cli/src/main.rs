mod sweep;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use gcl::adversary::{
    gen_indistinguishable, gen_lemma1_family, gen_single_job_randomized, gen_theorem2_family,
    gen_theorem3_family, gen_theorem6_game, gen_tightness_two_machine, gen_uniform_forced_test,
    DEFAULT_BIG_U,
};
use gcl::checks::{run_check, CheckOutcome, SuiteConfig, CHECKS};
use gcl::offline::{optimal_makespan_with_cap, DEFAULT_EXACT_CAP};
use gcl::scheduler::{gcl_components, Component, ScheduleRecord};
use gcl::verifier::{lemma1_expected_ratio_with_cap, DEFAULT_ENUM_CAP, LEMMA1_EXACT_CAP};
use gcl::{
    list_schedule, revised_two_machine_params, thresholds, FixedInstance, Instance, Mixture,
    OnlineInstance, Size,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gcl", version, about = "Online scheduling with testing: GCL, offline optima, lower-bound verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schedule an instance or game with a component, GCL, or revised GCL
    Run {
        #[arg(long)]
        instance: PathBuf,
        /// `component:i`, `gcl` or `revised`
        #[arg(long, default_value = "gcl")]
        algo: Algo,
        /// Extra components of GCL
        #[arg(long, default_value_t = 1)]
        ell: u32,
    },
    /// Exact offline optimum of a fixed instance
    Opt {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap_opt: usize,
    },
    /// Write one of the lower-bound constructions as JSON
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Size of the huge upper bound in the forced-test game
        #[arg(long, default_value_t = DEFAULT_BIG_U)]
        big_u: f64,
        /// Defaults to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification checks; JSON reports on stdout, summary on stderr
    Verify {
        /// Checks to run (all when omitted)
        checks: Vec<String>,
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Machine counts for the three-or-more-machine randomized bound
        #[arg(long, value_delimiter = ',', default_value = "3")]
        m: Vec<usize>,
        /// Lemma-1 family sizes
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        k: Vec<usize>,
        /// Random instances per grid point in the upper-bound check
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Random jobs per grid point in the property check
        #[arg(long, default_value_t = 10_000)]
        jobs: usize,
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        cap_enum: usize,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap_opt: usize,
        /// Enumerate every strategy instead of one per machine relabelling
        #[arg(long)]
        no_symmetry: bool,
    },
    /// Tabulate weights, last thresholds and the bound over (m, ell)
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,8,inf")]
        m: Vec<Size>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,inf")]
        ell: Vec<Size>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Expected ratio of the single-machine probability rule on the Lemma-1 family
    Lemma1 {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        k: Vec<usize>,
        #[arg(long, default_value_t = LEMMA1_EXACT_CAP)]
        cap: usize,
    },
}

#[derive(Debug, Clone, Copy)]
enum Algo {
    Component(usize),
    Gcl,
    Revised,
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gcl" => Ok(Algo::Gcl),
            "revised" => Ok(Algo::Revised),
            _ => s
                .strip_prefix("component:")
                .and_then(|i| i.parse().ok())
                .map(Algo::Component)
                .ok_or_else(|| format!("expected component:<i>, gcl or revised, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Single,
    Forced,
    Indist,
    Thm2,
    Thm3,
    Tight,
    Lemma1,
    Thm6,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Result of a command: verification failures exit 1, everything else 0.
enum Status {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::Run {
            instance,
            algo,
            ell,
        } => run(&read_json(&instance)?, algo, ell),
        Command::Opt { instance, cap_opt } => {
            let inst: FixedInstance = read_json(&instance)?;
            emit(&optimal_makespan_with_cap(&inst, cap_opt)?)?;
            Ok(Status::Pass)
        }
        Command::Gen {
            family,
            m,
            k,
            big_u,
            out,
        } => {
            let text = generate(family, m, k, big_u)? + "\n";
            match out {
                Some(path) => fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => write_stdout(&text)?,
            }
            Ok(Status::Pass)
        }
        Command::Verify {
            checks,
            only,
            seed,
            m,
            k,
            samples,
            jobs,
            cap_enum,
            cap_opt,
            no_symmetry,
        } => {
            let mut names = checks;
            names.extend(only);
            if names.is_empty() {
                names = CHECKS.iter().map(|s| s.to_string()).collect();
            }
            if let Some(bad) = names.iter().find(|n| !CHECKS.contains(&n.as_str())) {
                bail!("unknown check {bad:?}; expected one of {}", CHECKS.join(", "));
            }
            let mut config = SuiteConfig {
                seed,
                thm2_m: m,
                lemma1_k: k,
                samples,
                jobs_per_point: jobs,
                ..SuiteConfig::default()
            };
            config.enumeration.symmetry = !no_symmetry;
            config.enumeration.enum_cap = cap_enum;
            config.enumeration.opt_cap = cap_opt;
            verify(&names, &config)
        }
        Command::Sweep { m, ell, format } => {
            let rows = sweep::sweep(&m, &ell)?;
            match format {
                Format::Json => emit(&rows)?,
                Format::Csv => write_stdout(&sweep::to_csv(&rows))?,
            }
            let monotone = rows.iter().all(|r| r.increasing_in_m != Some(false));
            Ok(if monotone { Status::Pass } else { Status::Fail })
        }
        Command::Lemma1 { k, cap } => {
            #[derive(Serialize)]
            struct Lemma1Row {
                k: usize,
                exact: Option<f64>,
                paper_bound: f64,
            }
            let rows = k
                .into_iter()
                .map(|k| {
                    let r = lemma1_expected_ratio_with_cap(k, cap)?;
                    Ok(Lemma1Row {
                        k,
                        exact: r.exact,
                        paper_bound: r.paper_bound,
                    })
                })
                .collect::<gcl::Result<Vec<_>>>()?;
            emit(&rows)?;
            let holds = rows
                .iter()
                .all(|r| r.exact.is_none_or(|e| e >= r.paper_bound - 1e-12));
            Ok(if holds { Status::Pass } else { Status::Fail })
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit<T: Serialize + ?Sized>(value: &T) -> anyhow::Result<()> {
    write_stdout(&(serde_json::to_string_pretty(value)? + "\n"))
}

/// Writes to stdout; a closed pipe (`gcl ... | head`) is not an error.
fn write_stdout(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct ComponentRun {
    index: usize,
    weight: f64,
    /// Present for games, where each component meets its own realization.
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<FixedInstance>,
    #[serde(flatten)]
    schedule: ScheduleRecord,
}

#[derive(Serialize)]
struct RunReport {
    algo: String,
    /// The instance as played; for a game run by one component this holds the
    /// revealed processing times.
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<FixedInstance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<ScheduleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_makespan: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentRun>,
}

fn run(instance: &Instance, algo: Algo, ell: u32) -> anyhow::Result<Status> {
    let m = u32::try_from(instance.machines())?;
    let report = match algo {
        Algo::Component(i) => {
            let params = thresholds(m, ell)?;
            let played = list_schedule(instance, &Component::new(&params, i)?);
            RunReport {
                algo: format!("component:{i}"),
                instance: Some(played.instance.clone()),
                schedule: Some(played.record()),
                expected_makespan: None,
                components: Vec::new(),
            }
        }
        Algo::Gcl => mixture_report("gcl", instance, &thresholds(m, ell)?)?,
        Algo::Revised => {
            if m != 2 {
                bail!("the revised algorithm is defined for two machines, instance has {m}");
            }
            mixture_report("revised", instance, &revised_two_machine_params())?
        }
    };
    emit(&report)?;
    Ok(Status::Pass)
}

fn mixture_report<M: Mixture>(name: &str, instance: &Instance, mixture: &M) -> anyhow::Result<RunReport> {
    let weights = mixture.weights();
    let played = gcl_components(instance, mixture);
    let expected = weights
        .iter()
        .zip(&played)
        .map(|(w, p)| w * p.makespan())
        .sum();
    let fixed = match instance {
        Instance::Fixed(inst) => Some(inst.clone()),
        Instance::Adaptive(_) => None,
    };
    Ok(RunReport {
        algo: name.to_string(),
        instance: fixed.clone(),
        schedule: None,
        expected_makespan: Some(expected),
        components: played
            .iter()
            .zip(weights)
            .enumerate()
            .map(|(index, (p, weight))| ComponentRun {
                index,
                weight,
                instance: fixed.is_none().then(|| p.instance.clone()),
                schedule: p.record(),
            })
            .collect(),
    })
}

fn generate(family: Family, m: Option<usize>, k: usize, big_u: f64) -> anyhow::Result<String> {
    let need_m = |default: usize| m.unwrap_or(default);
    Ok(match family {
        Family::Single => serde_json::to_string_pretty(&gen_single_job_randomized(need_m(2))?)?,
        Family::Forced => serde_json::to_string_pretty(&gen_uniform_forced_test(need_m(3), big_u)?)?,
        Family::Indist => serde_json::to_string_pretty(&gen_indistinguishable(need_m(3))?)?,
        Family::Thm2 => serde_json::to_string_pretty(&gen_theorem2_family(need_m(3))?)?,
        Family::Thm3 => serde_json::to_string_pretty(&gen_theorem3_family()?)?,
        Family::Tight => serde_json::to_string_pretty(&gen_tightness_two_machine())?,
        Family::Lemma1 => serde_json::to_string_pretty(&gen_lemma1_family(k)?)?,
        Family::Thm6 => serde_json::to_string_pretty(&gen_theorem6_game())?,
    })
}

fn verify(names: &[String], config: &SuiteConfig) -> anyhow::Result<Status> {
    let mut outcomes: Vec<CheckOutcome> = Vec::with_capacity(names.len());
    let mut stderr = std::io::stderr().lock();
    for name in names {
        let started = std::time::Instant::now();
        let outcome = run_check(name, config)?;
        let detail = outcome
            .reports
            .iter()
            .find(|r| !r.pass)
            .or_else(|| outcome.reports.last())
            .map(|r| format!("{}: computed {:.9} vs {:.9}", r.name, r.computed, r.claimed))
            .or_else(|| {
                outcome
                    .structural
                    .iter()
                    .map(|s| format!("{}: {} strategies, {} violations", s.name, s.strategies, s.violations))
                    .reduce(|a, b| a + "; " + &b)
            })
            .unwrap_or_default();
        writeln!(
            stderr,
            "{:<4} {:<11} {:>9.2?}  {detail}",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.name,
            started.elapsed(),
        )?;
        outcomes.push(outcome);
    }
    emit(&outcomes)?;
    let passed = outcomes.iter().filter(|o| o.pass).count();
    writeln!(stderr, "{passed}/{} checks passed", outcomes.len())?;
    Ok(if passed == outcomes.len() {
        Status::Pass
    } else {
        Status::Fail
    })
}
