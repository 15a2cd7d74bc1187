use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use housing_core::generate::{generate_instance, GenConfig, Profile};
use housing_core::io::{parse_instance, parse_scheduling, serialize_instance, serialize_scheduling};
use housing_core::partitions::{PartitionRule, Threshold};
use housing_core::verification::sweep::SweepSpec;
use housing_core::verification::{check_property, HarnessConfig, Property, SampleConfig, VerifyError};
use housing_core::{fixtures, Instance, Mechanism, OrderingRule, PropertyReport, Time, TimePoint};

#[derive(Parser)]
#[command(name = "housing", version, about = "Mechanisms for online housing markets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on one instance and print the allocation.
    Run {
        #[command(flatten)]
        mech: MechanismArgs,
        #[arg(long)]
        instance: PathBuf,
        /// Also print the phase-by-phase trace.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check properties of a mechanism on an instance or a sweep of instances.
    Verify {
        #[command(flatten)]
        mech: MechanismArgs,
        /// Comma-separated, e.g. `ir,spo,a-ic`.
        #[arg(long, value_delimiter = ',', required = true)]
        property: Vec<Property>,
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        instance: Option<PathBuf>,
        /// `n=3` (exhaustive) or `n=4,count=1000,seed=0`.
        #[arg(long)]
        sweep: Option<SweepSpec>,
        /// Sample this many random misreports when an instance exceeds the search caps.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0, requires = "sample")]
        sample_seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a seeded random instance.
    Gen {
        #[arg(long)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "dense")]
        profile: Profile,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled example instances and schedulings into a directory.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct MechanismArgs {
    #[arg(long, value_enum)]
    mechanism: MechanismKind,
    /// Agent ordering for the serial dictatorship family.
    #[arg(long, value_enum)]
    ordering: Option<OrderingKind>,
    /// Partition rule for online-ttc.
    #[arg(long, value_enum)]
    partition: Option<PartitionKind>,
    /// Scheduling file for theta.
    #[arg(long)]
    scheduling: Option<PathBuf>,
    /// Threshold time for zeta, e.g. `11/2`.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismKind {
    StaticSd,
    DynamicSd,
    SafeSd,
    OnlineTtc,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingKind {
    Delta,
    Alpha,
    DescArrival,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionKind {
    Gamma,
    Theta,
    Zeta,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Exit status: usage or input problems.
const USAGE: u8 = 2;

struct UsageError(anyhow::Error);

impl MechanismArgs {
    fn build(&self) -> Result<Mechanism> {
        let sd = matches!(
            self.mechanism,
            MechanismKind::StaticSd | MechanismKind::DynamicSd | MechanismKind::SafeSd
        );
        if sd {
            if self.partition.is_some() || self.scheduling.is_some() || self.tau.is_some() {
                bail!("--partition, --scheduling and --tau only apply to online-ttc");
            }
            let ordering = match self.ordering.context("serial dictatorship needs --ordering")? {
                OrderingKind::Delta => OrderingRule::delta(),
                OrderingKind::Alpha => OrderingRule::alpha(),
                OrderingKind::DescArrival => OrderingRule::desc_arrival(),
            };
            return Ok(match self.mechanism {
                MechanismKind::StaticSd => Mechanism::StaticSd(ordering),
                MechanismKind::DynamicSd => Mechanism::DynamicSd(ordering),
                _ => Mechanism::SafeSd(ordering),
            });
        }
        if self.ordering.is_some() {
            bail!("--ordering only applies to the serial dictatorship mechanisms");
        }
        let rule = match self.partition.context("online-ttc needs --partition")? {
            PartitionKind::Gamma => {
                if self.scheduling.is_some() || self.tau.is_some() {
                    bail!("gamma takes neither --scheduling nor --tau");
                }
                PartitionRule::gamma()
            }
            PartitionKind::Theta => {
                if self.tau.is_some() {
                    bail!("theta takes --scheduling, not --tau");
                }
                let path = self.scheduling.as_ref().context("theta needs --scheduling FILE")?;
                let xi = parse_scheduling(&read(path)?).with_context(|| format!("{}", path.display()))?;
                PartitionRule::theta(xi)
            }
            PartitionKind::Zeta => {
                if self.scheduling.is_some() {
                    bail!("zeta takes --tau, not --scheduling");
                }
                let text = self.tau.as_deref().context("zeta needs --tau")?;
                let tau = TimePoint::parse_time(text).with_context(|| format!("--tau: not a time: {text:?}"))?;
                PartitionRule::zeta(Threshold::new(tau))
            }
        };
        Ok(Mechanism::OnlineTtc(rule))
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn usage<T>(r: Result<T>) -> Result<T, UsageError> {
    r.map_err(UsageError)
}

fn run(mech: &MechanismArgs, instance: &Path, trace: bool, format: Format) -> Result<u8, UsageError> {
    let mech = usage(mech.build())?;
    let inst = usage(load_instance(instance))?;
    let out = usage(mech.run_traced(&inst).with_context(|| format!("{} failed", mech.name())))?;
    match format {
        Format::Text => {
            println!("{}", out.allocation);
            if trace {
                print!("{}", out.trace.to_text());
            }
        }
        Format::Json => {
            let mut doc = serde_json::json!({
                "mechanism": mech.name(),
                "allocation": out.allocation,
            });
            if trace {
                doc["trace"] = out.trace.to_json();
            }
            println!("{doc}");
        }
    }
    Ok(0)
}

struct VerifyArgs<'a> {
    mech: &'a MechanismArgs,
    properties: &'a [Property],
    instance: Option<&'a Path>,
    sweep: Option<SweepSpec>,
    sample: Option<SampleConfig>,
    format: Format,
}

fn verify(args: VerifyArgs<'_>) -> Result<u8, UsageError> {
    let mech = usage(args.mech.build())?;
    let cfg = HarnessConfig {
        sample: args.sample,
        ..HarnessConfig::default()
    };
    let instances: Box<dyn Iterator<Item = Instance>> = match (args.instance, args.sweep) {
        (Some(path), _) => Box::new(std::iter::once(usage(load_instance(path))?)),
        (None, Some(spec)) => spec.instances(),
        (None, None) => return Err(UsageError(anyhow::anyhow!("give --instance or --sweep"))),
    };
    let labelled = args.sweep.is_some();
    let mut failing = 0usize;
    let mut checked = 0usize;
    for (index, inst) in instances.enumerate() {
        for &property in args.properties {
            let report = match check_property(&mech, &inst, property, &cfg) {
                Ok(report) => report,
                Err(e @ VerifyError::TooLarge { .. }) => PropertyReport::too_large(property, e.to_string()),
                Err(e) => {
                    return Err(UsageError(
                        anyhow::Error::new(e).context(format!("{} on instance {index}", mech.name())),
                    ))
                }
            };
            checked += 1;
            if !report.is_holds() {
                failing += 1;
            }
            print_report(&report, labelled.then_some(index), args.format);
        }
    }
    if labelled {
        eprintln!("{}: {checked} checks, {failing} not holding", mech.name());
    }
    Ok(u8::from(failing > 0))
}

fn print_report(report: &PropertyReport, index: Option<usize>, format: Format) {
    match (format, index) {
        (Format::Text, None) => println!("{report}"),
        (Format::Text, Some(k)) => println!("#{k} {report}"),
        (Format::Json, None) => println!("{}", report.to_json()),
        (Format::Json, Some(k)) => println!("{}", serde_json::json!({ "instance": k, "report": report })),
    }
}

fn gen(agents: usize, seed: u64, profile: Profile, out: Option<&Path>) -> Result<u8, UsageError> {
    if agents == 0 {
        return Err(UsageError(anyhow::anyhow!("--agents must be at least 1")));
    }
    let inst: Instance = generate_instance(&GenConfig { agents, seed, profile });
    let text = serialize_instance(&inst);
    match out {
        Some(path) => usage(fs::write(path, text).with_context(|| format!("cannot write {}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn write_fixtures(dir: &Path) -> Result<u8, UsageError> {
    usage(fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display())))?;
    let instances = fixtures::all().into_iter().map(|(name, inst)| (name, serialize_instance(&inst)));
    let schedulings = fixtures::schedulings()
        .into_iter()
        .map(|(name, xi)| (name, serialize_scheduling(&xi)));
    for (name, text) in instances.chain(schedulings) {
        let path = dir.join(name);
        usage(fs::write(&path, text).with_context(|| format!("cannot write {}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            mech,
            instance,
            trace,
            format,
        } => run(mech, instance, *trace, *format),
        Command::Verify {
            mech,
            property,
            instance,
            sweep,
            sample,
            sample_seed,
            format,
        } => verify(VerifyArgs {
            mech,
            properties: property,
            instance: instance.as_deref(),
            sweep: *sweep,
            sample: sample.map(|draws| SampleConfig {
                seed: *sample_seed,
                draws,
            }),
            format: *format,
        }),
        Command::Gen {
            agents,
            seed,
            profile,
            out,
        } => gen(*agents, *seed, *profile, out.as_deref()),
        Command::Fixtures { out } => write_fixtures(out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
