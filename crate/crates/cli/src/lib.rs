//! Command-line front end: instance I/O, solver dispatch and reports.
//!
//! Every report starts with a `#` line echoing the resolved configuration.
//! Exit codes: 0 success, 2 usage, 3 validation, 4 budget, 5 I/O.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use seqpatrol_core::online::{
    lower_bound_stream, randomized_worstcase_stream, round2, OnlineError,
};
use seqpatrol_core::{
    competitive_table, estimate_competitive_factor, game_tree_oracle, gamma_prime_closed_form,
    gamma_r_closed_form, gen_lower_bound_instance, gen_overestimation_instance,
    gen_randomized_worstcase_instance, gen_underestimation_instance, load_instance,
    simultaneous_attack_value, solve_sequential, value_with_guess, Adversary, AttackStream, Game,
    ModelError, OnlinePolicy, OverFamily, PatrolInstance, PolicyKind, SolveError, SolverLimits,
    UnderFamily,
};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "seqpatrol",
    version,
    about = "Patrolling games with sequential attacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOptions,
}

#[derive(Debug, Args)]
pub struct GlobalOptions {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Memoized states any search may create.
    #[arg(long, global = true)]
    pub max_states: Option<u64>,
    /// Attack subsets the simultaneous solver may enumerate.
    #[arg(long, global = true)]
    pub max_subsets: Option<u64>,
    /// Vertices (after unit-time expansion) the game-tree searches accept.
    #[arg(long, global = true)]
    pub oracle_max_vertices: Option<usize>,
    /// Attacker resources the game-tree searches accept.
    #[arg(long, global = true)]
    pub oracle_max_k: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium placement and value (sequential by default).
    Solve {
        instance: PathBuf,
        /// Attacker resources (default: the instance's).
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, conflicts_with = "simultaneous")]
        sequential: bool,
        #[arg(long)]
        simultaneous: bool,
    },
    /// Exact value by full game-tree search.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Cost of committing to a wrong guess of the Attacker's resources.
    Robustness {
        #[arg(long, conflicts_with = "family")]
        instance: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<GuessFamily>,
        #[arg(long)]
        k: u32,
        /// The Defender's guess k'.
        #[arg(long)]
        guess: u32,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Competitive factor of an online policy.
    Online {
        #[arg(long, conflicts_with = "family")]
        instance: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<OnlineFamily>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Coin)]
        policy: PolicyArg,
        /// Respond probability of the coin policy.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Radius of the threshold policy.
        #[arg(long)]
        radius: Option<u32>,
        /// Home vertex (default: the instance's start, else the best
        /// single-attack placement).
        #[arg(long)]
        home: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        /// Spoke targets of the randomized family (default: the worst h).
        #[arg(long)]
        h: Option<u32>,
        #[arg(long, value_enum)]
        adversary: Option<AdversaryArg>,
        /// Attack stream document for the scripted adversary.
        #[arg(long)]
        stream: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Writes a generated instance document.
    Generate {
        #[arg(long, value_enum)]
        family: GenFamily,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        guess: Option<u32>,
        #[arg(long)]
        h: Option<u32>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Output file (default: standard output).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Randomized versus deterministic competitive factors.
    Table {
        /// Comma-separated values and inclusive ranges, e.g. 3..10,100.
        #[arg(long, default_value = "3..10,100")]
        k: String,
    },
    /// Checks an instance document.
    Validate { instance: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GuessFamily {
    UnderRatio,
    UnderAdditive,
    OverStar,
    OverMid,
    OverHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnlineFamily {
    LowerBound,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    UnderRatio,
    UnderAdditive,
    OverStar,
    OverMid,
    OverHigh,
    LowerBound,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Greedy,
    FirstAlarm,
    Threshold,
    Coin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryArg {
    Exhaustive,
    Scripted,
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Budget(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Validation(m) => format!("validation error: {m}"),
            CliError::Budget(m) => format!("budget error: {m}"),
            CliError::Io(m) => format!("i/o error: {m}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Budget { .. } => CliError::Budget(format!(
                "{e}; raise the matching --max-* or --oracle-* flag"
            )),
            SolveError::Parameter(m) => CliError::Usage(m),
            SolveError::Model(m) => m.into(),
        }
    }
}

impl From<OnlineError> for CliError {
    fn from(e: OnlineError) -> Self {
        match e {
            OnlineError::Policy(m) => CliError::Usage(m),
            OnlineError::Stream(m) => CliError::Validation(m),
            OnlineError::Solve(s) => s.into(),
        }
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the process exit code.
pub fn run(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            if let Some(note) = report.stderr {
                let _ = writeln!(err, "{note}");
            }
            match out.write_all(report.stdout.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "i/o error: {e}");
                    EXIT_IO
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.message());
            e.code()
        }
    }
}

struct Report {
    stdout: String,
    stderr: Option<String>,
}

/// Runs the command on a large-stack thread inside a sized worker pool;
/// the memoized searches recurse once per game turn.
fn execute(cli: &Cli) -> Result<Report, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(1 << 30)
            .spawn_scoped(scope, || pool.install(|| dispatch(cli)))
            .map_err(|e| CliError::Io(format!("cannot start solver thread: {e}")))?
            .join()
            .unwrap_or_else(|_| Err(CliError::Io("solver thread panicked".into())))
    })
}

fn limits(global: &GlobalOptions, base: SolverLimits) -> SolverLimits {
    SolverLimits {
        max_states: global.max_states.unwrap_or(base.max_states),
        max_subsets: global.max_subsets.unwrap_or(base.max_subsets),
        oracle_max_vertices: global
            .oracle_max_vertices
            .unwrap_or(base.oracle_max_vertices),
        oracle_max_k: global.oracle_max_k.unwrap_or(base.oracle_max_k),
        ..base
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<PatrolInstance, CliError> {
    let text = read_file(path)?;
    load_instance(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Shortest decimal form; never prints a negative zero.
fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "excluded".into(), num)
}

/// Configuration echo, table rows, and the human-readable body.
struct Output {
    config: Vec<(&'static str, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    text: String,
}

impl Output {
    fn render(self, command: &str, format: Format) -> Result<String, CliError> {
        let mut s = format!("# seqpatrol {command}");
        for (k, v) in &self.config {
            s.push_str(&format!(" {k}={v}"));
        }
        s.push_str(&format!(
            " format={}\n",
            if format == Format::Csv { "csv" } else { "text" }
        ));
        match format {
            Format::Text => s.push_str(&self.text),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                s.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
            }
        }
        Ok(s)
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let g = &cli.global;
    let (name, output) = match &cli.command {
        Command::Solve {
            instance,
            k,
            simultaneous,
            ..
        } => ("solve", solve(g, instance, *k, *simultaneous)?),
        Command::Oracle { instance, k } => ("oracle", oracle(g, instance, *k)?),
        Command::Robustness {
            instance,
            family,
            k,
            guess,
            epsilon,
        } => (
            "robustness",
            robustness(g, instance.as_deref(), *family, *k, *guess, *epsilon)?,
        ),
        Command::Online { .. } => ("online", online(g, &cli.command)?),
        Command::Generate {
            family,
            k,
            guess,
            h,
            epsilon,
            output,
        } => {
            return generate(
                *family,
                *k,
                *guess,
                *h,
                *epsilon,
                output.as_deref(),
                g.format,
            )
        }
        Command::Table { k } => ("table", table(k)?),
        Command::Validate { instance } => ("validate", validate(instance)?),
    };
    Ok(Report {
        stdout: output.render(name, g.format)?,
        stderr: None,
    })
}

fn solve(
    g: &GlobalOptions,
    path: &Path,
    k: Option<u32>,
    simultaneous: bool,
) -> Result<Output, CliError> {
    let inst = read_instance(path)?;
    let k = k.unwrap_or(inst.attacker_resources());
    let game = Game::new(&inst.with_attacker_resources(k)?);
    let limits = limits(g, SolverLimits::default());
    let mode = if simultaneous {
        "simultaneous"
    } else {
        "sequential"
    };
    let config = vec![
        ("instance", path.display().to_string()),
        ("k", k.to_string()),
        ("mode", mode.to_string()),
    ];
    let header = vec![
        "mode",
        "k",
        "placement",
        "value",
        "first_target",
        "path",
        "attack",
    ];
    if simultaneous {
        let ans = simultaneous_attack_value(&game, k, &limits)?;
        let attack = game.target_names(ans.attack).join(" ");
        let text = format!(
            "mode: simultaneous\nk: {k}\nvalue: {}\nplacement: {}\nattack: {attack}\n",
            num(ans.value),
            game.name(ans.placement)
        );
        let rows = vec![vec![
            mode.into(),
            k.to_string(),
            game.name(ans.placement).into(),
            num(ans.value),
            String::new(),
            String::new(),
            attack,
        ]];
        return Ok(Output {
            config,
            header,
            rows,
            text,
        });
    }
    let ans = solve_sequential(&game, k, &limits)?;
    let mut text = format!(
        "mode: sequential\nk: {k}\nvalue: {}\nplacement: {}\n",
        num(ans.value),
        game.name(ans.placement)
    );
    let (first, path) = match &ans.answer {
        Some(eq) => {
            let first = eq
                .first_target
                .map(|t| game.instance.target_name(t).to_string())
                .unwrap_or_default();
            let path = game.names(&eq.path).join(" ");
            text.push_str(&format!("first_target: {first}\npath: {path}\n"));
            if eq.concedes {
                text.push_str("concedes: yes\n");
            }
            (first, path)
        }
        None => (String::new(), String::new()),
    };
    let rows = vec![vec![
        mode.into(),
        k.to_string(),
        game.name(ans.placement).into(),
        num(ans.value),
        first,
        path,
        String::new(),
    ]];
    Ok(Output {
        config,
        header,
        rows,
        text,
    })
}

fn oracle(g: &GlobalOptions, path: &Path, k: Option<u32>) -> Result<Output, CliError> {
    let inst = read_instance(path)?;
    let k = k.unwrap_or(inst.attacker_resources());
    let game = Game::new(&inst.with_attacker_resources(k)?);
    let limits = limits(g, SolverLimits::default());
    let ans = game_tree_oracle(&game, k, &limits)?;
    let mut text = format!(
        "value: {}\nplacement: {}\nstates: {}\n",
        num(ans.value),
        game.name(ans.placement),
        ans.states
    );
    for &(v, value) in &ans.per_placement {
        text.push_str(&format!("from {}: {}\n", game.name(v), num(value)));
    }
    for r in &ans.trace {
        let names = |ts: &mut dyn Iterator<Item = usize>| -> String {
            ts.map(|t| game.instance.target_name(t).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        text.push_str(&format!(
            "turn {}: open [{}] move {} -> {} caught [{}] lost [{}]\n",
            r.turn,
            names(&mut r.opened.iter().copied()),
            game.name(r.from),
            game.name(r.to),
            names(&mut r.caught.iter()),
            names(&mut r.lost.iter()),
        ));
    }
    let rows = ans
        .per_placement
        .iter()
        .map(|&(v, value)| vec![game.name(v).to_string(), num(value)])
        .collect();
    Ok(Output {
        config: vec![
            ("instance", path.display().to_string()),
            ("k", k.to_string()),
        ],
        header: vec!["placement", "value"],
        rows,
        text,
    })
}

fn guess_instance(
    family: GuessFamily,
    k: u32,
    guess: u32,
    epsilon: f64,
) -> Result<PatrolInstance, CliError> {
    Ok(match family {
        GuessFamily::UnderRatio => {
            gen_underestimation_instance(k, guess, epsilon, UnderFamily::Ratio)?
        }
        GuessFamily::UnderAdditive => {
            gen_underestimation_instance(k, guess, epsilon, UnderFamily::Additive)?
        }
        GuessFamily::OverStar => {
            gen_overestimation_instance(k, guess, epsilon, OverFamily::RatioStar)?
        }
        GuessFamily::OverMid => {
            gen_overestimation_instance(k, guess, epsilon, OverFamily::AdditiveMid)?
        }
        GuessFamily::OverHigh => {
            gen_overestimation_instance(k, guess, epsilon, OverFamily::AdditiveHigh)?
        }
    })
}

fn family_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

fn robustness(
    g: &GlobalOptions,
    path: Option<&Path>,
    family: Option<GuessFamily>,
    k: u32,
    guess: u32,
    epsilon: f64,
) -> Result<Output, CliError> {
    let (inst, source) = match (path, family) {
        (Some(p), _) => (read_instance(p)?, p.display().to_string()),
        (None, Some(f)) => (guess_instance(f, k, guess, epsilon)?, family_name(f)),
        (None, None) => return Err(CliError::Usage("give --instance or --family".into())),
    };
    let limits = limits(g, SolverLimits::extended());
    let a = value_with_guess(&inst, k, guess, &limits)?;
    let closed = if family.is_some() && k != guess {
        Some(gamma_prime_closed_form(k, guess, epsilon)?)
    } else {
        None
    };
    let game = Game::new(&inst);
    let placement = game.name(a.placement).to_string();
    let text = format!(
        "placement: {placement}\nv_star: {}\nv_guess: {}\nscale: {}\ngamma: {}\ngamma_prime: {}\ngamma_prime_closed_form: {}\n",
        num(a.v_star),
        num(a.v_guess),
        num(a.scale),
        opt_num(a.gamma),
        num(a.gamma_prime),
        closed.map_or_else(|| "n/a".into(), num)
    );
    let rows = vec![vec![
        k.to_string(),
        guess.to_string(),
        placement,
        num(a.v_star),
        num(a.v_guess),
        num(a.scale),
        opt_num(a.gamma),
        num(a.gamma_prime),
        closed.map_or_else(String::new, num),
    ]];
    Ok(Output {
        config: vec![
            ("source", source),
            ("k", k.to_string()),
            ("guess", guess.to_string()),
            ("epsilon", num(epsilon)),
        ],
        header: vec![
            "k",
            "guess",
            "placement",
            "v_star",
            "v_guess",
            "scale",
            "gamma",
            "gamma_prime",
            "gamma_prime_closed_form",
        ],
        rows,
        text,
    })
}

fn worst_h(k: u32) -> Result<u32, CliError> {
    Ok(competitive_table(&[k])?[0].h)
}

fn online(g: &GlobalOptions, command: &Command) -> Result<Output, CliError> {
    let Command::Online {
        instance,
        family,
        policy,
        p,
        radius,
        home,
        k,
        h,
        adversary,
        stream,
        trials,
        seed,
    } = command
    else {
        unreachable!("called for the online command")
    };
    let mut config: Vec<(&'static str, String)> = Vec::new();
    let mut closed = None;
    let (inst, default_stream) = match instance {
        Some(path) => {
            let inst = read_instance(path)?;
            let inst = match k {
                Some(k) => inst.with_attacker_resources(*k)?,
                None => inst,
            };
            config.push(("instance", path.display().to_string()));
            (inst, None)
        }
        None => {
            let k = k.ok_or_else(|| CliError::Usage("--k is required with a family".into()))?;
            match family.unwrap_or(OnlineFamily::Randomized) {
                OnlineFamily::LowerBound => {
                    config.push(("family", "lower-bound".into()));
                    (gen_lower_bound_instance(k)?, Some(lower_bound_stream(k)))
                }
                OnlineFamily::Randomized => {
                    let h = match h {
                        Some(h) => *h,
                        None => worst_h(k)?,
                    };
                    config.push(("family", "randomized".into()));
                    config.push(("h", h.to_string()));
                    closed = Some(gamma_r_closed_form(k, h)?);
                    (
                        gen_randomized_worstcase_instance(k, h)?,
                        Some(randomized_worstcase_stream(k, h)),
                    )
                }
            }
        }
    };
    let kind = match policy {
        PolicyArg::Greedy => PolicyKind::Greedy,
        PolicyArg::FirstAlarm => PolicyKind::FirstAlarm,
        PolicyArg::Threshold => PolicyKind::Threshold(radius.ok_or_else(|| {
            CliError::Usage("--radius is required by the threshold policy".into())
        })?),
        PolicyArg::Coin => PolicyKind::Coin(*p),
    };
    let pol = match home {
        Some(h) => OnlinePolicy::new(kind, h.clone()),
        None => OnlinePolicy::for_instance(kind, &inst),
    };
    let adversary_kind = adversary.unwrap_or(if trials.is_some() {
        AdversaryArg::Scripted
    } else {
        AdversaryArg::Exhaustive
    });
    let adv = match adversary_kind {
        AdversaryArg::Exhaustive => Adversary::Exhaustive,
        AdversaryArg::Scripted => {
            let s = match stream {
                Some(path) => serde_json_stream(&read_file(path)?)?,
                None => default_stream.ok_or_else(|| {
                    CliError::Usage(
                        "the scripted adversary needs --stream for this instance".into(),
                    )
                })?,
            };
            Adversary::Scripted(s)
        }
    };
    let trials = trials.unwrap_or(10_000);
    let limits = limits(g, SolverLimits::extended());
    let report = estimate_competitive_factor(&pol, &inst, &adv, trials, *seed, &limits)?;
    let adversary_name = family_name(adversary_kind);
    let policy_name = match kind {
        PolicyKind::Coin(p) => format!("coin:{}", num(p)),
        PolicyKind::Threshold(r) => format!("threshold:{r}"),
        _ => family_name(*policy),
    };
    let k = inst.attacker_resources();
    config.extend([
        ("k", k.to_string()),
        ("policy", policy_name.clone()),
        ("home", pol.home.clone()),
        ("adversary", adversary_name.clone()),
        (
            "trials",
            if adversary_kind == AdversaryArg::Scripted {
                trials.to_string()
            } else {
                "exact".into()
            },
        ),
        ("seed", seed.to_string()),
    ]);
    let mut text = format!(
        "v: {}\nv_star: {}\nscale: {}\ngamma: {}\n",
        num(report.v),
        num(report.v_star),
        num(report.scale),
        opt_num(report.gamma)
    );
    if let Some(se) = report.std_error {
        text.push_str(&format!("std_error: {}\n", num(se)));
    }
    if let Some(c) = closed {
        text.push_str(&format!("gamma_r_closed_form: {}\n", num(c)));
    }
    let rows = vec![vec![
        policy_name,
        pol.home.clone(),
        adversary_name,
        k.to_string(),
        report.trials.to_string(),
        seed.to_string(),
        num(report.v),
        num(report.v_star),
        opt_num(report.gamma),
        report.std_error.map_or_else(String::new, num),
        closed.map_or_else(String::new, num),
    ]];
    Ok(Output {
        config,
        header: vec![
            "policy",
            "home",
            "adversary",
            "k",
            "trials",
            "seed",
            "v",
            "v_star",
            "gamma",
            "std_error",
            "gamma_r_closed_form",
        ],
        rows,
        text,
    })
}

fn serde_json_stream(text: &str) -> Result<AttackStream, CliError> {
    AttackStream::from_json(text).map_err(|e| CliError::Validation(format!("attack stream: {e}")))
}

fn generate(
    family: GenFamily,
    k: u32,
    guess: Option<u32>,
    h: Option<u32>,
    epsilon: f64,
    output: Option<&Path>,
    format: Format,
) -> Result<Report, CliError> {
    let need_guess =
        || guess.ok_or_else(|| CliError::Usage("--guess is required by this family".into()));
    let inst = match family {
        GenFamily::UnderRatio => {
            guess_instance(GuessFamily::UnderRatio, k, need_guess()?, epsilon)?
        }
        GenFamily::UnderAdditive => {
            guess_instance(GuessFamily::UnderAdditive, k, need_guess()?, epsilon)?
        }
        GenFamily::OverStar => guess_instance(GuessFamily::OverStar, k, need_guess()?, epsilon)?,
        GenFamily::OverMid => guess_instance(GuessFamily::OverMid, k, need_guess()?, epsilon)?,
        GenFamily::OverHigh => guess_instance(GuessFamily::OverHigh, k, need_guess()?, epsilon)?,
        GenFamily::LowerBound => gen_lower_bound_instance(k)?,
        GenFamily::Randomized => {
            let h = match h {
                Some(h) => h,
                None => worst_h(k)?,
            };
            gen_randomized_worstcase_instance(k, h)?
        }
    };
    if format == Format::Csv {
        return Err(CliError::Usage(
            "generate writes instance documents only".into(),
        ));
    }
    let mut echo = format!("# seqpatrol generate family={} k={k}", family_name(family));
    if let Some(g) = guess {
        echo.push_str(&format!(" guess={g}"));
    }
    if let Some(h) = h {
        echo.push_str(&format!(" h={h}"));
    }
    echo.push_str(&format!(" epsilon={}", num(epsilon)));
    let doc = inst.to_json() + "\n";
    match output {
        Some(path) => {
            std::fs::write(path, doc)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Report {
                stdout: format!("{echo} output={}\n", path.display()),
                stderr: None,
            })
        }
        // the document owns standard output, so the echo goes to stderr
        None => Ok(Report {
            stdout: doc,
            stderr: Some(echo),
        }),
    }
}

/// Parses `3..10,100` into `[3, 4, ..., 10, 100]`.
pub fn parse_k_list(spec: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad k value {s:?}"))
        };
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(part)?),
        }
    }
    if out.is_empty() {
        return Err("no k values".into());
    }
    Ok(out)
}

fn table(spec: &str) -> Result<Output, CliError> {
    let ks = parse_k_list(spec).map_err(CliError::Usage)?;
    let rows = competitive_table(&ks)?;
    let mut text = format!("{:>5} {:>4} {:>8} {:>8}\n", "k", "h", "gamma_r", "gamma_d");
    for r in &rows {
        text.push_str(&format!(
            "{:>5} {:>4} {:>8} {:>8}\n",
            r.k,
            r.h,
            round2(r.gamma_r),
            round2(r.gamma_d)
        ));
    }
    Ok(Output {
        config: vec![("k", spec.to_string())],
        header: vec![
            "k",
            "h",
            "gamma_r",
            "gamma_d",
            "gamma_r_exact",
            "gamma_d_exact",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.h.to_string(),
                    round2(r.gamma_r),
                    round2(r.gamma_d),
                    num(r.gamma_r),
                    num(r.gamma_d),
                ]
            })
            .collect(),
        text,
    })
}

fn validate(path: &Path) -> Result<Output, CliError> {
    let inst = read_instance(path)?;
    let game = Game::new(&inst);
    Ok(Output {
        config: vec![("instance", path.display().to_string())],
        header: vec!["vertices", "expanded_vertices", "targets", "k"],
        rows: vec![vec![
            inst.vertex_count().to_string(),
            game.n().to_string(),
            inst.target_count().to_string(),
            inst.attacker_resources().to_string(),
        ]],
        text: format!("valid: {inst}\nexpanded vertices: {}\n", game.n()),
    })
}
