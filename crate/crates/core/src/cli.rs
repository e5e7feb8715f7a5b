//! Batch command line. Every subcommand writes a plain-text report; exit
//! codes are 0 yes/pass, 1 no/fail, 2 unknown/resource, 3 usage/parse.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::primeseq::{cache, PrimeSequence, DEFAULT_STAGE_CAP};
use crate::rank1::Rank1Group;
use crate::reduction::{
    build_group, build_ring, characterize_m, classify, QuantifierTable2, QuantifierTable4,
};
use crate::stablerange::{
    check_certificate, is_cancellable, parse_description, stable_range_with_bound, CancelInput,
    ParsedDescription, Verdict, DEFAULT_OBSTRUCTION_BOUND,
};
use crate::treegroup::probe::{default_window, safe_bound};
use crate::treegroup::{
    parse_node, pure_component_probe, verify_decomposition, GeneratorSet, GroupLattice,
    ProbeFamily, TreeT, Truncation,
};

pub const CACHE_DIR_ENV: &str = "CANCELLABLE_CACHE_DIR";

pub const EXIT_YES: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "cancellable", version, about = "Prime sequences, stable range and cancellation for torsion-free groups")]
pub struct Cli {
    /// Omit timings and other run-dependent lines.
    #[arg(long, global = true)]
    pub canonical: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Sequence cache file (default: $CANCELLABLE_CACHE_DIR/primeseq.cache,
    /// else ./primeseq.cache).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Allow more than the default number of sequence stages.
    #[arg(long, global = true)]
    pub allow_large_stages: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or verify the cached prime sequence.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Decide whether 1 is in the stable range of ℤ_M.
    #[command(subcommand)]
    Sr(SrCmd),
    /// Decide cancellation for a rank-1 group file.
    #[command(subcommand)]
    Cancel(CancelCmd),
    /// Realize the quantifier-table reductions.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Truncations of the tree-indexed group.
    #[command(subcommand)]
    Tree(TreeCmd),
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    Build {
        #[arg(long, default_value_t = 2)]
        stages: usize,
    },
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum SrCmd {
    Check {
        description: PathBuf,
        /// Moduli searched for an obstruction.
        #[arg(long, default_value_t = DEFAULT_OBSTRUCTION_BOUND)]
        bound: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CancelCmd {
    Check { group: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ReduceCmd {
    /// Print the heights of G(x) for a Π⁰₄ table.
    Build { table: PathBuf },
    /// Cancellability of G(x) with its certificate.
    Classify { table: PathBuf },
    /// The ring R(x) for a Π⁰₂ table.
    Ring { table: PathBuf },
}

#[derive(Debug, Args)]
pub struct TruncArgs {
    pub tree: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub s_max: usize,
    #[arg(long, default_value_t = 2)]
    pub i_max: usize,
    #[arg(long, default_value_t = 3)]
    pub k_max: u32,
    #[arg(long, default_value_t = 2)]
    pub w: usize,
}

#[derive(Debug, Subcommand)]
pub enum TreeCmd {
    /// List the generators of the truncation.
    Build(TruncArgs),
    /// Split every generator along a path into A and the B^s parts.
    VerifyDecomposition {
        #[command(flatten)]
        trunc: TruncArgs,
        /// Path as a/b/c.
        #[arg(long)]
        path: String,
    },
    /// Elements of a small box divisible by every prime of a family.
    Probe {
        #[command(flatten)]
        trunc: TruncArgs,
        /// t, x<i>, x<a,b,...> or r<s>.
        #[arg(long)]
        family: String,
        /// Box radius (default: largest radius divisibility cannot reach, at most 2).
        #[arg(long)]
        bound: Option<i64>,
    },
}

struct Ctx {
    canonical: bool,
    cache: PathBuf,
    allow_large: bool,
    out: String,
}

/// A failure that ends the run with an exit code.
struct Stop(u8, String);

type Res = Result<u8, Stop>;

fn usage(msg: impl Into<String>) -> Stop {
    Stop(EXIT_USAGE, msg.into())
}

fn read(path: &Path) -> Result<String, Stop> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn default_cache_path() -> PathBuf {
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(cache::FILE_NAME),
        None => PathBuf::from(cache::FILE_NAME),
    }
}

impl Ctx {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        if !s.as_ref().ends_with('\n') {
            self.out.push('\n');
        }
    }

    fn timing(&mut self, label: &str, start: Instant) {
        if !self.canonical {
            let _ = writeln!(self.out, "{label}: {:.3?}", start.elapsed());
        }
    }

    fn check_cap(&self, stages: usize) -> Result<(), Stop> {
        if stages > DEFAULT_STAGE_CAP && !self.allow_large {
            return Err(Stop(
                EXIT_UNKNOWN,
                format!(
                    "refusing to build {stages} stages: a_i grows super-exponentially and the cap is {DEFAULT_STAGE_CAP}; pass --allow-large-stages to override"
                ),
            ));
        }
        Ok(())
    }

    /// The cached sequence if present, else one built in memory with
    /// `want` stages (capped).
    fn sequence(&mut self, want: usize) -> Result<Arc<PrimeSequence>, Stop> {
        if self.cache.exists() {
            let seq = cache::load(&self.cache)
                .map_err(|e| Stop(EXIT_NO, format!("cache {}: {e}", self.cache.display())))?;
            self.line(format!("sequence: cache with {} stages", seq.stages_built()));
            return Ok(Arc::new(seq));
        }
        let stages = if self.allow_large { want } else { want.min(DEFAULT_STAGE_CAP) };
        let seq = PrimeSequence::build(stages).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
        self.line(format!("sequence: built {stages} stages in memory"));
        Ok(Arc::new(seq))
    }

    /// The cached sequence, extended in memory when it is too short.
    fn sequence_with(&mut self, needed: usize) -> Result<Arc<PrimeSequence>, Stop> {
        self.check_cap(needed)?;
        let seq = self.sequence(needed)?;
        if seq.stages_built() >= needed {
            return Ok(seq);
        }
        let mut seq = (*seq).clone();
        seq.extend(needed).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
        self.line(format!("sequence: extended to {needed} stages in memory"));
        Ok(Arc::new(seq))
    }
}

/// Run with explicit arguments (the first is the program name) and return
/// the exit code. Reports go to stdout or `--output`; errors to stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
        }
    };
    let (code, out, err) = execute(&cli);
    if let Some(msg) = err {
        eprintln!("error: {msg}");
    }
    match &cli.output {
        Some(p) => {
            if let Err(e) = fs::write(p, &out) {
                eprintln!("error: {}: {e}", p.display());
                return EXIT_UNKNOWN;
            }
        }
        None => print!("{out}"),
    }
    code
}

/// Exit code, report text and an optional error message.
pub fn execute(cli: &Cli) -> (u8, String, Option<String>) {
    let mut ctx = Ctx {
        canonical: cli.canonical,
        cache: cli.cache.clone().unwrap_or_else(default_cache_path),
        allow_large: cli.allow_large_stages,
        out: String::new(),
    };
    let res = match &cli.command {
        Command::Seq(c) => cmd_seq(&mut ctx, c),
        Command::Sr(SrCmd::Check { description, bound }) => cmd_sr(&mut ctx, description, *bound),
        Command::Cancel(CancelCmd::Check { group }) => cmd_cancel(&mut ctx, group),
        Command::Reduce(c) => cmd_reduce(&mut ctx, c),
        Command::Tree(c) => cmd_tree(&mut ctx, c),
    };
    match res {
        Ok(code) => (code, ctx.out, None),
        Err(Stop(code, msg)) => (code, ctx.out, Some(msg)),
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => EXIT_YES,
        Verdict::No => EXIT_NO,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn cmd_seq(ctx: &mut Ctx, cmd: &SeqCmd) -> Res {
    match cmd {
        SeqCmd::Build { stages } => {
            ctx.check_cap(*stages)?;
            let start = Instant::now();
            let seq = if ctx.cache.exists() {
                let mut seq = cache::load(&ctx.cache)
                    .map_err(|e| Stop(EXIT_NO, format!("existing cache {}: {e}", ctx.cache.display())))?;
                seq.extend(*stages).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
                seq
            } else {
                PrimeSequence::build(*stages).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?
            };
            ctx.timing("build", start);
            cache::save(&seq, &ctx.cache).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
            ctx.line(format!("cache: {} ({} stages)", ctx.cache.display(), seq.stages_built()));
            let report = seq.verify_invariants();
            ctx.line(report.to_string());
            Ok(if report.all_passed() { EXIT_YES } else { EXIT_NO })
        }
        SeqCmd::Verify => {
            let text = read(&ctx.cache)?;
            let parts = cache::parse_parts(&text).map_err(|e| Stop(EXIT_NO, e.to_string()))?;
            let seq = PrimeSequence::from_parts_unchecked(parts);
            let start = Instant::now();
            let report = seq.verify_invariants();
            ctx.timing("verify", start);
            ctx.line(report.to_string());
            match report.first_failure() {
                None => Ok(EXIT_YES),
                Some(f) => Err(Stop(EXIT_NO, format!("clause {} fails", f.clause))),
            }
        }
    }
}

fn cmd_sr(ctx: &mut Ctx, path: &Path, bound: u64) -> Res {
    let parsed = parse_description(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let seq = match &parsed {
        ParsedDescription::ColumnUnion(rule) => Some(ctx.sequence(rule.required_stage())?),
        _ => None,
    };
    let desc = parsed.resolve(|_| seq.expect("column unions load a sequence"));
    let start = Instant::now();
    let v = stable_range_with_bound(&desc, bound);
    ctx.timing("decide", start);
    ctx.line(format!("description: {}", desc.kind()));
    ctx.line(v.to_string());
    let audited = check_certificate(&desc, &v);
    ctx.line(format!("certificate audit: {}", if audited { "pass" } else { "FAIL" }));
    if !audited {
        return Err(Stop(EXIT_UNKNOWN, "certificate failed its audit".into()));
    }
    Ok(verdict_code(v.verdict))
}

fn cmd_cancel(ctx: &mut Ctx, path: &Path) -> Res {
    let g = Rank1Group::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if !g.label().is_empty() {
        ctx.line(format!("group: {}", g.label()));
    }
    let v = is_cancellable(CancelInput::Group(&g));
    ctx.line(v.to_string());
    Ok(verdict_code(v.verdict))
}

fn table4(path: &Path) -> Result<QuantifierTable4, Stop> {
    QuantifierTable4::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_reduce(ctx: &mut Ctx, cmd: &ReduceCmd) -> Res {
    match cmd {
        ReduceCmd::Build { table } => {
            let t = table4(table)?;
            let b = t.bounds();
            let seq = ctx.sequence_with(b.i_max + b.j_max)?;
            let g = build_group(&t, &seq).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
            ctx.line(format!("table: {} ({})", t.label(), if t.is_total() { "total" } else { "cutoff" }));
            ctx.line(g.to_string());
            let m = characterize_m(&t, seq).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
            ctx.line("infinite-height primes are those of:");
            ctx.line(m.to_file_string());
            Ok(EXIT_YES)
        }
        ReduceCmd::Classify { table } => {
            let t = table4(table)?;
            let b = t.bounds();
            let seq = ctx.sequence_with(b.i_max + b.j_max)?;
            let v = classify(&t, seq).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
            ctx.line(format!("table: {}", t.label()));
            ctx.line(v.to_string());
            Ok(verdict_code(v.verdict))
        }
        ReduceCmd::Ring { table } => {
            let t = QuantifierTable2::parse(&read(table)?)
                .map_err(|e| usage(format!("{}: {e}", table.display())))?;
            let (i, j) = t.bounds();
            let seq = ctx.sequence_with(i + j)?;
            let r = build_ring(&t, seq).map_err(|e| Stop(EXIT_UNKNOWN, e.to_string()))?;
            ctx.line(format!("table: {}", t.label()));
            ctx.line(r.to_string());
            Ok(if r.consistent { EXIT_YES } else { EXIT_NO })
        }
    }
}

fn truncation(ctx: &mut Ctx, a: &TruncArgs) -> Result<(TreeT, GeneratorSet), Stop> {
    let tree = TreeT::parse(&read(&a.tree)?).map_err(|e| usage(format!("{}: {e}", a.tree.display())))?;
    let trunc = Truncation::covering(&tree, a.s_max, a.i_max, a.k_max, a.w).map_err(|e| usage(e.to_string()))?;
    let set = GeneratorSet::build(&tree, &trunc).map_err(|e| usage(e.to_string()))?;
    ctx.line(format!(
        "truncation: {} nodes, S_max {}, I_max {}, K_max {}, W {}",
        tree.len(),
        a.s_max,
        a.i_max,
        a.k_max,
        a.w
    ));
    Ok((tree, set))
}

fn cmd_tree(ctx: &mut Ctx, cmd: &TreeCmd) -> Res {
    match cmd {
        TreeCmd::Build(a) => {
            let (_, set) = truncation(ctx, a)?;
            ctx.line(set.allocation().to_string());
            ctx.line(format!("generators {}", set.len()));
            let lines: Vec<String> = set.generators().iter().map(|g| g.to_string()).collect();
            ctx.line(lines.join("\n"));
            Ok(EXIT_YES)
        }
        TreeCmd::VerifyDecomposition { trunc, path } => {
            let (_, set) = truncation(ctx, trunc)?;
            let path = parse_node(path).map_err(usage)?;
            let start = Instant::now();
            let lattice = GroupLattice::new(&set, false);
            let report = verify_decomposition(&set, &lattice, &path).map_err(|e| usage(e.to_string()))?;
            ctx.timing("verify", start);
            ctx.line(report.to_string());
            Ok(if report.passed() { EXIT_YES } else { EXIT_NO })
        }
        TreeCmd::Probe { trunc, family, bound } => {
            let (_, set) = truncation(ctx, trunc)?;
            let fam = ProbeFamily::parse(family).ok_or_else(|| usage(format!("unknown family {family:?}")))?;
            let primes = fam.primes(&set);
            if primes.is_empty() {
                return Err(usage(format!("family {fam} has no primes in this truncation")));
            }
            let bound = bound.unwrap_or_else(|| safe_bound(&primes, fam.required_height(trunc.k_max), 2));
            let start = Instant::now();
            let lattice = GroupLattice::new(&set, false);
            let r = pure_component_probe(&fam, &set, &lattice, &default_window(&set), bound);
            ctx.timing("probe", start);
            ctx.line(r.to_string());
            Ok(if r.matches() { EXIT_YES } else { EXIT_NO })
        }
    }
}
