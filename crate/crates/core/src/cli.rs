//! The `cox` command line.
//!
//! Exit codes: 0 success, 1 usage, parse or precondition error, 2 numerical
//! ambiguity, 3 a verifier found counterexamples, 4 resource limit.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classify::{
    classify_subset, essential_subset, maximal_spherical_subsets, spherical_subsets,
};
use crate::error::CoxError;
use crate::hypothesis::{
    check_corollary, check_quasidense_certificate, check_w_invariance, density_profile_in,
    estimate_commuting_set, in_singleton_descent_classes, lemma_2_7_instances,
    theorem_generator_set, verify_descent_extension_in, verify_index_lemma,
    verify_infinite_intersection, verify_lemma_2_7_in, DEFAULT_MARGIN,
    DEFAULT_STABILIZATION_WINDOW,
};
use crate::parabolic::{coset_decompose, in_a_t, in_descent_class, index};
use crate::system::{parse_presentation, parse_system, CoxeterSystem, GenSubset};
use crate::words::{
    enumerate_ball, CayleyBall, Element, Numerics, ReflectionRep, Side, DEFAULT_BALL_CAP,
    DEFAULT_EPSILON,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_AMBIGUITY: i32 = 2;
pub const EXIT_COUNTEREXAMPLES: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Environment variable overriding the ball element cap.
pub const MAX_BALL_ENV: &str = "COX_MAX_BALL";

#[derive(Debug, Parser)]
#[command(name = "cox", version, about = "Coxeter systems: descents, parabolics and density certificates")]
pub struct Cli {
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Tolerance of the root sign test.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FileArg {
    /// Diagram file.
    pub file: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    #[value(name = "2.7")]
    Chain,
    DescentExtension,
    CommutingSet,
    InfiniteIntersection,
    Index,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a diagram and report matrix violations.
    Validate(FileArg),
    /// Irreducible components.
    Components(FileArg),
    /// Finiteness and type of W_T.
    Classify {
        #[command(flatten)]
        file: FileArg,
        /// Subset, comma-separated; defaults to S.
        #[arg(long)]
        t: Option<String>,
    },
    /// Spherical subsets.
    Spherical {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        maximal: bool,
    },
    /// Essential subset.
    Essential(FileArg),
    /// Parabolic subsystem on T.
    Restrict {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        t: String,
    },
    /// Order of the product of two generators.
    Order {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        s: String,
        #[arg(long = "with")]
        other: String,
    },
    /// Cayley ball of the given radius.
    Ball {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        count_only: bool,
        /// List every element with its descent set.
        #[arg(long)]
        dump: bool,
    },
    /// Word distance between two elements.
    Distance {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// ShortLex normal form, length and inverse.
    Nf {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        word: String,
    },
    /// Product of two elements.
    Multiply {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Whether two words represent the same element.
    Equal {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Descent set.
    Descents {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
    },
    /// Support and membership in W^T and A_T.
    Member {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        word: String,
        #[arg(long)]
        t: String,
    },
    /// Factorization w = u·v with u in A_T and v in W_T.
    Coset {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        word: String,
        #[arg(long)]
        t: String,
    },
    /// Index [W : W_T].
    Index {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        t: String,
    },
    /// Generators whose singleton descent classes form the theorem's set.
    TheoremSet {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        t: String,
    },
    /// Witnesses for the corollary's conditions.
    CheckCorollary {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        t: String,
    },
    /// Quasi-density certificates (U, s0).
    Certificate(FileArg),
    /// Distance profile to a union of singleton descent classes.
    #[command(group(ArgGroup::new("target").required(true).args(["t", "target_gen"])))]
    Density {
        #[command(flatten)]
        file: FileArg,
        /// Use the theorem's set for this T.
        #[arg(long)]
        t: Option<String>,
        /// Use W^{s} over these generators.
        #[arg(long)]
        target_gen: Option<String>,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: usize,
    },
    /// Whether W splits as W_T~ × W_{S∖T~}.
    Invariance {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        t: String,
    },
    /// Exhaustive ball-level lemma checks.
    Verify {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        t: Option<String>,
        /// Chain t1,..,tn for lemma 2.7; all valid chains of length <= 2 if omitted.
        #[arg(long)]
        chain: Option<String>,
        /// Generator for infinite-intersection; all admissible ones if omitted.
        #[arg(long)]
        s: Option<String>,
        #[arg(long, default_value_t = DEFAULT_STABILIZATION_WINDOW)]
        window: usize,
    },
}

/// Subcommand name and the library operations it exposes.
pub const OPERATION_TABLE: &[(&str, &[&str])] = &[
    ("validate", &["parse_presentation", "CoxeterMatrix::validate"]),
    ("components", &["irreducible_components"]),
    ("classify", &["classify_subset"]),
    ("spherical", &["spherical_subsets", "maximal_spherical_subsets"]),
    ("essential", &["essential_subset"]),
    ("restrict", &["restrict"]),
    ("order", &["product_order"]),
    ("ball", &["enumerate_ball"]),
    ("distance", &["word_distance"]),
    ("nf", &["normal_form", "inverse"]),
    ("multiply", &["mul"]),
    ("equal", &["equals"]),
    ("descents", &["descent_set"]),
    ("member", &["support", "in_descent_class", "in_a_t"]),
    ("coset", &["coset_decompose"]),
    ("index", &["index"]),
    ("theorem-set", &["theorem_generator_set"]),
    ("check-corollary", &["check_corollary"]),
    ("certificate", &["check_quasidense_certificate"]),
    ("density", &["density_profile"]),
    ("invariance", &["check_w_invariance"]),
    (
        "verify",
        &[
            "verify_lemma_2_7",
            "verify_descent_extension",
            "estimate_commuting_set",
            "verify_infinite_intersection",
            "verify_index_lemma",
        ],
    ),
];

#[derive(Debug)]
enum Failure {
    Usage(String),
    Cox(CoxError),
}

impl From<CoxError> for Failure {
    fn from(e: CoxError) -> Self {
        Failure::Cox(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Cox(CoxError::NumericalAmbiguity { .. }) => EXIT_AMBIGUITY,
            Failure::Cox(CoxError::ResourceLimit { .. }) => EXIT_RESOURCE,
            Failure::Cox(_) => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Cox(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

struct Report {
    system: Option<Value>,
    digest: Option<String>,
    verdict: Value,
    text: String,
    counterexamples: usize,
}

struct Session {
    system: CoxeterSystem,
    rep: Arc<ReflectionRep>,
}

impl Session {
    fn report(&self, verdict: Value, text: String) -> Report {
        Report {
            system: Some(system_json(&self.system)),
            digest: Some(self.system.digest()),
            verdict,
            text,
            counterexamples: 0,
        }
    }

    fn subset(&self, text: &str) -> Result<GenSubset, Failure> {
        Ok(self.system.parse_subset(text)?)
    }

    fn element(&self, text: &str) -> Result<Element, Failure> {
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(self.rep.identity());
        }
        Ok(self.rep.from_word(&self.system.parse_word(text)?)?)
    }

    fn generator(&self, text: &str) -> Result<usize, Failure> {
        Ok(self.system.generator(text.trim())?)
    }

    fn labels(&self, t: GenSubset) -> Vec<&str> {
        t.iter().map(|i| self.system.name(i)).collect()
    }

    fn set(&self, t: GenSubset) -> String {
        self.system.format_subset(t)
    }

    fn word(&self, w: &[u8]) -> String {
        self.system.format_word(w)
    }

    fn ball(&self, radius: usize) -> Result<CayleyBall, Failure> {
        Ok(enumerate_ball(&self.rep, radius)?)
    }
}

fn system_json(system: &CoxeterSystem) -> Value {
    json!({ "names": system.names(), "matrix": system.matrix().rows() })
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Validate(_) => "validate",
        Command::Components(_) => "components",
        Command::Classify { .. } => "classify",
        Command::Spherical { .. } => "spherical",
        Command::Essential(_) => "essential",
        Command::Restrict { .. } => "restrict",
        Command::Order { .. } => "order",
        Command::Ball { .. } => "ball",
        Command::Distance { .. } => "distance",
        Command::Nf { .. } => "nf",
        Command::Multiply { .. } => "multiply",
        Command::Equal { .. } => "equal",
        Command::Descents { .. } => "descents",
        Command::Member { .. } => "member",
        Command::Coset { .. } => "coset",
        Command::Index { .. } => "index",
        Command::TheoremSet { .. } => "theorem-set",
        Command::CheckCorollary { .. } => "check-corollary",
        Command::Certificate(_) => "certificate",
        Command::Density { .. } => "density",
        Command::Invariance { .. } => "invariance",
        Command::Verify { .. } => "verify",
    }
}

fn file_of(command: &Command) -> &PathBuf {
    match command {
        Command::Validate(f)
        | Command::Components(f)
        | Command::Essential(f)
        | Command::Certificate(f) => &f.file,
        Command::Classify { file, .. }
        | Command::Spherical { file, .. }
        | Command::Restrict { file, .. }
        | Command::Order { file, .. }
        | Command::Ball { file, .. }
        | Command::Distance { file, .. }
        | Command::Nf { file, .. }
        | Command::Multiply { file, .. }
        | Command::Equal { file, .. }
        | Command::Descents { file, .. }
        | Command::Member { file, .. }
        | Command::Coset { file, .. }
        | Command::Index { file, .. }
        | Command::TheoremSet { file, .. }
        | Command::CheckCorollary { file, .. }
        | Command::Density { file, .. }
        | Command::Invariance { file, .. }
        | Command::Verify { file, .. } => &file.file,
    }
}

fn ball_cap() -> Result<usize, Failure> {
    match std::env::var(MAX_BALL_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{MAX_BALL_ENV} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BALL_CAP),
    }
}

/// Runs `cox` with process stdout and stderr; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let started = Instant::now();
    let name = command_name(&cli.command);
    match execute(&cli) {
        Ok(report) => {
            let code = if report.counterexamples > 0 { EXIT_COUNTEREXAMPLES } else { EXIT_OK };
            if cli.json {
                let doc = json!({
                    "command": name,
                    "system_digest": report.digest,
                    "system": report.system,
                    "verdict": report.verdict,
                });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json values serialize"));
            } else {
                let _ = write!(out, "{}", report.text);
                let _ = writeln!(out, "elapsed_ms: {}", started.elapsed().as_millis());
            }
            code
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Outcome {
    let path = file_of(&cli.command);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    if let Command::Validate(_) = cli.command {
        return validate(&text);
    }
    if cli.epsilon.is_nan() || cli.epsilon <= 0.0 {
        return Err(Failure::Usage("--epsilon must be positive".into()));
    }
    let system = parse_system(&text)?;
    let numerics = Numerics { epsilon: cli.epsilon, ball_cap: ball_cap()? };
    let rep = ReflectionRep::with_numerics(system.clone(), numerics);
    let session = Session { system, rep };
    dispatch(&session, &cli.command)
}

fn validate(text: &str) -> Outcome {
    let presentation = parse_presentation(text)?;
    let violations = presentation.matrix.validate();
    let valid = violations.is_empty();
    let mut out = format!("generators: {}\n", presentation.names.join(" "));
    if valid {
        out.push_str("valid\n");
    } else {
        for v in &violations {
            out.push_str(&format!("violation: {v}\n"));
        }
    }
    let system = parse_system(text).ok();
    let report = Report {
        system: Some(json!({ "names": presentation.names, "matrix": presentation.matrix.rows() })),
        digest: system.as_ref().map(CoxeterSystem::digest),
        verdict: json!({ "valid": valid, "violations": violations }),
        text: out,
        counterexamples: 0,
    };
    if valid {
        Ok(report)
    } else {
        Err(Failure::Cox(CoxError::Invalid(violations)))
    }
}

fn dispatch(s: &Session, command: &Command) -> Outcome {
    let sys = &s.system;
    match command {
        Command::Validate(_) => unreachable!("handled before the system is built"),
        Command::Components(_) => {
            let comps = sys.irreducible_components();
            let text = comps.iter().map(|&c| format!("{}\n", s.set(c))).collect();
            let verdict: Vec<_> = comps.iter().map(|&c| s.labels(c)).collect();
            Ok(s.report(json!({ "components": verdict }), text))
        }
        Command::Classify { t, .. } => {
            let t = match t {
                Some(t) => s.subset(t)?,
                None => sys.all(),
            };
            let v = classify_subset(sys, t)?;
            let mut text = format!(
                "T = {}: {} (order {})\n",
                s.set(t),
                if v.finite { "finite" } else { "infinite" },
                v.total_order
            );
            let mut comps = Vec::new();
            for c in &v.components {
                text.push_str(&format!("  {} {} order {}\n", s.set(c.generators), c.kind, c.order));
                comps.push(json!({
                    "generators": s.labels(c.generators),
                    "type": c.kind,
                    "order": c.order,
                }));
            }
            let verdict = json!({
                "t": s.labels(t),
                "finite": v.finite,
                "total_order": v.total_order,
                "components": comps,
            });
            Ok(s.report(verdict, text))
        }
        Command::Spherical { maximal, .. } => {
            let list = if *maximal { maximal_spherical_subsets(sys) } else { spherical_subsets(sys) };
            let text = list.iter().map(|&t| format!("{}\n", s.set(t))).collect();
            let verdict: Vec<_> = list.iter().map(|&t| s.labels(t)).collect();
            Ok(s.report(json!({ "maximal": maximal, "subsets": verdict }), text))
        }
        Command::Essential(_) => {
            let e = essential_subset(sys);
            Ok(s.report(json!({ "essential": s.labels(e) }), format!("{}\n", s.set(e))))
        }
        Command::Restrict { t, .. } => {
            let t = s.subset(t)?;
            let sub = sys.restrict(t)?;
            Ok(s.report(json!({ "restricted": system_json(&sub) }), sub.to_diagram()))
        }
        Command::Order { s: a, other, .. } => {
            let (a, b) = (s.generator(a)?, s.generator(other)?);
            let m = sys.product_order(a, b);
            Ok(s.report(json!({ "order": m }), format!("o({}{}) = {m}\n", sys.name(a), sys.name(b))))
        }
        Command::Ball { radius, count_only, dump, .. } => ball(s, *radius, *count_only, *dump),
        Command::Distance { u, v, .. } => {
            let d = s.element(u)?.word_distance(&s.element(v)?)?;
            Ok(s.report(json!({ "distance": d }), format!("{d}\n")))
        }
        Command::Nf { word, .. } => {
            let w = s.element(word)?;
            let inv = w.inverse()?;
            let verdict = json!({
                "nf": s.word(w.normal_form()),
                "length": w.length(),
                "inverse": s.word(inv.normal_form()),
            });
            let text = format!(
                "nf: {}\nlength: {}\ninverse: {}\n",
                s.word(w.normal_form()),
                w.length(),
                s.word(inv.normal_form())
            );
            Ok(s.report(verdict, text))
        }
        Command::Multiply { u, v, .. } => {
            let p = s.element(u)?.mul(&s.element(v)?)?;
            let nf = s.word(p.normal_form());
            Ok(s.report(json!({ "nf": nf, "length": p.length() }), format!("{nf}\n")))
        }
        Command::Equal { u, v, .. } => {
            let eq = s.element(u)?.equals(&s.element(v)?)?;
            Ok(s.report(json!({ "equal": eq }), format!("{eq}\n")))
        }
        Command::Descents { word, side, .. } => {
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            let d = s.element(word)?.descent_set(side)?;
            Ok(s.report(json!({ "side": side, "descents": s.labels(d) }), format!("{}\n", s.set(d))))
        }
        Command::Member { word, t, .. } => {
            let w = s.element(word)?;
            let t = s.subset(t)?;
            let support = w.support();
            let in_class = in_descent_class(&w, t)?;
            let in_a = in_a_t(&w, t)?;
            let verdict = json!({
                "support": s.labels(support),
                "in_parabolic": support.is_subset_of(t),
                "in_descent_class": in_class,
                "in_a_t": in_a,
            });
            let text = format!(
                "support: {}\nin W_T: {}\nin W^T: {in_class}\nin A_T: {in_a}\n",
                s.set(support),
                support.is_subset_of(t)
            );
            Ok(s.report(verdict, text))
        }
        Command::Coset { word, t, .. } => {
            let (u, v) = coset_decompose(&s.element(word)?, s.subset(t)?)?;
            let (u, v) = (s.word(u.normal_form()), s.word(v.normal_form()));
            Ok(s.report(json!({ "u": u, "v": v }), format!("u: {u}\nv: {v}\n")))
        }
        Command::Index { t, .. } => {
            let i = index(sys, s.subset(t)?)?;
            Ok(s.report(json!({ "index": i }), format!("{i}\n")))
        }
        Command::TheoremSet { t, .. } => {
            let set = theorem_generator_set(sys, s.subset(t)?)?;
            Ok(s.report(json!({ "generators": s.labels(set) }), format!("{}\n", s.set(set))))
        }
        Command::CheckCorollary { t, .. } => {
            let t = s.subset(t)?;
            let witnesses = check_corollary(sys, t)?;
            let mut text = format!("{} witnesses\n", witnesses.len());
            let mut rows = Vec::new();
            for w in &witnesses {
                text.push_str(&format!(
                    "U={} s={} u0={} condition {}\n",
                    s.set(w.u),
                    sys.name(w.s),
                    sys.name(w.u0),
                    w.condition
                ));
                rows.push(json!({
                    "U": s.labels(w.u),
                    "s": sys.name(w.s),
                    "u0": sys.name(w.u0),
                    "condition": w.condition,
                    "T_tilde": s.labels(w.t_tilde),
                }));
            }
            Ok(s.report(json!({ "t": s.labels(t), "witnesses": rows }), text))
        }
        Command::Certificate(_) => {
            let certs = check_quasidense_certificate(sys);
            let mut text = String::new();
            let mut rows = Vec::new();
            for c in &certs {
                text.push_str(&format!("U={} s0={}\n", s.set(c.u), sys.name(c.s0)));
                rows.push(json!({ "U": s.labels(c.u), "s0": sys.name(c.s0) }));
            }
            Ok(s.report(json!({ "certificates": rows }), text))
        }
        Command::Density { t, target_gen, radius, margin, .. } => {
            let (description, gens) = match (t, target_gen) {
                (Some(t), _) => {
                    let t = s.subset(t)?;
                    let gens = theorem_generator_set(sys, t)?;
                    (format!("theorem set for T = {}", s.set(t)), gens)
                }
                (None, Some(g)) => {
                    let gens = s.subset(g)?;
                    (format!("union of W^{{s}} over s in {}", s.set(gens)), gens)
                }
                (None, None) => unreachable!("clap requires one target flag"),
            };
            if radius <= margin {
                return Err(Failure::Cox(CoxError::Precondition(format!(
                    "outer radius {radius} must exceed margin {margin}"
                ))));
            }
            let ball = s.ball(*radius)?;
            let p = density_profile_in(&ball, &description, |w| in_singleton_descent_classes(w, gens), *margin)?;
            let mut text = format!(
                "target: {} ({} elements in ball({}))\nr  max_distance  reliable  witness\n",
                p.target, p.target_count, p.radius
            );
            let mut rows = Vec::new();
            for row in &p.rows {
                let d = row.max_distance.map_or("none".to_string(), |d| d.to_string());
                text.push_str(&format!(
                    "{}  {}  {}  {}\n",
                    row.radius,
                    d,
                    row.boundary_reliable,
                    s.word(&row.witness)
                ));
                rows.push(json!({
                    "radius": row.radius,
                    "max_distance": row.max_distance,
                    "witness": s.word(&row.witness),
                    "boundary_reliable": row.boundary_reliable,
                }));
            }
            let verdict = json!({
                "target": p.target,
                "target_generators": s.labels(gens),
                "radius": p.radius,
                "margin": p.margin,
                "target_count": p.target_count,
                "rows": rows,
            });
            Ok(s.report(verdict, text))
        }
        Command::Invariance { t, .. } => {
            let t = s.subset(t)?;
            let inv = check_w_invariance(sys, t)?;
            Ok(s.report(json!({ "t": s.labels(t), "invariant": inv }), format!("{inv}\n")))
        }
        Command::Verify { lemma, radius, t, chain, s: gen, window, .. } => {
            verify(s, *lemma, *radius, t.as_deref(), chain.as_deref(), gen.as_deref(), *window)
        }
    }
}

fn ball(s: &Session, radius: usize, count_only: bool, dump: bool) -> Outcome {
    let ball = s.ball(radius)?;
    let spheres = ball.sphere_sizes();
    let mut text = format!("radius: {radius}\nelements: {}\n", ball.len());
    let mut verdict = json!({ "radius": radius, "size": ball.len() });
    if !count_only {
        text.push_str(&format!(
            "sphere sizes: {}\nsaturated: {}\n",
            spheres.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
            ball.is_saturated()
        ));
        verdict["sphere_sizes"] = json!(spheres);
        verdict["saturated"] = json!(ball.is_saturated());
    }
    if dump {
        let mut elements = Vec::with_capacity(ball.len());
        for w in ball.elements() {
            let d = w.right_descents()?;
            text.push_str(&format!("{}  {}\n", s.word(w.normal_form()), s.set(d)));
            elements.push(json!({
                "nf": s.word(w.normal_form()),
                "length": w.length(),
                "descents": s.labels(d),
            }));
        }
        verdict["elements"] = json!(elements);
    }
    Ok(s.report(verdict, text))
}

fn verify(
    s: &Session,
    lemma: Lemma,
    radius: Option<usize>,
    t: Option<&str>,
    chain: Option<&str>,
    gen: Option<&str>,
    window: usize,
) -> Outcome {
    let sys = &s.system;
    let required_t = || -> Result<GenSubset, Failure> {
        t.map(|t| s.subset(t))
            .unwrap_or_else(|| Err(Failure::Usage("--t is required for this lemma".into())))
    };
    let (verdict, text, bad) = match lemma {
        Lemma::Chain => {
            let radius = radius.unwrap_or(6);
            let instances = match (t, chain) {
                (_, Some(c)) => {
                    let t = t.map(|t| s.subset(t)).transpose()?.unwrap_or(GenSubset::EMPTY);
                    vec![(t, sys.parse_word(c)?)]
                }
                (Some(_), None) => {
                    return Err(Failure::Usage("--t requires --chain for lemma 2.7".into()))
                }
                (None, None) => lemma_2_7_instances(sys, 2),
            };
            let ball = s.ball(radius)?;
            let mut rows = Vec::new();
            let mut text = String::new();
            let mut total = 0;
            for (t, chain) in &instances {
                let found = verify_lemma_2_7_in(&ball, *t, chain)?;
                total += found.len();
                let chain_word: Vec<u8> = chain.iter().map(|&c| c as u8).collect();
                text.push_str(&format!(
                    "T={} chain={}: {} counterexamples\n",
                    s.set(*t),
                    s.word(&chain_word),
                    found.len()
                ));
                rows.push(json!({
                    "t": s.labels(*t),
                    "chain": s.word(&chain_word),
                    "counterexamples": found.iter().map(|w| s.word(w)).collect::<Vec<_>>(),
                }));
            }
            (json!({ "lemma": "2.7", "radius": radius, "instances": rows }), text, total)
        }
        Lemma::DescentExtension => {
            let radius = radius.unwrap_or(6);
            let found = verify_descent_extension_in(&s.ball(radius)?)?;
            let rows: Vec<_> = found
                .iter()
                .map(|(w, s0)| json!({ "w": s.word(w), "s0": sys.name(*s0) }))
                .collect();
            let mut text = String::new();
            for (w, s0) in &found {
                text.push_str(&format!("w={} s0={}\n", s.word(w), sys.name(*s0)));
            }
            (
                json!({ "lemma": "descent-extension", "radius": radius, "counterexamples": rows }),
                text,
                found.len(),
            )
        }
        Lemma::CommutingSet => {
            let radius = radius.unwrap_or(8);
            let t = required_t()?;
            let r = estimate_commuting_set(&s.rep, t, radius, window)?;
            let mut text = format!("T~ = {}\n", s.set(r.t_tilde));
            let mut rows = Vec::new();
            for g in &r.rows {
                text.push_str(&format!(
                    "{}: counts {} stabilized {}\n",
                    sys.name(g.generator),
                    g.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
                    g.stabilized
                ));
                rows.push(json!({
                    "s": sys.name(g.generator),
                    "counts": g.counts,
                    "stabilized": g.stabilized,
                }));
            }
            text.push_str(&format!("U_est = {}\n", s.set(r.u_estimate)));
            let disc: Vec<_> = r
                .discrepancies
                .iter()
                .map(|&(a, b)| json!([sys.name(a), sys.name(b)]))
                .collect();
            for &(a, b) in &r.discrepancies {
                text.push_str(&format!("discrepancy: m({},{}) != 2\n", sys.name(a), sys.name(b)));
            }
            let verdict = json!({
                "lemma": "commuting-set",
                "radius": radius,
                "window": window,
                "T_tilde": s.labels(r.t_tilde),
                "rows": rows,
                "U_est": s.labels(r.u_estimate),
                "discrepancies": disc,
            });
            (verdict, text, r.discrepancies.len())
        }
        Lemma::InfiniteIntersection => {
            let radius = radius.unwrap_or(12);
            let t = required_t()?;
            let gens: Vec<usize> = match gen {
                Some(g) => vec![s.generator(g)?],
                None => {
                    let t_tilde = crate::classify::essential_within(sys, t)?;
                    sys.all()
                        .difference(t)
                        .iter()
                        .filter(|&x| t_tilde.iter().any(|y| sys.m(x, y).at_least(3)))
                        .collect()
                }
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut bad = 0;
            for g in gens {
                let table = verify_infinite_intersection(&s.rep, t, g, radius)?;
                if !table.holds() {
                    bad += 1;
                }
                let counts: Vec<usize> = table.counts.iter().map(|&(_, c)| c).collect();
                text.push_str(&format!(
                    "{}: counts {} checkpoints {:?} holds {}\n",
                    sys.name(g),
                    counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
                    table.checkpoints,
                    table.holds()
                ));
                rows.push(json!({
                    "s": sys.name(g),
                    "counts": counts,
                    "checkpoints": table.checkpoints,
                    "monotone": table.monotone,
                    "strictly_increasing": table.strictly_increasing,
                    "positive": table.positive,
                }));
            }
            (
                json!({ "lemma": "infinite-intersection", "radius": radius, "t": s.labels(t), "rows": rows }),
                text,
                bad,
            )
        }
        Lemma::Index => {
            let subsets: Vec<GenSubset> = match t {
                Some(t) => vec![s.subset(t)?],
                None => (0..1u32 << sys.rank()).map(GenSubset::from_mask).collect(),
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut bad = 0;
            for t in subsets {
                let c = verify_index_lemma(&s.rep, t)?;
                if !c.holds {
                    bad += 1;
                }
                text.push_str(&format!(
                    "T={}: |A_T|={} |W_T|={} |W|={} holds {}\n",
                    s.set(t),
                    c.minimal_representatives,
                    c.parabolic_order,
                    c.group_order,
                    c.holds
                ));
                rows.push(json!({
                    "t": s.labels(t),
                    "a_t": c.minimal_representatives,
                    "parabolic_order": c.parabolic_order,
                    "group_order": c.group_order,
                    "index": c.index.to_string(),
                    "holds": c.holds,
                }));
            }
            (json!({ "lemma": "index", "rows": rows }), text, bad)
        }
    };
    let mut report = s.report(json!({ "counterexample_count": bad, "details": verdict }), text);
    report.text.push_str(&format!("{bad} counterexamples\n"));
    report.counterexamples = bad;
    Ok(report)
}
