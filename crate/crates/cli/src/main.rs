use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lcmlat_core::complexes::{ComplexJson, SimplicialComplex};
use lcmlat_core::coordinatization::{labeling_schemes, realize, roundtrip_check, SchemeInput};
use lcmlat_core::deformation::{
    construct_deformation_with, is_valid_deformation, universal_family, FiberRule,
};
use lcmlat_core::ideals::{indexed_names, letter_names};
use lcmlat_core::lattice::LatticeJson;
use lcmlat_core::ln::{
    enumerators, ln_enumerate, ln_join, ln_leq, ln_lower_covers, ln_meet, ln_meet_irreducibles, ln_rank,
    ln_upper_covers, LnContext,
};
use lcmlat_core::resolutions::{
    betti_table, is_scarf_resolved, scarf_complex, strongly_generic_coordinatization, supports_resolution,
    total_betti, verify_scarf_filter, FilterMode, ResolutionError, Via,
};
use lcmlat_core::{FieldSpec, FiniteAtomicLattice, MonomialIdeal};

#[derive(Parser)]
#[command(name = "lcmlat", version, about = "Finite atomic lattices as abstract monomial ideals")]
struct Cli {
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Names {
    /// a..z when there are at most 26 variables, x1, x2, ... otherwise.
    Auto,
    Letters,
    Indexed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Max,
    Any,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice files: validation, summary and Hasse diagram.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// LCM lattice of a monomial ideal.
    Lcm {
        ideal: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Monomial ideal from a labeling scheme applied to a lattice or an ideal.
    Coordinatize {
        input: String,
        #[arg(long, default_value = "eccv")]
        scheme: String,
        #[arg(long, value_enum, default_value = "auto")]
        names: Names,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Recover an ideal from the multidegrees of its LCM lattice.
    Roundtrip { ideal: String },
    /// Multigraded Betti numbers.
    Betti {
        lattice: String,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, default_value = "crosscut")]
        via: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Scarf complex of a lattice.
    Scarf { lattice: String },
    /// Whether the Scarf complex accounts for every Betti number.
    ScarfResolved {
        lattice: String,
        #[arg(long, default_value = "q")]
        field: String,
    },
    /// Strongly generic coordinatization of a lattice graded of rank n.
    GenericCoordinatize {
        lattice: String,
        #[arg(long, value_enum, default_value = "auto")]
        names: Names,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The poset L(n).
    #[command(subcommand)]
    Ln(LnCmd),
    /// Deformation of exponents from a coordinatization of Q to one of P.
    Deform {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value = "max")]
        rule: Rule,
    },
    /// Coordinatization of Q from which every lattice above it is reached.
    UniversalFamily {
        lattice: String,
        #[arg(long)]
        target: Option<String>,
    },
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Whether a simplicial complex supports a resolution of a lattice.
    SupportCheck {
        lattice: String,
        complex: String,
        #[arg(long, default_value = "q")]
        field: String,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    Validate { lattice: String },
    Info { lattice: String },
    Hasse {
        lattice: String,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum LnCmd {
    /// Every lattice of L(n), one JSON object per line.
    Enumerate {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        count_only: bool,
        #[arg(long, default_value = "closure-dfs")]
        strategy: String,
    },
    /// Covers of a lattice in L(n).
    Covers {
        lattice: String,
        #[arg(long)]
        down: bool,
    },
    Meet { first: String, second: String },
    Join { first: String, second: String },
    /// Whether the first lattice lies below the second.
    Leq { lower: String, upper: String },
    /// Meet-irreducibles of L(n).
    Mi {
        #[arg(short)]
        n: usize,
    },
    Rank { lattice: String },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check the Scarf filter statements on the lattices above P.
    ScarfFilter {
        lattice: String,
        #[arg(long, default_value = "betti")]
        mode: String,
        #[arg(long, default_value = "q")]
        field: String,
    },
}

struct Failure {
    code: String,
    message: String,
}

impl Failure {
    fn new(code: &str, message: impl ToString) -> Self {
        Failure { code: code.to_string(), message: message.to_string() }
    }
}

macro_rules! coded {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new(e.code(), e)
            }
        }
    )*};
}

coded!(
    lcmlat_core::LatticeError,
    lcmlat_core::ideals::IdealError,
    lcmlat_core::coordinatization::CoordinatizationError,
    lcmlat_core::ln::LnError,
    lcmlat_core::deformation::DeformationError,
    ResolutionError
);

impl From<lcmlat_core::complexes::ComplexError> for Failure {
    fn from(e: lcmlat_core::complexes::ComplexError) -> Self {
        Failure::new("ComplexError", e)
    }
}

impl From<lcmlat_core::field::FieldError> for Failure {
    fn from(e: lcmlat_core::field::FieldError) -> Self {
        Failure::new("Usage", e)
    }
}

impl From<lcmlat_core::UnknownStrategy> for Failure {
    fn from(e: lcmlat_core::UnknownStrategy) -> Self {
        Failure::new("Usage", e)
    }
}

/// What a command produced: text for stdout and whether its verdict held.
struct Output {
    text: String,
    verdict: bool,
}

impl Output {
    fn json(v: &impl serde::Serialize) -> Self {
        Output { text: to_json(v), verdict: true }
    }

    fn text(s: String) -> Self {
        Output { text: s, verdict: true }
    }

    fn verdict(mut self, holds: bool) -> Self {
        self.verdict = holds;
        self
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::new("IoError", format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::new("IoError", format!("{path}: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(src: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(src).map_err(|e| Failure::new("ParseError", format!("{what}: {e}")))
}

fn read_lattice(path: &str) -> Result<FiniteAtomicLattice, Failure> {
    let j: LatticeJson = parse_json(&read_source(path)?, path)?;
    Ok(FiniteAtomicLattice::from_json(&j)?)
}

fn read_ideal(path: &str) -> Result<MonomialIdeal, Failure> {
    Ok(MonomialIdeal::parse(&read_source(path)?)?)
}

enum LatticeOrIdeal {
    Lattice(FiniteAtomicLattice),
    Ideal(MonomialIdeal),
}

fn read_lattice_or_ideal(path: &str) -> Result<LatticeOrIdeal, Failure> {
    let src = read_source(path)?;
    if let Ok(v) = serde_json::from_str::<Value>(&src) {
        if v.get("sets").is_some() {
            let j: LatticeJson = parse_json(&src, path)?;
            return Ok(LatticeOrIdeal::Lattice(FiniteAtomicLattice::from_json(&j)?));
        }
    }
    Ok(LatticeOrIdeal::Ideal(MonomialIdeal::parse(&src)?))
}

fn rename(m: MonomialIdeal, names: Names) -> Result<MonomialIdeal, Failure> {
    let k = m.num_variables();
    let fresh = match names {
        Names::Auto | Names::Letters if k <= 26 => letter_names(k),
        Names::Letters => return Err(Failure::new("Usage", format!("{k} variables do not fit in a..z"))),
        _ => indexed_names(k),
    };
    Ok(m.with_names(fresh)?)
}

fn ideal_output(m: &MonomialIdeal, format: Format) -> Result<Output, Failure> {
    match format {
        Format::Text => Ok(Output::text(format!("{}\n", m.to_text()))),
        Format::Json => Ok(Output::json(&m.to_json())),
        Format::Dot => Err(Failure::new("Usage", "ideals have no DOT rendering")),
    }
}

fn lattice_list(ls: &[FiniteAtomicLattice]) -> Output {
    Output::json(&ls.iter().map(|l| l.to_json()).collect::<Vec<_>>())
}

fn sets(l: &FiniteAtomicLattice, es: impl IntoIterator<Item = lcmlat_core::ElementRef>) -> Vec<Vec<usize>> {
    es.into_iter().map(|e| l.set(e).atoms().collect()).collect()
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Lattice(LatticeCmd::Validate { lattice }) => {
            let j: LatticeJson = parse_json(&read_source(&lattice)?, &lattice)?;
            match FiniteAtomicLattice::from_json(&j) {
                Ok(l) => Ok(Output::json(&json!({"valid": true, "n": l.n(), "size": l.len()}))),
                Err(e) => Ok(Output::json(&json!({"valid": false, "code": e.code(), "message": e.to_string()}))
                    .verdict(false)),
            }
        }
        Command::Lattice(LatticeCmd::Info { lattice }) => {
            let l = read_lattice(&lattice)?;
            let (lo, hi) = l.chain_length_range();
            let g = l.is_graded();
            Ok(Output::json(&json!({
                "n": l.n(),
                "size": l.len(),
                "meet_irreducibles": sets(&l, l.meet_irreducibles()),
                "maximal_chains": l.maximal_chains().len(),
                "chain_lengths": [lo, hi],
                "graded": g.graded,
                "rank": g.rank,
                "ln_rank": ln_rank(&l),
            })))
        }
        Command::Lattice(LatticeCmd::Hasse { lattice, format }) => {
            let l = read_lattice(&lattice)?;
            match format {
                Format::Dot | Format::Text => Ok(Output::text(l.to_dot())),
                Format::Json => {
                    let covers: Vec<Value> = l
                        .elements()
                        .flat_map(|e| {
                            let l = &l;
                            l.covers_of(e).into_iter().map(move |c| json!([sets(l, [e])[0], sets(l, [c])[0]]))
                        })
                        .collect();
                    Ok(Output::json(&json!({"elements": sets(&l, l.elements()), "covers": covers})))
                }
            }
        }
        Command::Lcm { ideal, format } => {
            let m = read_ideal(&ideal)?;
            let ll = m.lcm_lattice();
            match format {
                Format::Json => {
                    let j = ll.lattice.to_json();
                    let degrees: Vec<Vec<u64>> = j
                        .sets
                        .iter()
                        .map(|s| {
                            let set = lcmlat_core::AtomSet::from_atoms(s.iter().copied()).unwrap_or_default();
                            let e = ll.lattice.index_of(set).expect("listed sets are members");
                            ll.multidegree(e).to_dense(m.num_variables())
                        })
                        .collect();
                    Ok(Output::json(&json!({"n": j.n, "sets": j.sets, "vars": m.variables(), "multidegrees": degrees})))
                }
                Format::Dot => Ok(Output::text(ll.lattice.to_dot())),
                Format::Text => {
                    let mut s = String::new();
                    for e in ll.lattice.elements() {
                        s.push_str(&format!("{}\t{}\n", ll.lattice.set(e), ll.multidegree(e).render(m.variables())));
                    }
                    Ok(Output::text(s))
                }
            }
        }
        Command::Coordinatize { input, scheme, names, format } => {
            let schemes = labeling_schemes();
            let s = schemes.get(&scheme)?;
            let labeling = match read_lattice_or_ideal(&input)? {
                LatticeOrIdeal::Lattice(l) => s.label(SchemeInput::Lattice(&l))?,
                LatticeOrIdeal::Ideal(m) => {
                    let ll = m.lcm_lattice();
                    let lab = s.label(SchemeInput::Lcm(&ll))?;
                    // Deficit labels already use the ideal's own variables.
                    if scheme == "deficit" {
                        return ideal_output(&realize(&lab)?, format);
                    }
                    lab
                }
            };
            ideal_output(&rename(realize(&labeling)?, names)?, format)
        }
        Command::Roundtrip { ideal } => {
            let m = read_ideal(&ideal)?;
            let holds = roundtrip_check(&m)?;
            Ok(Output::json(&json!({"roundtrip": holds, "ideal": m.to_text()})).verdict(holds))
        }
        Command::Betti { lattice, field, via, format } => {
            let l = read_lattice(&lattice)?;
            let table = betti_table(&l, field.parse()?, via.parse::<Via>()?)?;
            match format {
                Format::Json => Ok(Output::json(&table.to_json())),
                Format::Text => Ok(Output::text(table.to_text())),
                Format::Dot => Err(Failure::new("Usage", "Betti tables have no DOT rendering")),
            }
        }
        Command::Scarf { lattice } => {
            let l = read_lattice(&lattice)?;
            let x = scarf_complex(&l);
            Ok(Output::json(&json!({"complex": x.to_json(), "f_vector": x.f_vector()})))
        }
        Command::ScarfResolved { lattice, field } => {
            let l = read_lattice(&lattice)?;
            let field: FieldSpec = field.parse()?;
            let holds = is_scarf_resolved(&l, field)?;
            let totals = total_betti(&l, field)?;
            let faces = scarf_complex(&l).f_vector();
            Ok(Output::json(&json!({"scarf_resolved": holds, "totals": totals, "scarf_f_vector": faces}))
                .verdict(holds))
        }
        Command::GenericCoordinatize { lattice, names, format } => {
            let l = read_lattice(&lattice)?;
            let m = strongly_generic_coordinatization(&l)?;
            ideal_output(&rename(m, names)?, format)
        }
        Command::Ln(cmd) => run_ln(cmd),
        Command::Deform { from, to, rule } => {
            let q = read_lattice(&from)?;
            let p = read_lattice(&to)?;
            let rule = match rule {
                Rule::Max => FiberRule::Max,
                Rule::Any => FiberRule::Any,
                Rule::All => FiberRule::All,
            };
            let c = construct_deformation_with(&p, &q, rule)?;
            let verdict = is_valid_deformation(&c.deformation)?;
            Ok(Output::json(&json!({
                "m_q": c.m_q.to_json(),
                "m_p": c.m_p.to_json(),
                "deformation": c.deformation.to_json(),
                "valid": verdict.valid,
                "witness": verdict.witness,
                "chain_count_epsilon": c.chain_count_epsilon,
                "chain_count_matches": c.chain_count_matches(),
            }))
            .verdict(verdict.valid))
        }
        Command::UniversalFamily { lattice, target } => {
            let q = read_lattice(&lattice)?;
            let fam = universal_family(&q)?;
            let mut out = json!({"m_q": fam.m_q().to_json()});
            if let Some(t) = target {
                let p = read_lattice(&t)?;
                out["deformation"] = serde_json::to_value(fam.deform_to(&p)?.to_json()).expect("serializable");
            }
            Ok(Output::json(&out))
        }
        Command::Verify(VerifyCmd::ScarfFilter { lattice, mode, field }) => {
            let l = read_lattice(&lattice)?;
            let report = verify_scarf_filter(&l, field.parse()?, mode.parse::<FilterMode>()?)?;
            let holds = report.counterexamples.is_empty();
            Ok(Output::json(&report).verdict(holds))
        }
        Command::SupportCheck { lattice, complex, field } => {
            let l = read_lattice(&lattice)?;
            let cj: ComplexJson = parse_json(&read_source(&complex)?, &complex)?;
            let x = SimplicialComplex::from_json(&cj)?;
            let cert = supports_resolution(&l, &x, None, field.parse()?)?;
            Ok(Output::json(&cert.to_json(&l)).verdict(cert.supports))
        }
    }
}

fn run_ln(cmd: LnCmd) -> Result<Output, Failure> {
    match cmd {
        LnCmd::Enumerate { n, count_only, strategy } => {
            let ctx = LnContext::new(n)?;
            let registry = enumerators();
            let e = registry.get(&strategy)?;
            if count_only {
                return Ok(Output::text(format!("{}\n", lcmlat_core::ln::ln_count(ctx, e)?)));
            }
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            let mut err = None;
            ln_enumerate(ctx, e, |l| {
                if err.is_none() {
                    if let Err(e) = serde_json::to_writer(&mut w, &l.to_json()).map_err(io::Error::from).and_then(|_| writeln!(w)) {
                        err = Some(e);
                    }
                }
            })?;
            w.flush().map_err(|e| Failure::new("IoError", e))?;
            match err {
                Some(e) => Err(Failure::new("IoError", e)),
                None => Ok(Output::text(String::new())),
            }
        }
        LnCmd::Covers { lattice, down } => {
            let l = read_lattice(&lattice)?;
            Ok(lattice_list(&if down { ln_lower_covers(&l) } else { ln_upper_covers(&l) }))
        }
        LnCmd::Meet { first, second } => Ok(Output::json(&ln_meet(&read_lattice(&first)?, &read_lattice(&second)?)?.to_json())),
        LnCmd::Join { first, second } => Ok(Output::json(&ln_join(&read_lattice(&first)?, &read_lattice(&second)?)?.to_json())),
        LnCmd::Leq { lower, upper } => {
            let holds = ln_leq(&read_lattice(&lower)?, &read_lattice(&upper)?)?;
            Ok(Output::json(&json!({"leq": holds})).verdict(holds))
        }
        LnCmd::Mi { n } => Ok(lattice_list(&ln_meet_irreducibles(LnContext::new(n)?))),
        LnCmd::Rank { lattice } => Ok(Output::text(format!("{}\n", ln_rank(&read_lattice(&lattice)?)))),
    }
}

fn report(f: &Failure) {
    let body = json!({"error": {"code": f.code, "message": f.message}});
    let _ = writeln!(io::stderr(), "{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report(&Failure::new("Usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    if let Some(k) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            report(&Failure::new("Usage", e));
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
            if out.verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            report(&f);
            ExitCode::from(2)
        }
    }
}
