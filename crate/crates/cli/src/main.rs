//! `powerclass`: command-line access to group-ring arithmetic, annihilators,
//! exceptional modules, norm pairs, cyclotomic towers and the reproduction
//! suites.

use clap::{Args, Parser, Subcommand};
use powerclass_core::cyclotower::{
    b_vector_cyclotomic, cyclopair_witness, norm, shift_representative, tower_data, verify_norm_pair, CycloNumber,
    TowerSpec, WitnessTuple,
};
use powerclass_core::fpmod::{
    decide_property_p, exceptional_module, fp_dimension, free_rank_over_quotient, has_property_p, is_eigenmodule,
    is_trivial_under, scalar_conductor, verify_property_p_certificate, ModulePresentation, SubgroupSpec,
};
use powerclass_core::groupring::{
    eval_phi, poly_p, poly_q_at, poly_t, project, GroupRingElement, GroupRingParams,
};
use powerclass_core::ideals::annihilator;
use powerclass_core::normpair::{
    a_from_b, check_minimality_conditions, compare_norm_pairs, embedding_statement, interpolate,
    recover_from_interpolated, BVector, ExtNat, NormEntry, NormPair, NormVector,
};
use powerclass_core::report::CheckList;
use powerclass_core::suites::{run_suite, Suite};
use powerclass_core::Error;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "powerclass", version, about = "Exact computations for p-power classes of cyclic p-power extensions")]
struct Cli {
    /// Print a JSON payload instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Arithmetic in (Z/p^m)[Z/p^i].
    #[command(subcommand)]
    Ring(RingCommand),
    /// Annihilator ideal of an element of R_m G_level.
    Ann {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value_t = u32::MAX)]
        level: u32,
        element: String,
    },
    /// Finitely presented modules over R_m G.
    #[command(subcommand)]
    Module(ModuleCommand),
    /// Norm pair combinatorics.
    #[command(subcommand)]
    Pair(PairCommand),
    /// Cyclotomic towers K = Q(zeta_M) over the fixed field of sigma.
    #[command(subcommand)]
    Tower(TowerCommand),
    /// Run a reproduction suite: identities, annihilators, modules, pairs, towers or all.
    Reproduce { suite: String },
}

#[derive(Args, Clone, Copy)]
struct RingArgs {
    #[arg(short = 'p')]
    p: u64,
    #[arg(short = 'n')]
    n: u32,
    #[arg(short = 'm')]
    m: u32,
}

impl RingArgs {
    fn params(self) -> Result<GroupRingParams, Error> {
        GroupRingParams::new(self.p, self.n, self.m)
    }

    fn level(self, level: u32) -> u32 {
        if level == u32::MAX {
            self.n
        } else {
            level
        }
    }
}

#[derive(Subcommand)]
enum RingCommand {
    /// P(i,j) in R_m G_i.
    #[command(name = "poly-P", alias = "poly-p")]
    PolyP {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
    },
    /// Q_d(i,j) in R_m G_i.
    #[command(name = "poly-Q", alias = "poly-q")]
    PolyQ {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        /// Accept d outside 1 + pZ.
        #[arg(long)]
        no_unit_check: bool,
    },
    /// T_d(i) in R_m G_i.
    #[command(name = "poly-T", alias = "poly-t")]
    PolyT {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        i: u32,
    },
    /// Product of two elements of R_m G_level.
    Mul {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value_t = u32::MAX)]
        level: u32,
        x: String,
        y: String,
    },
    /// The evaluation sigma -> d.
    Phi {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value_t = u32::MAX)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        x: String,
    },
    /// The quotient map R_m G_level -> R_m G_j.
    Project {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value_t = u32::MAX)]
        level: u32,
        #[arg(long)]
        j: u32,
        x: String,
    },
}

#[derive(Args)]
struct ModuleSource {
    #[command(flatten)]
    ring: RingArgs,
    /// Exceptional module X(a,d): the vector a.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Exceptional module X(a,d): the twist d.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<i64>,
    /// Direct sum of R_m G/(sigma^(p^k) - 1) for the listed k.
    #[arg(long, value_delimiter = ',')]
    free: Option<Vec<u32>>,
    /// A presentation file in the text format printed by `module build-X`.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl ModuleSource {
    fn build(&self) -> Result<ModulePresentation, Error> {
        let params = self.ring.params()?;
        match (&self.a, self.d, &self.free, &self.file) {
            (Some(a), Some(d), None, None) => exceptional_module(params, &a.parse()?, d as i128),
            (None, None, Some(ks), None) => ModulePresentation::free_quotient_sum(params, ks),
            (None, None, None, Some(path)) => ModulePresentation::parse(params, &read(path)?),
            _ => Err(Error::Parse("give exactly one of --a with --d, --free, or --file".into())),
        }
    }
}

#[derive(Subcommand)]
enum ModuleCommand {
    /// The exceptional module X(a,d).
    #[command(name = "build-X", alias = "build-x")]
    BuildX {
        #[command(flatten)]
        source: ModuleSource,
    },
    /// Whether H_t acts through a single scalar.
    Eigen {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long)]
        h: u32,
    },
    /// Search for a property P(H_t) certificate.
    #[command(name = "property-p")]
    PropertyP {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long)]
        h: u32,
        /// Bounded search over sums of at most this many terms; omit for the exact decision.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Freeness over R_m(H_t/H_s).
    Free {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        s: u32,
    },
    /// dim over F_p of M/pM.
    Dim {
        #[command(flatten)]
        source: ModuleSource,
    },
    /// The ideal of c in R_m with c g in the span of the other generators.
    Conductor {
        #[command(flatten)]
        source: ModuleSource,
        #[arg(long)]
        g: String,
        #[arg(long, value_delimiter = ',')]
        others: Vec<String>,
    },
}

#[derive(Subcommand)]
enum PairCommand {
    /// Compare two norm pairs of equal length.
    Compare {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'm')]
        m: u32,
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
    },
    /// The interpolated vector.
    Interpolate {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Recover a from its interpolated vector.
    Recover {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Necessary conditions for minimality that only involve (a, d).
    Minimality {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(allow_hyphen_values = true)]
        pair: String,
    },
    /// Recover a from a b-vector.
    #[command(name = "from-b")]
    FromB {
        #[arg(short = 'n')]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// The embedding problem encoded by b_i.
    Embed {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        i: u32,
        #[arg(short = 'n')]
        n: u32,
        #[arg(long = "big-i")]
        big_i: u32,
    },
}

#[derive(Args)]
struct TowerArgs {
    /// Tower file: {"p": 3, "conductor": 27, "sigma": 4, "m": 2}.
    #[arg(long)]
    spec: PathBuf,
    /// Length m; overrides the value in the tower file.
    #[arg(short = 'm')]
    m: Option<u32>,
}

impl TowerArgs {
    fn load(&self) -> Result<(TowerSpec, Option<u32>), Error> {
        let (tower, m) = TowerSpec::from_json(&read(&self.spec)?)?;
        Ok((tower, self.m.or(m)))
    }

    fn load_with_m(&self) -> Result<(TowerSpec, usize), Error> {
        let (tower, m) = self.load()?;
        let m = m.ok_or_else(|| Error::Parse("length m missing: pass -m or set \"m\" in the tower file".into()))?;
        Ok((tower, m as usize))
    }
}

#[derive(Subcommand)]
enum TowerCommand {
    /// n, omega, nu, the cyclotomic character and whether K = F(zeta_(p^nu)).
    Data {
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// The norm from K_from to K_to of an element written in z = zeta_M.
    Norm {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Check a witness file against a norm pair.
    Verify {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        pair: String,
    },
    /// The explicit witness (zeta_(p^nu), 1, ..., 1) of a cyclotomic tower.
    Cyclopair {
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Shift a representative to twist d + p^(s-1) x.
    Shift {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        pair: String,
        #[arg(long)]
        s: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
    },
    /// The b-vector of a cyclotomic tower with its norm certificates.
    #[command(name = "b-vector")]
    BVector {
        #[command(flatten)]
        tower: TowerArgs,
    },
}

/// What a command produced: a text report, a JSON payload and a verdict.
struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

impl Outcome {
    fn pass(text: impl Into<String>, json: Value) -> Self {
        Self { text: text.into(), json, ok: true }
    }

    fn verdict(text: impl Into<String>, json: Value, ok: bool) -> Self {
        Self { text: text.into(), json, ok }
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn entry_json(e: NormEntry) -> Value {
    match e {
        NormEntry::NegInf => json!("-inf"),
        NormEntry::Finite(v) => json!(v),
    }
}

fn ext_json(e: ExtNat) -> Value {
    match e.finite() {
        Some(v) => json!(v),
        None => json!("inf"),
    }
}

fn vector_json(a: &NormVector) -> Value {
    Value::Array(a.entries().iter().copied().map(entry_json).collect())
}

fn pair_json(pair: &NormPair) -> Value {
    json!({ "a": vector_json(&pair.a), "d": pair.d })
}

fn element_json(x: &GroupRingElement) -> Value {
    json!({ "level": x.level(), "coeffs": x.coeffs(), "text": x.to_string() })
}

fn checks_json(list: &CheckList) -> Value {
    serde_json::to_value(list).expect("check lists serialize")
}

fn element(ring: RingArgs, level: u32, text: &str) -> Result<GroupRingElement, Error> {
    GroupRingElement::parse(ring.params()?, ring.level(level), text)
}

fn subgroup(module: &ModulePresentation, t: u32) -> Result<SubgroupSpec, Error> {
    SubgroupSpec::new(module.params(), t)
}

fn run_ring(cmd: RingCommand) -> Result<Outcome, Error> {
    let x = match cmd {
        RingCommand::PolyP { ring, i, j } => poly_p(ring.params()?, i, j)?,
        RingCommand::PolyQ { ring, d, i, j, no_unit_check } => poly_q_at(ring.params()?, d as i128, i, j, i, !no_unit_check)?,
        RingCommand::PolyT { ring, d, i } => poly_t(ring.params()?, d as i128, i)?,
        RingCommand::Mul { ring, level, x, y } => element(ring, level, &x)?.mul(&element(ring, level, &y)?)?,
        RingCommand::Phi { ring, level, d, x } => {
            let value = eval_phi(&element(ring, level, &x)?, d as i128)?;
            return Ok(Outcome::pass(value.to_string(), json!({ "value": value })));
        }
        RingCommand::Project { ring, level, j, x } => project(&element(ring, level, &x)?, j)?,
    };
    Ok(Outcome::pass(x.to_string(), json!({ "element": element_json(&x) })))
}

fn run_module(cmd: ModuleCommand) -> Result<Outcome, Error> {
    match cmd {
        ModuleCommand::BuildX { source } => {
            let module = source.build()?;
            let text = module.to_string();
            Ok(Outcome::pass(text.trim_end(), json!({ "presentation": text, "generators": module.generators() })))
        }
        ModuleCommand::Eigen { source, h } => {
            let module = source.build()?;
            let sub = subgroup(&module, h)?;
            Ok(match is_eigenmodule(&module, sub) {
                Some(c) => Outcome::pass(format!("eigenmodule for H_{h} with eigenvalue {c}"), json!({ "eigen": true, "eigenvalue": c })),
                None => {
                    let trivial = is_trivial_under(&module, sub);
                    Outcome::pass(format!("not an eigenmodule for H_{h}"), json!({ "eigen": false, "trivial": trivial }))
                }
            })
        }
        ModuleCommand::PropertyP { source, h, bound } => {
            let module = source.build()?;
            let sub = subgroup(&module, h)?;
            let cert = match bound {
                Some(b) => has_property_p(&module, sub, b)?,
                None => decide_property_p(&module, sub)?,
            };
            Ok(match cert {
                Some(cert) => {
                    let verified = verify_property_p_certificate(&module, sub, &cert)?;
                    let text = format!("property P(H_{h}) holds\ns: {}\ny: {}\nz: {}\nverified: {verified}", cert.s, cert.y, cert.z);
                    let payload = json!({ "property_p": true, "s": cert.s, "y": cert.y.to_string(), "z": cert.z.to_string(), "verified": verified });
                    Outcome::verdict(text, payload, verified)
                }
                None => {
                    let scope = if bound.is_some() { "no certificate within the search bound" } else { "property P fails" };
                    Outcome::pass(format!("{scope} for H_{h}"), json!({ "property_p": false, "exact": bound.is_none() }))
                }
            })
        }
        ModuleCommand::Free { source, h, s } => {
            let module = source.build()?;
            let rank = free_rank_over_quotient(&module, subgroup(&module, h)?, subgroup(&module, s)?)?;
            Ok(match rank {
                Some(r) => Outcome::pass(format!("free of rank {r} over R_m(H_{h}/H_{s})"), json!({ "free": true, "rank": r })),
                None => Outcome::pass(format!("not free over R_m(H_{h}/H_{s})"), json!({ "free": false })),
            })
        }
        ModuleCommand::Dim { source } => {
            let dim = fp_dimension(&source.build()?);
            Ok(Outcome::pass(dim.to_string(), json!({ "fp_dimension": dim })))
        }
        ModuleCommand::Conductor { source, g, others } => {
            let module = source.build()?;
            let others: Vec<&str> = others.iter().map(String::as_str).collect();
            let ideal = scalar_conductor(&module, &g, &others)?;
            Ok(Outcome::pass(ideal.to_string(), json!({ "ideal": ideal.to_string(), "log_size": ideal.log_size() })))
        }
    }
}

fn run_pair(cmd: PairCommand) -> Result<Outcome, Error> {
    match cmd {
        PairCommand::Compare { p, m, first, second } => {
            let order = compare_norm_pairs(&first.parse()?, &second.parse()?, m, p)?;
            Ok(Outcome::pass(order.to_string(), json!({ "order": order.to_string() })))
        }
        PairCommand::Interpolate { a } => {
            let out = interpolate(&a.parse()?);
            Ok(Outcome::pass(out.to_string(), json!({ "vector": vector_json(&out) })))
        }
        PairCommand::Recover { a } => {
            let out = recover_from_interpolated(&a.parse()?)?;
            Ok(Outcome::pass(out.to_string(), json!({ "vector": vector_json(&out) })))
        }
        PairCommand::Minimality { ring, pair } => {
            let pair: NormPair = pair.parse()?;
            let report = check_minimality_conditions(&pair, ring.params()?)?;
            let ok = report.passed();
            Ok(Outcome::verdict(report.to_string().trim_end(), json!({ "pair": pair_json(&pair), "checks": checks_json(&report), "pass": ok }), ok))
        }
        PairCommand::FromB { n, nu, b } => {
            let entries: NormVector = b.parse()?;
            let nu: ExtNat = nu.parse()?;
            let bv = BVector::new(entries.entries().to_vec(), nu, n);
            let a = a_from_b(&bv, entries.len())?;
            Ok(Outcome::pass(a.to_string(), json!({ "a": vector_json(&a), "nu": ext_json(nu) })))
        }
        PairCommand::Embed { b, i, n, big_i } => {
            let text = embedding_statement(b.parse()?, i, n, big_i);
            Ok(Outcome::pass(text.clone(), json!({ "statement": text })))
        }
    }
}

fn witness_output(tower: &TowerSpec, w: &WitnessTuple, pair: &NormPair, verified: bool) -> Outcome {
    let text = format!(
        "pair: {pair}\nalpha: {}\n{}verified: {verified}",
        w.alpha,
        w.deltas.iter().enumerate().map(|(i, d)| format!("delta{i} (level {}): {d}\n", w.levels[i])).collect::<String>()
    );
    let payload = json!({ "pair": pair_json(pair), "witness": w.to_json(tower.conductor()), "verified": verified });
    Outcome::verdict(text, payload, verified)
}

fn run_tower(cmd: TowerCommand) -> Result<Outcome, Error> {
    match cmd {
        TowerCommand::Data { tower } => {
            let (t, _) = tower.load()?;
            let data = tower_data(&t)?;
            let text = format!(
                "n: {}\nomega: {}\nnu: {}\ncyclotomic character: {} mod {}^{}\ncyclotomic: {}",
                data.n, data.omega, data.nu, data.cyclo_character, t.p(), data.nu, data.is_cyclotomic
            );
            Ok(Outcome::pass(text, serde_json::to_value(data).expect("tower data serializes")))
        }
        TowerCommand::Norm { tower, from, to, x } => {
            let (t, _) = tower.load()?;
            let value = norm(&t, &CycloNumber::parse(t.conductor(), &x)?, from, to)?;
            Ok(Outcome::pass(value.to_string(), json!({ "norm": value.to_json(), "text": value.to_string() })))
        }
        TowerCommand::Verify { tower, witness, pair } => {
            let (t, _) = tower.load()?;
            let w = WitnessTuple::from_json(&read(&witness)?)?;
            let pair: NormPair = pair.parse()?;
            let ok = verify_norm_pair(&t, &w, &pair)?;
            Ok(Outcome::verdict(if ok { "pass" } else { "fail" }, json!({ "pair": pair_json(&pair), "pass": ok }), ok))
        }
        TowerCommand::Cyclopair { tower } => {
            let (t, m) = tower.load_with_m()?;
            let (w, pair) = cyclopair_witness(&t, m)?;
            let ok = verify_norm_pair(&t, &w, &pair)?;
            Ok(witness_output(&t, &w, &pair, ok))
        }
        TowerCommand::Shift { tower, witness, pair, s, x } => {
            let (t, _) = tower.load()?;
            let w = WitnessTuple::from_json(&read(&witness)?)?;
            let (w2, p2) = shift_representative(&t, &w, &pair.parse()?, s, x)?;
            let ok = verify_norm_pair(&t, &w2, &p2)?;
            Ok(witness_output(&t, &w2, &p2, ok))
        }
        TowerCommand::BVector { tower } => {
            let (t, m) = tower.load_with_m()?;
            let (b, certs) = b_vector_cyclotomic(&t, m)?;
            let a = a_from_b(&b, m)?;
            let mut text = format!("b: {b}\na: {a}\n");
            for c in &certs {
                text.push_str(&format!(
                    "b_{} = -inf: N(gamma) to level {} is a primitive p^{}-th root; gamma = {}\n",
                    c.i,
                    c.level,
                    c.i + 1,
                    c.gamma
                ));
            }
            let payload = json!({
                "b": b.entries.iter().copied().map(entry_json).collect::<Vec<_>>(),
                "b_nu": entry_json(b.b_nu),
                "nu": ext_json(b.nu),
                "a": vector_json(&a),
                "certificates": certs.iter().map(|c| json!({
                    "i": c.i, "level": c.level, "gamma": c.gamma.to_json(), "norm": c.image.to_json()
                })).collect::<Vec<_>>(),
            });
            Ok(Outcome::pass(text.trim_end(), payload))
        }
    }
}

fn run_reproduce(suite: &str) -> Result<Outcome, Error> {
    let suite: Suite = suite.parse()?;
    let reports = run_suite(suite);
    let ok = reports.iter().all(|r| r.passed());
    let text: String = reports.iter().map(|r| r.to_string()).collect();
    let payload = json!({
        "criteria": reports.iter().map(|r| json!({
            "id": r.id, "title": r.title, "pass": r.passed(), "checks": checks_json(&r.checks)
        })).collect::<Vec<_>>(),
        "pass": ok,
    });
    Ok(Outcome::verdict(text.trim_end(), payload, ok))
}

fn dispatch(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Ring(cmd) => run_ring(cmd),
        Command::Ann { ring, level, element: text } => {
            let x = element(ring, level, &text)?;
            let ideal = annihilator(&x);
            Ok(Outcome::pass(ideal.to_string(), json!({ "ideal": ideal.to_string(), "log_size": ideal.log_size() })))
        }
        Command::Module(cmd) => run_module(cmd),
        Command::Pair(cmd) => run_pair(cmd),
        Command::Tower(cmd) => run_tower(cmd),
        Command::Reproduce { suite } => run_reproduce(&suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(outcome) => {
            if cli.json {
                let mut payload = serde_json::Map::new();
                payload.insert("schema".into(), json!(1));
                payload.insert("pass".into(), json!(outcome.ok));
                match outcome.json {
                    Value::Object(map) => payload.extend(map),
                    other => {
                        payload.insert("result".into(), other);
                    }
                }
                println!("{}", serde_json::to_string_pretty(&Value::Object(payload)).expect("payload serializes"));
            } else {
                println!("{}", outcome.text);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::NotARepresentative) => {
            eprintln!("error: {}", Error::NotARepresentative);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
