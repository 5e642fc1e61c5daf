use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use hiercrt::analysis::{
    enumerate_posterior, eta_single_layer, information_rate, decompose_counts, limit_ratio,
    run_ladder, worst_case_coalition, AdversaryView, AnalysisConfig, LadderShape,
};
use hiercrt::prime::random_prime;
use hiercrt::{
    ab_reconstruct, ab_split, chss_deal, chss_reconstruct, dhss_deal, dhss_reconstruct,
    generate_compact_sequence, seeded_rng, DealResult, DealerSecrets, DigestName, Error, Hierarchy,
    OwfFamily, PublicBundle, Retain, SchemeKind, SchemeParams, Share, Theta,
};
use num_bigint::{BigUint, RandBigInt};
use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::format::{
    parse, to_canonical, Decimal, DealerSecretsFile, FormatError, ParamFile, PublicBundleFile,
    ShareFile,
};

pub const DEALER_SECRETS_FILE: &str = "dealer_secrets.NOT_FOR_PRODUCTION.json";
pub const PUBLIC_FILE: &str = "public.json";

pub fn share_file_name(participant: usize) -> String {
    format!("share_{participant}.json")
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
    #[error("{0}")]
    NotAuthorized(String),
    #[error("{0}")]
    DigestMismatch(String),
    #[error("{0}")]
    MissingPublicValue(String),
    #[error("{0}")]
    AdversaryAuthorized(String),
    #[error("{0}")]
    BudgetExceeded(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::InvalidParams(_) => 3,
            CliError::NotAuthorized(_) => 4,
            CliError::DigestMismatch(_) => 5,
            CliError::MissingPublicValue(_) => 6,
            CliError::AdversaryAuthorized(_) => 7,
            CliError::BudgetExceeded(_) => 8,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(v) => CliError::InvalidParams(v),
            Error::NotAuthorized(deficits) => CliError::NotAuthorized(format!(
                "not authorized: {}",
                deficits
                    .iter()
                    .filter(|d| d.have < d.need)
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )),
            e @ Error::TooFewShares { .. } => CliError::NotAuthorized(format!("not authorized: {e}")),
            e @ Error::MissingPublicValue { .. } => CliError::MissingPublicValue(e.to_string()),
            e @ Error::CoalitionAuthorized(_) => CliError::AdversaryAuthorized(e.to_string()),
            e @ Error::IntractableInstance { .. } => CliError::BudgetExceeded(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Core(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))
}

fn parse_scheme(s: &str) -> Result<SchemeKind, CliError> {
    s.parse().map_err(CliError::Validation)
}

fn load_params(path: &Path) -> Result<(ParamFile, SchemeParams), CliError> {
    let file: ParamFile = parse(&read(path)?)?;
    let params = file.to_params()?;
    Ok((file, params))
}

/// A generator seeded explicitly, or from OS entropy with a commitment to
/// the drawn seed.
fn dealer_rng(seed: Option<u64>) -> (ChaCha20Rng, Option<String>) {
    match seed {
        Some(s) => (seeded_rng(s), None),
        None => {
            let mut bytes = [0u8; 32];
            OsRng.fill_bytes(&mut bytes);
            let commitment = hex::encode(Sha256::digest(bytes));
            (ChaCha20Rng::from_seed(bytes), Some(commitment))
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct GenParamsArgs {
    /// Secret modulus, a prime, in decimal.
    #[arg(long, conflicts_with = "m0_bits")]
    pub m0: Option<String>,
    /// Draw a random prime of this many bits for m0.
    #[arg(long)]
    pub m0_bits: Option<u64>,
    /// Participants per level, e.g. 1,2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<usize>,
    /// Cumulative thresholds per level, e.g. 1,2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub thresholds: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value = "1/2")]
    pub theta: String,
    /// sha256, sha512 or test_affine.
    #[arg(long, default_value = "sha256")]
    pub owf: String,
    #[arg(long, default_value = "hiercrt-owf-v1")]
    pub family_tag: String,
    /// dhss, chss or ab.
    #[arg(long, default_value = "dhss")]
    pub scheme: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn gen_params(args: &GenParamsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let scheme = parse_scheme(&args.scheme)?;
    let hierarchy = Hierarchy::new(args.levels.clone(), args.thresholds.clone());
    let report = hierarchy.validate();
    if !report.is_pass() {
        let list: Vec<_> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Validation(list.join("; ")));
    }
    if scheme == SchemeKind::Ab && hierarchy.levels() != 1 {
        return Err(CliError::Validation("the flat scheme takes a single level".into()));
    }
    let theta: Theta = args.theta.parse()?;
    let seed = args.seed.unwrap_or_else(|| OsRng.next_u64());
    let m0 = match (&args.m0, args.m0_bits) {
        (Some(text), _) => text.parse::<Decimal>().map_err(CliError::Validation)?.0,
        (None, Some(bits)) => random_prime(bits, &mut seeded_rng(seed)),
        (None, None) => return Err(CliError::Validation("one of --m0 or --m0-bits is required".into())),
    };
    let owf = match args.owf.as_str() {
        "test_affine" => OwfFamily::test_affine(),
        name => OwfFamily::hash_based(name.parse::<DigestName>()?, args.family_tag.as_bytes().to_vec()),
    };
    let sequence = generate_compact_sequence(&m0, hierarchy.participants(), args.k, theta, seed)?;
    let params = SchemeParams::new(sequence, hierarchy, owf).map_err(|e| match e {
        Error::InvalidParams(v) => CliError::Validation(v.join("; ")),
        other => other.into(),
    })?;
    let file = ParamFile::from_params(&params, scheme);
    write(&args.out, &to_canonical(&file))?;

    let rate = information_rate(params.sequence());
    let mut text = format!("wrote {}\n", args.out.display());
    text += &format!("params_digest {}\n", file.digest());
    for &t in params.hierarchy().thresholds() {
        text += &format!("asmuth-bloom constraint at t={t}: ok\n");
    }
    text += &format!(
        "information rate {:.9} (bound {:.9})\n",
        rate.rho, rate.analytic_bound
    );
    emit(out, &text)
}

#[derive(Args, Debug, Clone)]
pub struct DealArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// The secret, a decimal integer below m0.
    #[arg(long)]
    pub secret: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Overrides the scheme named in the parameter file.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Also write the dealer's random values (testing only).
    #[arg(long)]
    pub emit_dealer_secrets: bool,
}

fn deal_flat<R: rand::Rng + ?Sized>(
    secret: &BigUint,
    params: &SchemeParams,
    rng: &mut R,
) -> Result<DealResult, Error> {
    let t = params.hierarchy().threshold(1);
    let deal = ab_split(secret, t, params.sequence(), rng)?;
    let shares = deal
        .shares
        .iter()
        .map(|(i, v)| Share {
            participant: *i,
            level: 1,
            modulus: params.modulus(*i).clone(),
            value: v.clone(),
        })
        .collect();
    Ok(DealResult {
        shares,
        public: PublicBundle {
            scheme: SchemeKind::Ab,
            params: params.clone(),
            w: Default::default(),
        },
        dealer_secrets: Some(DealerSecrets {
            ys: vec![deal.y],
            alphas: vec![deal.alpha],
            deltas: Vec::new(),
            masks: Vec::new(),
        }),
    })
}

pub fn deal(args: &DealArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, params) = load_params(&args.params)?;
    let scheme = match &args.scheme {
        Some(s) => parse_scheme(s)?,
        None => file.scheme_kind()?,
    };
    if scheme == SchemeKind::Ab && params.hierarchy().levels() != 1 {
        return Err(CliError::Validation("the flat scheme takes a single level".into()));
    }
    let secret = args
        .secret
        .parse::<Decimal>()
        .map_err(CliError::Validation)?
        .0;
    params.check_secret(&secret)?;
    let (mut rng, commitment) = dealer_rng(args.seed);
    let retain = if args.emit_dealer_secrets {
        Retain::KeepForTesting
    } else {
        Retain::Discard
    };
    let mut result = match scheme {
        SchemeKind::Dhss => dhss_deal(&secret, &params, &mut rng, retain)?,
        SchemeKind::Chss => chss_deal(&secret, &params, &mut rng, retain)?,
        SchemeKind::Ab => deal_flat(&secret, &params, &mut rng)?,
    };
    if !args.emit_dealer_secrets {
        result.dealer_secrets = None;
    }

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out_dir.display())))?;
    let bundle = PublicBundleFile::new(&result.public, commitment);
    let digest = bundle.params.digest();
    let mut text = String::new();
    for share in &result.shares {
        let path = args.out_dir.join(share_file_name(share.participant));
        write(&path, &to_canonical(&ShareFile::new(share, scheme, &digest)))?;
        text += &format!("share {} -> {}\n", share.participant, path.display());
    }
    let public_path = args.out_dir.join(PUBLIC_FILE);
    write(&public_path, &to_canonical(&bundle))?;
    text += &format!("public -> {}\n", public_path.display());
    if let Some(secrets) = &result.dealer_secrets {
        let path = args.out_dir.join(DEALER_SECRETS_FILE);
        write(&path, &to_canonical(&DealerSecretsFile::new(secrets, scheme, &digest)))?;
        text += &format!("dealer secrets (not for production) -> {}\n", path.display());
    }
    text += &format!("params_digest {digest}\n");
    emit(out, &text)
}

#[derive(Args, Debug, Clone)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub public: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    pub shares: Vec<PathBuf>,
}

fn load_bundle(path: &Path) -> Result<(PublicBundleFile, PublicBundle), CliError> {
    let file: PublicBundleFile = parse(&read(path)?)?;
    let bundle = file.bundle()?;
    Ok((file, bundle))
}

fn load_shares(paths: &[PathBuf], bundle_file: &PublicBundleFile) -> Result<Vec<Share>, CliError> {
    let digest = bundle_file.params.digest();
    paths
        .iter()
        .map(|path| {
            let file: ShareFile = parse(&read(path)?)?;
            if file.params_digest != digest || file.scheme != bundle_file.scheme {
                return Err(CliError::DigestMismatch(format!(
                    "{} belongs to a different parameter set",
                    path.display()
                )));
            }
            Ok(file.share()?)
        })
        .collect()
}

pub fn reconstruct(args: &ReconstructArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, bundle) = load_bundle(&args.public)?;
    let shares = load_shares(&args.shares, &file)?;
    let secret = match bundle.scheme {
        SchemeKind::Dhss => dhss_reconstruct(&shares, &bundle)?,
        SchemeKind::Chss => chss_reconstruct(&shares, &bundle)?,
        SchemeKind::Ab => {
            let pairs: Vec<_> = shares
                .iter()
                .map(|s| (s.participant, s.value.clone()))
                .collect();
            let t = bundle.params.hierarchy().threshold(1);
            ab_reconstruct(&pairs, t, bundle.params.sequence())?
        }
    };
    emit(out, &format!("{secret}\n"))
}

#[derive(Args, Debug, Clone)]
pub struct AuditArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Overrides the scheme named in the parameter file.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Coalition member indices; defaults to the worst case, t_ℓ − 1 per level.
    #[arg(long, value_delimiter = ',')]
    pub adversary: Option<Vec<usize>>,
    /// Prime m0 values to regenerate the same shape at.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<String>>,
    /// Secret for the audited deal; drawn from the seed when absent.
    #[arg(long)]
    pub secret: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u128,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn ratio_json(r: &num_rational::Ratio<BigUint>) -> Value {
    json!({"numerator": r.numer().to_string(), "denominator": r.denom().to_string()})
}

pub fn audit(args: &AuditArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, params) = load_params(&args.params)?;
    let scheme = match &args.scheme {
        Some(s) => parse_scheme(s)?,
        None => file.scheme_kind()?,
    };
    let config = AnalysisConfig {
        budget: args.budget,
        epsilon_tolerance: args.epsilon,
    };
    let coalition = match &args.adversary {
        Some(a) => a.clone(),
        None => worst_case_coalition(params.hierarchy())?,
    };
    let report = match &args.ladder {
        Some(rungs) => audit_ladder(&params, scheme, rungs, &coalition, args.seed, &config)?,
        None => audit_single(&file, &params, scheme, &coalition, args, &config)?,
    };
    let text = to_canonical(&report);
    match &args.out {
        Some(path) => {
            write(path, &text)?;
            emit(out, &format!("wrote {}\n", path.display()))
        }
        None => emit(out, &text),
    }
}

fn audit_single(
    file: &ParamFile,
    params: &SchemeParams,
    scheme: SchemeKind,
    coalition: &[usize],
    args: &AuditArgs,
    config: &AnalysisConfig,
) -> Result<Value, CliError> {
    let mut rng = seeded_rng(args.seed);
    let secret = match &args.secret {
        Some(s) => s.parse::<Decimal>().map_err(CliError::Validation)?.0,
        None => rng.gen_biguint_below(params.m0()),
    };
    params.check_secret(&secret)?;
    let deal = match scheme {
        SchemeKind::Dhss => dhss_deal(&secret, params, &mut rng, Retain::Discard)?,
        SchemeKind::Chss => chss_deal(&secret, params, &mut rng, Retain::Discard)?,
        SchemeKind::Ab => deal_flat(&secret, params, &mut rng)?,
    };
    if let Some(&bad) = coalition
        .iter()
        .find(|&&i| i == 0 || i > params.hierarchy().participants())
    {
        return Err(CliError::Validation(format!("no participant {bad}")));
    }
    let shares = coalition
        .iter()
        .map(|&i| deal.shares[i - 1].clone())
        .collect();
    let view = AdversaryView::hierarchical(shares, deal.public)?;
    let report = enumerate_posterior(&view, config)?;

    let mut groups: std::collections::BTreeMap<&BigUint, u64> = Default::default();
    for c in &report.per_secret_counts {
        *groups.entry(c).or_default() += 1;
    }
    let groups: Vec<Value> = groups
        .into_iter()
        .map(|(y, gamma)| json!({"count": y.to_string(), "gamma": gamma}))
        .collect();
    let decomposition = match decompose_counts(&report, &view) {
        Ok(d) => json!({
            "holds": true,
            "floors": d.floors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "gamma_total": d.gamma_total,
            "weighted_sum": d.weighted_sum.to_string(),
        }),
        Err(e) => json!({"holds": false, "error": e.to_string()}),
    };
    let eta = match eta_single_layer(&report, &view) {
        Ok(e) => json!({
            "eta": e.eta.to_string(),
            "d1": e.d1,
            "d2": e.d2,
            "candidates": e.candidates.to_string(),
        }),
        Err(_) => Value::Null,
    };
    let ratios: Vec<Value> = (1..=params.hierarchy().levels())
        .map(|l| match limit_ratio(l, &view) {
            Ok(r) => json!({"level": l, "ratio": ratio_json(&r)}),
            Err(_) => json!({"level": l, "ratio": Value::Null}),
        })
        .collect();
    let rate = information_rate(params.sequence());
    Ok(json!({
        "scheme": scheme.to_string(),
        "params_digest": file.digest(),
        "adversary": coalition,
        "total": report.total.to_string(),
        "groups": groups,
        "secret_entropy": report.secret_entropy,
        "conditional_entropy": report.conditional_entropy,
        "loss": report.loss,
        "likelihood_conditional_entropy": report.likelihood_conditional_entropy,
        "likelihood_loss": report.likelihood_loss,
        "epsilon_tolerance": report.epsilon_tolerance,
        "within_tolerance": report.within_tolerance(),
        "decomposition": decomposition,
        "eta": eta,
        "limit_ratios": ratios,
        "rho": rate.rho,
        "rho_bound": rate.analytic_bound,
    }))
}

fn audit_ladder(
    params: &SchemeParams,
    scheme: SchemeKind,
    rungs: &[String],
    coalition: &[usize],
    seed: u64,
    config: &AnalysisConfig,
) -> Result<Value, CliError> {
    let m0s = rungs
        .iter()
        .map(|r| r.parse::<Decimal>().map(|d| d.0).map_err(CliError::Validation))
        .collect::<Result<Vec<_>, _>>()?;
    let seq = params.sequence();
    let shape = LadderShape {
        scheme,
        level_sizes: params.hierarchy().level_sizes().to_vec(),
        thresholds: params.hierarchy().thresholds().to_vec(),
        k: seq.k,
        theta: seq.theta,
    };
    let results = run_ladder(&shape, &m0s, Some(coalition), seed, config)?;
    let decreasing = results.windows(2).all(|w| w[1].loss < w[0].loss);
    let rows: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "m0": r.m0.to_string(),
                "moduli": r.moduli.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "total": r.total.to_string(),
                "loss": r.loss,
                "likelihood_loss": r.likelihood_loss,
                "minority_fraction": r.minority_fraction,
                "rho": r.rho,
            })
        })
        .collect();
    Ok(json!({
        "scheme": scheme.to_string(),
        "adversary": coalition,
        "ladder": rows,
        "loss_strictly_decreasing": decreasing,
    }))
}

#[derive(Args, Debug, Clone)]
pub struct InspectArgs {
    pub file: PathBuf,
}

pub fn inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read(&args.file)?;
    let (kind, body, extra) = if let Ok(f) = parse::<ParamFile>(&text) {
        ("params", to_canonical(&f), format!("params_digest {}\n", f.digest()))
    } else if let Ok(f) = parse::<ShareFile>(&text) {
        ("share", to_canonical(&f), String::new())
    } else if let Ok(f) = parse::<PublicBundleFile>(&text) {
        let digest = f.params.digest();
        ("public bundle", to_canonical(&f), format!("params_digest {digest}\n"))
    } else if let Ok(f) = parse::<DealerSecretsFile>(&text) {
        ("dealer secrets", to_canonical(&f), String::new())
    } else {
        return Err(CliError::Validation(format!(
            "{} is not a recognised hiercrt file",
            args.file.display()
        )));
    };
    emit(out, &format!("kind {kind}\n{extra}{body}"))
}
