//! One entry per subcommand: `run` builds the outputs, `recheck` verifies
//! serialized outputs against the input using only the verifier module.

use divseq::adversary::{
    adversarial_open_set, avoiding_base, separation_profile, AdversarialSet, AvoidanceCertificate, Mode, SeparationProfile,
};
use divseq::category::{
    bump_transfer_demo, log_form_view, remark_witness, theorem3_witness, wave_family_probe, BumpDemo, LogFormView, RemarkWitness,
    Theorem3Witness, WaveProbeOutcome, WaveVariant,
};
use divseq::exact::rational::{serde_nat, serde_vec};
use divseq::omega::{diagonal_dominator, le_star_verdict, monotone_envelope, ViolationReport};
use divseq::sequence::{condition_c_probe, coverage_functional, make_generator, theorem2_sequence, ProbeOutcome, WaveShape};
use divseq::verify::{
    brute_coverage, verify_block_terms, verify_bump, verify_certificates, verify_dominator, verify_envelope, verify_probe, verify_profile,
    verify_remark, verify_theorem3, verify_wave, Check,
};
use divseq::{DivergingSequence, Interval, OmegaFunction, OpenSet, PatternSet, Rational, SequenceFamily, SequenceSpec};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::input::{field, field_or_self, typed};

pub struct Computed {
    pub outputs: Value,
    pub approximate: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn computed<T: Serialize>(x: &T, approximate: bool) -> Result<Computed, CliError> {
    Ok(Computed {
        outputs: to_value(x),
        approximate,
    })
}

/// Fills in a default precision for log sequences that do not name one.
pub fn with_precision(spec: SequenceSpec, bits: u32) -> SequenceSpec {
    match spec {
        SequenceSpec::Log { x, precision_bits } => SequenceSpec::Log {
            x,
            precision_bits: Some(precision_bits.unwrap_or(bits)),
        },
        SequenceSpec::Translate { base, r } => SequenceSpec::Translate {
            base: Box::new(with_precision(*base, bits)),
            r,
        },
        other => other,
    }
}

fn family(source: &str, input: &Value, bits: u32) -> Result<SequenceFamily, CliError> {
    let specs: Vec<SequenceSpec> = typed(source, "family", field_or_self(input, "family"))?;
    let specs: Vec<SequenceSpec> = specs.into_iter().map(|s| with_precision(s, bits)).collect();
    Ok(SequenceFamily::from_specs(&specs)?)
}

fn sequence(source: &str, value: &Value, bits: u32) -> Result<divseq::Generator, CliError> {
    let spec: SequenceSpec = typed(source, "sequence", value)?;
    Ok(make_generator(&with_precision(spec, bits))?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HorizonArgs {
    pub horizon: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecisionArgs {
    pub horizon: u64,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeArgs {
    pub hits: u64,
    pub horizon: u64,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdversaryArgs {
    pub horizon: u64,
    pub mode: Mode,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem3Args {
    pub depth: usize,
    pub start: Interval,
    pub log_form: bool,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemarkArgs {
    pub hits: usize,
    pub target: Interval,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveArgs {
    pub denominator: u64,
    pub hits: usize,
    pub horizon: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MemberReport {
    member: usize,
    report: ViolationReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DominateOut {
    #[serde(with = "serde_nat::vec")]
    dominator: Vec<BigUint>,
    reports: Vec<MemberReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ValuesOut {
    #[serde(with = "serde_nat::vec")]
    values: Vec<BigUint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BlockOut {
    #[serde(with = "serde_vec")]
    terms: Vec<Rational>,
    /// Index of the first term of each block that starts below the horizon.
    block_starts: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CoverageOut {
    values: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AdversaryOut {
    open_set: OpenSet,
    certificates: Vec<AvoidanceCertificate>,
    profile: SeparationProfile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Theorem3Out {
    witness: Theorem3Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_form: Option<LogFormView>,
}

fn functions(source: &str, input: &Value) -> Result<Vec<OmegaFunction>, CliError> {
    typed(source, "functions", field_or_self(input, "functions"))
}

fn wave_inputs(source: &str, input: &Value) -> Result<(PatternSet, WaveVariant), CliError> {
    let set: PatternSet = typed(source, "set", field(source, input, "set")?)?;
    let variant = match input.get("variant") {
        Some(v) => typed(source, "variant", v)?,
        None => WaveVariant::Wave {
            shape: WaveShape::default(),
        },
    };
    Ok((set, variant))
}

pub fn run(command: &str, source: &str, input: &Value, args: &Value) -> Result<Computed, CliError> {
    match command {
        "dominate" => {
            let a: HorizonArgs = typed("args", "dominate", args)?;
            let fs = functions(source, input)?;
            let g = diagonal_dominator(&fs)?;
            let dominator = g.tabulate(a.horizon);
            let prefix = OmegaFunction::prefix(dominator.clone())?;
            let reports = fs
                .iter()
                .enumerate()
                .map(|(member, f)| {
                    Ok(MemberReport {
                        member,
                        report: le_star_verdict(f, &prefix, a.horizon)?,
                    })
                })
                .collect::<Result<_, divseq::Error>>()?;
            computed(&DominateOut { dominator, reports }, false)
        }
        "envelope" => {
            let a: HorizonArgs = typed("args", "envelope", args)?;
            let f: OmegaFunction = typed(source, "function", field_or_self(input, "function"))?;
            computed(
                &ValuesOut {
                    values: monotone_envelope(&f).tabulate(a.horizon),
                },
                false,
            )
        }
        "theorem2" => {
            let a: HorizonArgs = typed("args", "theorem2", args)?;
            let g: OmegaFunction = typed(source, "g", field_or_self(input, "g"))?;
            let s = theorem2_sequence(g)?;
            let terms = s.terms_range(0, a.horizon)?;
            let mut block_starts = Vec::new();
            for m in 0.. {
                let start = s.block_start(m)?;
                if start >= a.horizon {
                    break;
                }
                block_starts.push(start);
            }
            computed(&BlockOut { terms, block_starts }, false)
        }
        "coverage" => {
            let a: PrecisionArgs = typed("args", "coverage", args)?;
            let s = sequence(source, field_or_self(input, "sequence"), a.precision_bits)?;
            let values = (0..a.horizon).map(|i| coverage_functional(&s, i)).collect::<Result<_, _>>()?;
            computed(&CoverageOut { values }, s.is_approximate())
        }
        "probe-c" => {
            let a: ProbeArgs = typed("args", "probe-c", args)?;
            let fam = family(source, field(source, input, "family")?, a.precision_bits)?;
            let set: OpenSet = typed(source, "set", field(source, input, "set")?)?;
            let outcome = condition_c_probe(&fam, &set, a.hits, a.horizon)?;
            computed(&outcome, fam.is_approximate())
        }
        "adversary" => {
            let a: AdversaryArgs = typed("args", "adversary", args)?;
            let fam = family(source, input, a.precision_bits)?;
            let base = avoiding_base(&fam);
            let profile = separation_profile(&fam, &base, a.mode, a.horizon)?;
            let AdversarialSet { open_set, certificates } = adversarial_open_set(&fam, &profile)?;
            computed(
                &AdversaryOut {
                    open_set,
                    certificates,
                    profile,
                },
                fam.is_approximate(),
            )
        }
        "theorem3" => {
            let a: Theorem3Args = typed("args", "theorem3", args)?;
            let set: PatternSet = typed(source, "set", field_or_self(input, "set"))?;
            let witness = theorem3_witness(&set, a.depth, &a.start)?;
            let log_form = if a.log_form {
                Some(log_form_view(&witness, a.precision_bits)?)
            } else {
                None
            };
            let approximate = log_form.is_some();
            computed(&Theorem3Out { witness, log_form }, approximate)
        }
        "remark" => {
            let a: RemarkArgs = typed("args", "remark", args)?;
            let set: PatternSet = typed(source, "set", field(source, input, "set")?)?;
            let s = sequence(source, field(source, input, "sequence")?, a.precision_bits)?;
            let w = remark_witness(&set, &s, &a.target, a.hits)?;
            computed(&w, s.is_approximate())
        }
        "wave" => {
            let a: WaveArgs = typed("args", "wave", args)?;
            let (set, variant) = wave_inputs(source, input)?;
            computed(&wave_family_probe(&set, &variant, a.denominator, a.hits, a.horizon)?, false)
        }
        "demo-bump" => {
            let a: PrecisionArgs = typed("args", "demo-bump", args)?;
            let fam = family(source, input, a.precision_bits)?;
            let demo = bump_transfer_demo(&fam, a.horizon)?;
            computed(&demo, fam.is_approximate())
        }
        other => Err(CliError::Input(format!("unknown command `{other}`"))),
    }
}

pub fn recheck(command: &str, source: &str, input: &Value, args: &Value, outputs: &Value) -> Result<Vec<Check>, CliError> {
    match command {
        "dominate" => {
            let out: DominateOut = typed("report", "outputs", outputs)?;
            let fs = functions(source, input)?;
            let mut failures = Vec::new();
            for (j, f) in fs.iter().enumerate() {
                let naive: Vec<u64> = (0..out.dominator.len() as u64)
                    .filter(|&n| f.eval(n) > out.dominator[n as usize])
                    .collect();
                let rep = out.reports.iter().find(|r| r.member == j);
                if rep.map(|r| &r.report.violations) != Some(&naive) {
                    failures.push(format!("member {j}: report disagrees with a rescan"));
                }
                if naive.iter().any(|&n| n >= j as u64) {
                    failures.push(format!("member {j}: violation at or beyond its index"));
                }
            }
            let reports = match failures.first() {
                None => Check::new("member-reports", true, "every violation lies below the member's index"),
                Some(f) => Check::new("member-reports", false, f.clone()),
            };
            Ok(vec![verify_dominator(&fs, &out.dominator), reports])
        }
        "envelope" => {
            let out: ValuesOut = typed("report", "outputs", outputs)?;
            let f: OmegaFunction = typed(source, "function", field_or_self(input, "function"))?;
            Ok(vec![verify_envelope(&f, &out.values)])
        }
        "theorem2" => {
            let a: HorizonArgs = typed("args", "theorem2", args)?;
            let out: BlockOut = typed("report", "outputs", outputs)?;
            let g: OmegaFunction = typed(source, "g", field_or_self(input, "g"))?;
            let complete = out.terms.len() as u64 == a.horizon;
            let starts_ok = out
                .block_starts
                .iter()
                .enumerate()
                .all(|(m, &st)| (st as usize) < out.terms.len() && out.terms[st as usize] == Rational::from_integer((m as u64).into()));
            Ok(vec![
                verify_block_terms(&g, &out.terms),
                Check::new("term-count", complete, format!("{} terms", out.terms.len())),
                Check::new("block-starts", starts_ok, "each block starts at its integer"),
            ])
        }
        "coverage" => {
            let a: PrecisionArgs = typed("args", "coverage", args)?;
            let out: CoverageOut = typed("report", "outputs", outputs)?;
            let s = sequence(source, field_or_self(input, "sequence"), a.precision_bits)?;
            let mut failures = Vec::new();
            for (i, &v) in out.values.iter().enumerate() {
                let brute = brute_coverage(&s, i as u64, v + 2, 64)?;
                if brute != v {
                    failures.push(format!("i = {i}: reported {v}, sweep gives {brute}"));
                }
            }
            let check = match failures.first() {
                None => Check::new(
                    "coverage-sweep",
                    true,
                    format!("{} values match the uncovered-point sweep", out.values.len()),
                ),
                Some(f) => Check::new("coverage-sweep", false, f.clone()),
            };
            Ok(vec![check])
        }
        "probe-c" => {
            let a: ProbeArgs = typed("args", "probe-c", args)?;
            let out: ProbeOutcome = typed("report", "outputs", outputs)?;
            let fam = family(source, field(source, input, "family")?, a.precision_bits)?;
            let set: OpenSet = typed(source, "set", field(source, input, "set")?)?;
            Ok(vec![verify_probe(&fam, &set, &out)?])
        }
        "adversary" => {
            let a: AdversaryArgs = typed("args", "adversary", args)?;
            let out: AdversaryOut = typed("report", "outputs", outputs)?;
            let fam = family(source, input, a.precision_bits)?;
            let set = AdversarialSet {
                open_set: out.open_set.clone(),
                certificates: out.certificates.clone(),
            };
            let rebuilt = OpenSet::from_intervals(out.profile.intervals());
            let mut checks = verify_profile(&fam, &out.profile)?;
            checks.push(Check::new(
                "set-matches-profile",
                rebuilt == out.open_set,
                "the set is the union of the profile's intervals",
            ));
            checks.extend(verify_certificates(&fam, &out.profile, &set, 10)?);
            Ok(checks)
        }
        "theorem3" => {
            let out: Theorem3Out = typed("report", "outputs", outputs)?;
            let set: PatternSet = typed(source, "set", field_or_self(input, "set"))?;
            Ok(verify_theorem3(&set, &out.witness))
        }
        "remark" => {
            let a: RemarkArgs = typed("args", "remark", args)?;
            let out: RemarkWitness = typed("report", "outputs", outputs)?;
            let set: PatternSet = typed(source, "set", field(source, input, "set")?)?;
            let s = sequence(source, field(source, input, "sequence")?, a.precision_bits)?;
            let mut checks = verify_remark(&set, &s, &out)?;
            checks.push(Check::new(
                "hit-count",
                out.hits.len() == a.hits,
                format!("{} of {} hits", out.hits.len(), a.hits),
            ));
            Ok(checks)
        }
        "wave" => {
            let out: WaveProbeOutcome = typed("report", "outputs", outputs)?;
            let (set, variant) = wave_inputs(source, input)?;
            Ok(vec![verify_wave(&set, &variant, &out)])
        }
        "demo-bump" => {
            let a: PrecisionArgs = typed("args", "demo-bump", args)?;
            let out: BumpDemo = typed("report", "outputs", outputs)?;
            let fam = family(source, input, a.precision_bits)?;
            let mut checks = verify_bump(&fam, &out)?;
            checks.push(Check::new("demo-flags", out.passed(), "the demo's own flags all hold"));
            Ok(checks)
        }
        other => Err(CliError::Input(format!("unknown command `{other}`"))),
    }
}
