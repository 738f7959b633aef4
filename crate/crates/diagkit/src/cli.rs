//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use diagkit_core::classify::{
    canonical_decomposition, kadison_feasibility, trace_shape, zero_diagonalizable,
    IdempotentModel, SequenceSpec, TraceShape,
};
use diagkit_core::frames::{cross_gramian, extract_frames, FramePair};
use diagkit_core::linalg::{diagonal_of, idempotency_residual, numerical_rank, operator_norm};
use diagkit_core::numrange::zero_diagonal_basis;
use diagkit_core::rebase::{
    absolutely_summable_rebasis, bootstrap_fan, zero_diagonalize_idempotent, BootstrapPlan,
    PartialSumTrace,
};
use diagkit_core::synth::{
    idem_2x2_diag, idem_bounded_diag, idem_constant_diag, idem_finite_rank,
    idem_infinite_multiplicity, idem_matrix_exact, idem_rank_one, DiagonalRequest, RequestKind,
    Route, SynthesisResult, Truncation, DEFAULT_DEPTH, DEFAULT_PARTITION,
};
use diagkit_core::{Certificate, ComplexMatrix, Error, OrthonormalBasis, Tolerances, C64};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::json::{
    basis_from, from_cx, role_name, to_cx, CertificateJson, Cx, FramesJson, MatrixFile,
    MatrixInput, MatrixJson, RequestJson, SequenceJson, SCHEMA,
};
use crate::report::{InputDigest, RunReport};
use crate::{CliError, EXIT_CERTIFICATE, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "diagkit", version, about = "Idempotent matrices with prescribed diagonals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

/// Inputs (`--diag`, `--seq`, `--matrix`, ...) take inline JSON or `@file`.
#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// Diagonal values: a JSON list (numbers or [re, im]) or a request object.
    #[arg(long, global = true)]
    pub diag: Option<String>,
    /// Sequence: a JSON object, or `head=[...] tail=<kind> [in_l1=..] [in_l2=..] [sup=..]`.
    #[arg(long, global = true, num_args = 1..)]
    pub seq: Vec<String>,
    /// Matrix JSON.
    #[arg(long, global = true)]
    pub matrix: Option<String>,
    /// Basis JSON (columns are the vectors); defaults to the standard basis.
    #[arg(long, global = true)]
    pub basis: Option<String>,
    /// Frame pair JSON.
    #[arg(long, global = true)]
    pub frames: Option<String>,
    /// Bootstrap plan JSON: `{"lambda": [...]}` or `{"r", "d", "lambda"}`.
    #[arg(long, global = true)]
    pub plan: Option<String>,
    /// Index pairs `[[e, e'], ...]` for zero-diagonalizing an idempotent.
    #[arg(long, global = true)]
    pub pairs: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "basis-out", global = true)]
    pub basis_out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub blocks: Option<usize>,
    #[arg(long, global = true)]
    pub partition: Option<usize>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Index of the infinitely repeated value (infinite-mult); defaults to the last.
    #[arg(long, global = true)]
    pub repeat: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub route: Option<RouteArg>,
    /// Overrides every certificate tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Recorded in the report; no default command draws random numbers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Allow overwriting output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteArg {
    Fan,
    Gkl,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    #[command(subcommand)]
    Synth(SynthOp),
    #[command(subcommand)]
    Rebase(RebaseOp),
    #[command(subcommand)]
    Classify(ClassifyOp),
    #[command(subcommand)]
    Frames(FramesOp),
    /// Certify an idempotent and, optionally, its diagonal in a basis.
    Verify,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum SynthOp {
    TwoByTwo,
    Constant,
    InfiniteMult,
    Bounded,
    RankOne,
    FiniteRank,
    Matrix,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum RebaseOp {
    ZeroDiag,
    BootstrapFan,
    AbsSum,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum ClassifyOp {
    Kadison,
    Shape,
    ZeroDiag,
    Decompose,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum FramesOp {
    ToIdem,
    FromIdem,
}

impl Command {
    fn name(&self) -> String {
        fn kebab(s: String) -> String {
            let mut out = String::new();
            for (i, ch) in s.chars().enumerate() {
                if ch.is_uppercase() {
                    if i > 0 {
                        out.push('-');
                    }
                    out.extend(ch.to_lowercase());
                } else {
                    out.push(ch);
                }
            }
            out
        }
        match self {
            Command::Synth(op) => format!("synth {}", kebab(format!("{op:?}"))),
            Command::Rebase(op) => format!("rebase {}", kebab(format!("{op:?}"))),
            Command::Classify(op) => format!("classify {}", kebab(format!("{op:?}"))),
            Command::Frames(op) => format!("frames {}", kebab(format!("{op:?}"))),
            Command::Verify => "verify".into(),
        }
    }
}

/// What a finished run prints and returns.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
    pub report: Option<RunReport>,
}

/// Parses `argv` (including the program name), runs the command, writes the
/// requested files and renders the report.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return Outcome {
                stdout: if code == EXIT_OK { text.clone() } else { String::new() },
                stderr: if code == EXIT_OK { String::new() } else { text },
                exit_code: code,
                report: None,
            };
        }
    };
    let mut digest = InputDigest::default();
    for a in argv.iter().skip(1) {
        digest.feed(a.to_string_lossy().as_bytes());
    }
    let mut ctx = Ctx {
        tol: tolerances(cli.opts.tol),
        opts: cli.opts,
        digest,
        warnings: Vec::new(),
    };
    let name = cli.command.name();
    let result = ctx.dispatch(&cli.command);
    let digest = std::mem::take(&mut ctx.digest).finish();
    let mut report = RunReport::new(name, digest);
    report.warnings = std::mem::take(&mut ctx.warnings);
    if let Some(seed) = ctx.opts.seed {
        report.warnings.push(format!("seed {seed} recorded; this command is deterministic"));
    }
    match result {
        Ok(done) => {
            report.certificate = done.certificate.as_ref().map(CertificateJson::from);
            report.processed_prefix = done.processed;
            report.details = done.details;
            report.exit_code = done.exit_code;
        }
        Err(e) => {
            report.exit_code = e.exit_code();
            report.error = Some(e.to_string());
        }
    }
    let stdout = if ctx.opts.json { report.to_json() + "\n" } else { report.to_text() };
    let stderr = report.error.clone().map(|e| format!("diagkit: {e}\n")).unwrap_or_default();
    Outcome { stdout, stderr, exit_code: report.exit_code, report: Some(report) }
}

fn tolerances(tol: Option<f64>) -> Tolerances {
    match tol {
        Some(t) => Tolerances { unitary: t, idempotent: t, diagonal: t },
        None => Tolerances::default(),
    }
}

struct Done {
    certificate: Option<Certificate>,
    processed: Option<usize>,
    details: Value,
    exit_code: i32,
}

struct Ctx {
    opts: Opts,
    tol: Tolerances,
    digest: InputDigest,
    warnings: Vec<String>,
}

impl Ctx {
    fn dispatch(&mut self, cmd: &Command) -> Result<Done, CliError> {
        for p in [&self.opts.out, &self.opts.basis_out].into_iter().flatten() {
            if p.exists() && !self.opts.force {
                return Err(CliError::Usage(format!("{} exists; pass --force to overwrite", p.display())));
            }
        }
        match cmd {
            Command::Synth(op) => self.synth(*op),
            Command::Rebase(op) => self.rebase(*op),
            Command::Classify(op) => self.classify(*op),
            Command::Frames(op) => self.frames(*op),
            Command::Verify => self.verify(),
        }
    }

    /// Inline text or the contents of `@path`.
    fn load(&mut self, raw: &str) -> Result<String, CliError> {
        match raw.strip_prefix('@') {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("{path}: {e}")))?;
                self.digest.feed(text.as_bytes());
                Ok(text)
            }
            None => Ok(raw.to_string()),
        }
    }

    fn require(&mut self, v: &Option<String>, flag: &str) -> Result<String, CliError> {
        match v {
            Some(raw) => self.load(&raw.clone()),
            None => Err(CliError::Usage(format!("this command needs --{flag}"))),
        }
    }

    fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
    }

    fn diag(&mut self) -> Result<(Vec<C64>, Truncation), CliError> {
        let text = self.require(&self.opts.diag.clone(), "diag")?;
        let value: Value = Self::parse(&text, "--diag")?;
        let (values, mut trunc) = match value {
            Value::Object(_) => {
                let req: RequestJson = serde_json::from_value(value)
                    .map_err(|e| CliError::Input(format!("--diag request: {e}")))?;
                let r = DiagonalRequest::from(&req);
                (r.values, r.truncation)
            }
            Value::Array(_) => {
                let v: Vec<Cx> = serde_json::from_value(value)
                    .map_err(|e| CliError::Input(format!("--diag: {e}")))?;
                (from_cx(&v), Truncation::default())
            }
            other => {
                let z: Cx = serde_json::from_value(other)
                    .map_err(|e| CliError::Input(format!("--diag: {e}")))?;
                (vec![z.0], Truncation::default())
            }
        };
        trunc.blocks = self.opts.blocks.or(trunc.blocks);
        trunc.partition = self.opts.partition.or(trunc.partition);
        trunc.depth = self.opts.depth.or(trunc.depth);
        Ok((values, trunc))
    }

    fn single(&mut self) -> Result<(C64, Truncation), CliError> {
        let (v, t) = self.diag()?;
        match v.as_slice() {
            [d] => Ok((*d, t)),
            _ => Err(CliError::Usage(format!("expected one diagonal value, got {}", v.len()))),
        }
    }

    fn matrix(&mut self) -> Result<ComplexMatrix, CliError> {
        let text = self.require(&self.opts.matrix.clone(), "matrix")?;
        Self::parse::<MatrixInput>(&text, "--matrix")?.into_matrix()
    }

    fn basis_or_standard(&mut self, dim: usize) -> Result<OrthonormalBasis, CliError> {
        match self.opts.basis.clone() {
            Some(raw) => {
                let text = self.load(&raw)?;
                let m = Self::parse::<MatrixInput>(&text, "--basis")?.into_matrix()?;
                if m.rows() != dim {
                    return Err(CliError::Input(format!("basis lives in dimension {}, matrix in {dim}", m.rows())));
                }
                basis_from(m)
            }
            None => Ok(OrthonormalBasis::standard(dim)),
        }
    }

    fn sequence(&mut self) -> Result<SequenceSpec, CliError> {
        let parts = self.opts.seq.clone();
        if parts.is_empty() {
            return Err(CliError::Usage("this command needs --seq".into()));
        }
        let json = if parts.len() == 1 && (parts[0].starts_with('{') || parts[0].starts_with('@')) {
            let text = self.load(&parts[0])?;
            Self::parse::<SequenceJson>(&text, "--seq")?
        } else {
            sequence_from_pairs(&parts)?
        };
        (&json).try_into()
    }

    fn write(&self, path: &Option<PathBuf>, value: &impl serde::Serialize) -> Result<(), CliError> {
        if let Some(p) = path {
            write_json(p, value, self.opts.force)?;
        }
        Ok(())
    }

    fn certify(&self, cert: &Certificate) -> i32 {
        if cert.passes(&self.tol) {
            EXIT_OK
        } else {
            EXIT_CERTIFICATE
        }
    }

    // ---- synth ----

    fn synth(&mut self, op: SynthOp) -> Result<Done, CliError> {
        if let (SynthOp::FiniteRank, Some(RouteArg::Both)) = (op, self.opts.route) {
            return self.finite_rank_both();
        }
        let (targets, res) = match op {
            SynthOp::TwoByTwo => {
                let (d, _) = self.single()?;
                let res = idem_2x2_diag(d)?;
                (res.realized.clone(), res)
            }
            SynthOp::Constant => {
                let (d, t) = self.single()?;
                let res = idem_constant_diag(d, t.blocks.unwrap_or(3))?;
                (vec![d; res.processed], res)
            }
            SynthOp::InfiniteMult => {
                let (d, t) = self.diag()?;
                let m = self.opts.repeat.unwrap_or(d.len().saturating_sub(1));
                let res = idem_infinite_multiplicity(&d, m, t.depth.unwrap_or(DEFAULT_DEPTH))?;
                (d, res)
            }
            SynthOp::Bounded => {
                let (d, t) = self.diag()?;
                let res = idem_bounded_diag(
                    &d,
                    t.partition.unwrap_or(DEFAULT_PARTITION),
                    t.depth.unwrap_or(DEFAULT_DEPTH),
                )?;
                (d, res)
            }
            SynthOp::RankOne => {
                let (d, t) = self.diag()?;
                DiagonalRequest { values: d.clone(), kind: RequestKind::AbsSummableSumOne, truncation: t }.validate()?;
                (d.clone(), idem_rank_one(&d)?)
            }
            SynthOp::FiniteRank => {
                let (d, t) = self.diag()?;
                DiagonalRequest { values: d.clone(), kind: RequestKind::AbsSummableIntegerSum, truncation: t }.validate()?;
                let route = match self.opts.route {
                    Some(RouteArg::Gkl) => Route::Gkl,
                    _ => Route::Fan,
                };
                (d.clone(), idem_finite_rank(&d, route)?)
            }
            SynthOp::Matrix => {
                let (d, _) = self.diag()?;
                (d.clone(), idem_matrix_exact(&d)?)
            }
        };
        let cert = recertify(&res, &targets[..res.processed.min(targets.len())])?;
        self.write(&self.opts.out, &idempotent_file(&res))?;
        self.write(&self.opts.basis_out, &MatrixFile::plain("basis", res.basis.matrix()))?;
        Ok(Done {
            exit_code: self.certify(&cert),
            certificate: Some(cert),
            processed: Some(res.processed),
            details: synth_details(&res),
        })
    }

    fn finite_rank_both(&mut self) -> Result<Done, CliError> {
        let (d, t) = self.diag()?;
        DiagonalRequest { values: d.clone(), kind: RequestKind::AbsSummableIntegerSum, truncation: t }.validate()?;
        let fan = idem_finite_rank(&d, Route::Fan)?;
        let gkl = idem_finite_rank(&d, Route::Gkl)?;
        let cf = recertify(&fan, &d)?;
        let cg = recertify(&gkl, &d)?;
        let n = d.len();
        let gap = fan.realized[..n]
            .iter()
            .zip(&gkl.realized[..n])
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let (rf, rg) = (fan.rank(), gkl.rank());
        let agree = rf == rg && gap <= self.tol.diagonal * (2.0 + cf.norm_observed + cg.norm_observed);
        if !agree {
            self.warnings.push(format!("routes disagree: ranks {rf}/{rg}, diagonal gap {gap:.3e}"));
        }
        self.write(
            &self.opts.out,
            &json!({"schema": SCHEMA, "kind": "idempotent_pair", "fan": idempotent_file(&fan), "gkl": idempotent_file(&gkl)}),
        )?;
        self.write(
            &self.opts.basis_out,
            &json!({"schema": SCHEMA, "kind": "basis_pair",
                    "fan": MatrixFile::plain("basis", fan.basis.matrix()),
                    "gkl": MatrixFile::plain("basis", gkl.basis.matrix())}),
        )?;
        let ok = cf.passes(&self.tol) && cg.passes(&self.tol) && agree;
        Ok(Done {
            certificate: Some(worst(&cf, &cg)),
            processed: Some(n),
            details: json!({
                "routes_agree": agree,
                "diagonal_gap": gap,
                "fan": {"dimension": fan.matrix.rows(), "rank": rf, "certificate": CertificateJson::from(&cf)},
                "gkl": {"dimension": gkl.matrix.rows(), "rank": rg, "certificate": CertificateJson::from(&cg)},
            }),
            exit_code: if ok { EXIT_OK } else { EXIT_CERTIFICATE },
        })
    }

    // ---- rebase ----

    fn rebase(&mut self, op: RebaseOp) -> Result<Done, CliError> {
        let t = self.matrix()?;
        let n = t.rows();
        match op {
            RebaseOp::ZeroDiag => {
                let (basis, processed, details) = match self.opts.pairs.clone() {
                    Some(raw) => {
                        let text = self.load(&raw)?;
                        let pairs: Vec<(usize, usize)> = Self::parse(&text, "--pairs")?;
                        let out = zero_diagonalize_idempotent(&t, &pairs)?;
                        let details = json!({
                            "group_boundaries": out.plan.m,
                            "groups": out.plan.groups.len(),
                            "unprocessed_pairs": out.unprocessed_pairs,
                        });
                        (out.basis, out.processed, details)
                    }
                    None => {
                        let tr = t.trace()?;
                        if tr.norm() > 1e-9 * (1.0 + operator_norm(&t)) * n as f64 {
                            return Err(Error::Infeasible(format!(
                                "trace {tr} is not zero, so no basis makes the diagonal vanish"
                            ))
                            .into());
                        }
                        self.warnings.push("operator is not required to be idempotent here".into());
                        (zero_diagonal_basis(&t)?, n, json!({}))
                    }
                };
                let cert = measure_family(&t, &basis, &vec![C64::new(0.0, 0.0); processed], self.opts.pairs.is_some())?;
                self.write(&self.opts.out, &MatrixFile::plain("basis", basis.matrix()))?;
                Ok(Done { exit_code: self.certify(&cert), certificate: Some(cert), processed: Some(processed), details })
            }
            RebaseOp::BootstrapFan => {
                let e = self.basis_or_standard(n)?;
                let text = self.require(&self.opts.plan.clone(), "plan")?;
                let plan = plan_from_json(&Self::parse(&text, "--plan")?, &diagonal_of(&t, &e)?)?;
                let out = bootstrap_fan(&t, &e, &plan)?;
                let mut cols = out.b.vectors();
                cols.push(out.f_last.clone());
                let fam = basis_from(ComplexMatrix::from_columns(n, &cols).map_err(CliError::from)?)?;
                let promised: Vec<C64> = (1..=plan.steps()).map(|k| plan.promised(k)).collect();
                let mut cert = measure_family(&t, &fam, &promised, false)?;
                cert.diagonal_residual = cert.diagonal_residual.max(out.diagonal_residual);
                self.write(&self.opts.out, &MatrixFile::plain("basis", fam.matrix()))?;
                let ok = out.span_residual <= 1e-9;
                if !ok {
                    self.warnings.push(format!("span residual {:.3e}", out.span_residual));
                }
                Ok(Done {
                    exit_code: if ok { self.certify(&cert) } else { EXIT_CERTIFICATE },
                    certificate: Some(cert),
                    processed: Some(plan.steps()),
                    details: json!({"span_residual": out.span_residual, "overlaps": out.overlaps}),
                })
            }
            RebaseOp::AbsSum => {
                let e = self.basis_or_standard(n)?;
                let diag = diagonal_of(&t, &e)?;
                let limit: C64 = diag.iter().sum();
                let info = PartialSumTrace::derive(&diag, limit);
                let out = absolutely_summable_rebasis(&t, &e, &info)?;
                let cert = Certificate {
                    unitarity_residual: out.basis.unitarity_residual(),
                    norm_observed: operator_norm(&t),
                    ..Certificate::default()
                };
                let within = out.absolute_sum <= out.bound + 1e-8;
                if !within {
                    self.warnings.push(format!("absolute sum {} exceeds {}", out.absolute_sum, out.bound));
                }
                self.write(&self.opts.out, &MatrixFile::plain("basis", out.basis.matrix()))?;
                Ok(Done {
                    exit_code: if within { self.certify(&cert) } else { EXIT_CERTIFICATE },
                    certificate: Some(cert),
                    processed: Some(out.processed),
                    details: json!({
                        "absolute_sum": out.absolute_sum,
                        "bound": out.bound,
                        "n_k": info.n_k,
                        "segments": out.segments,
                        "truncated": out.truncated,
                    }),
                })
            }
        }
    }

    // ---- classify ----

    fn model(&mut self) -> Result<IdempotentModel, CliError> {
        if self.opts.matrix.is_some() {
            Ok(IdempotentModel::Finite(self.matrix()?))
        } else if !self.opts.seq.is_empty() {
            Ok(IdempotentModel::Infinite { nilpotent: self.sequence()? })
        } else {
            Err(CliError::Usage("this command needs --matrix or --seq".into()))
        }
    }

    fn classify(&mut self, op: ClassifyOp) -> Result<Done, CliError> {
        let plain = |details: Value, exit_code| Done { certificate: None, processed: None, details, exit_code };
        match op {
            ClassifyOp::Kadison => {
                let v = kadison_feasibility(&self.sequence()?)?;
                if v.ambiguous {
                    self.warnings.push("index within 1e-6 of an integer: numerically ambiguous".into());
                }
                let details = json!({
                    "feasible": v.feasible,
                    "a": extended(v.a),
                    "b": extended(v.b),
                    "index": v.index,
                    "ambiguous": v.ambiguous,
                });
                Ok(plain(details, if v.feasible { EXIT_OK } else { EXIT_INFEASIBLE }))
            }
            ClassifyOp::Shape => {
                let details = match trace_shape(&self.model()?)? {
                    TraceShape::Plane => json!({"shape": "plane"}),
                    TraceShape::Empty => json!({"shape": "empty"}),
                    TraceShape::Point(z) => json!({"shape": "point", "value": Cx(z)}),
                };
                Ok(plain(details, EXIT_OK))
            }
            ClassifyOp::ZeroDiag => {
                let z = zero_diagonalizable(&self.model()?)?;
                Ok(plain(json!({"zero_diagonalizable": z}), EXIT_OK))
            }
            ClassifyOp::Decompose => {
                let d = self.matrix()?;
                let dec = canonical_decomposition(&d)?;
                let norm = operator_norm(&d);
                let reassembly = dec.reassembly_residual(&d);
                let cert = Certificate {
                    idempotency_residual: idempotency_residual(&d)?,
                    unitarity_residual: dec.split.unitarity_residual().max(dec.fine.unitarity_residual()),
                    norm_observed: norm,
                    ..Certificate::default()
                };
                self.write(
                    &self.opts.out,
                    &json!({
                        "schema": SCHEMA,
                        "kind": "decomposition",
                        "ker_dim": dec.ker_dim,
                        "coker_dim": dec.coker_dim,
                        "blocks": dec.blocks,
                        "t": MatrixJson::from(&dec.t),
                        "four_block": MatrixJson::from(&dec.four_block),
                        "t_polar": MatrixJson::from(&dec.t_polar),
                        "split": MatrixJson::from(dec.split.matrix()),
                        "fine": MatrixJson::from(dec.fine.matrix()),
                    }),
                )?;
                let ok = reassembly <= 1e-9 * (1.0 + norm);
                if !ok {
                    self.warnings.push(format!("reassembly residual {reassembly:.3e}"));
                }
                Ok(Done {
                    exit_code: if ok { self.certify(&cert) } else { EXIT_CERTIFICATE },
                    certificate: Some(cert),
                    processed: None,
                    details: json!({
                        "ker_dim": dec.ker_dim,
                        "coker_dim": dec.coker_dim,
                        "reassembly_residual": reassembly,
                    }),
                })
            }
        }
    }

    // ---- frames ----

    fn frames(&mut self, op: FramesOp) -> Result<Done, CliError> {
        match op {
            FramesOp::ToIdem => {
                let text = self.require(&self.opts.frames.clone(), "frames")?;
                let pair: FramePair = (&Self::parse::<FramesJson>(&text, "--frames")?).try_into()?;
                let g = cross_gramian(&pair)?;
                let ip = pair.inner_products();
                let (realized, cert) =
                    Certificate::measure(&g, &OrthonormalBasis::standard(g.rows()), &ip, None)?;
                let file = MatrixFile {
                    realized: Some(to_cx(&realized)),
                    processed: Some(ip.len()),
                    ..MatrixFile::plain("idempotent", &g)
                };
                self.write(&self.opts.out, &file)?;
                Ok(Done {
                    exit_code: self.certify(&cert),
                    certificate: Some(cert),
                    processed: Some(ip.len()),
                    details: json!({"duality_residual": pair.duality_residual()?, "rank": pair.dim}),
                })
            }
            FramesOp::FromIdem => {
                let d = self.matrix()?;
                let pair = extract_frames(&d)?;
                let back = cross_gramian(&pair)?;
                let norm = operator_norm(&d);
                let round_trip = back.sub(&d)?.max_abs();
                let cert = Certificate {
                    idempotency_residual: idempotency_residual(&d)?,
                    diagonal_residual: round_trip,
                    norm_observed: norm,
                    ..Certificate::default()
                };
                let mut file = serde_json::to_value(FramesJson::from(&pair))?;
                file["schema"] = json!(SCHEMA);
                file["kind"] = json!("frames");
                self.write(&self.opts.out, &file)?;
                Ok(Done {
                    exit_code: self.certify(&cert),
                    certificate: Some(cert),
                    processed: Some(pair.len()),
                    details: json!({"dim": pair.dim, "duality_residual": pair.duality_residual()?, "round_trip_residual": round_trip}),
                })
            }
        }
    }

    // ---- verify ----

    fn verify(&mut self) -> Result<Done, CliError> {
        let d = self.matrix()?;
        let basis = self.basis_or_standard(d.rows())?;
        let targets = if self.opts.diag.is_some() { self.diag()?.0 } else { Vec::new() };
        if targets.len() > basis.len() {
            return Err(CliError::Input(format!("{} targets for {} basis vectors", targets.len(), basis.len())));
        }
        let (_, cert) = Certificate::measure(&d, &basis, &targets, None)?;
        let rank = if d.rows() <= 300 { Some(numerical_rank(&d, 1e-9)) } else { None };
        Ok(Done {
            exit_code: self.certify(&cert),
            certificate: Some(cert),
            processed: Some(targets.len()),
            details: json!({"dimension": d.rows(), "rank": rank, "trace": Cx(d.trace()?)}),
        })
    }
}

fn extended(x: f64) -> Value {
    if x.is_infinite() {
        json!("inf")
    } else {
        // Drop the sign of a negative zero.
        json!(x + 0.0)
    }
}

/// Recomputes the certificate of a synthesis result from scratch.
fn recertify(res: &SynthesisResult, targets: &[C64]) -> Result<Certificate, CliError> {
    let (_, mut cert) =
        Certificate::measure(&res.matrix, &res.basis, targets, res.certificate.norm_bound_claimed)?;
    cert.similarity_condition = res.certificate.similarity_condition;
    Ok(cert)
}

/// Certificate of a basis family; idempotency only when it was required.
fn measure_family(
    t: &ComplexMatrix,
    basis: &OrthonormalBasis,
    targets: &[C64],
    idempotent: bool,
) -> Result<Certificate, CliError> {
    let (_, mut cert) = Certificate::measure(t, basis, targets, None)?;
    if !idempotent {
        cert.idempotency_residual = 0.0;
    }
    Ok(cert)
}

fn worst(a: &Certificate, b: &Certificate) -> Certificate {
    Certificate {
        idempotency_residual: a.idempotency_residual.max(b.idempotency_residual),
        unitarity_residual: a.unitarity_residual.max(b.unitarity_residual),
        diagonal_residual: a.diagonal_residual.max(b.diagonal_residual),
        norm_bound_claimed: None,
        norm_observed: a.norm_observed.max(b.norm_observed),
        similarity_condition: match (a.similarity_condition, b.similarity_condition) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        },
    }
}

fn idempotent_file(res: &SynthesisResult) -> MatrixFile<'static> {
    MatrixFile {
        processed: Some(res.processed),
        realized: Some(to_cx(&res.realized)),
        roles: Some(res.roles.iter().map(|r| role_name(*r)).collect()),
        ..MatrixFile::plain("idempotent", &res.matrix)
    }
}

fn synth_details(res: &SynthesisResult) -> Value {
    let n = res.matrix.rows();
    let rank = if n <= 300 { Some(res.rank()) } else { None };
    json!({
        "dimension": n,
        "rank": rank,
        "trace": Cx(res.matrix.trace().unwrap_or_default()),
    })
}

#[derive(Deserialize)]
struct PlanJson {
    #[serde(default)]
    r: Option<Vec<Cx>>,
    #[serde(default)]
    d: Option<Vec<Cx>>,
    lambda: Vec<f64>,
}

/// Completes a plan from the current diagonal: `r` defaults to it and `d`
/// follows from `d_n = λ_n d_{n−1} + (1 − λ_n) r_n`.
fn plan_from_json(p: &PlanJson, diag: &[C64]) -> Result<BootstrapPlan, CliError> {
    let r = p.r.as_ref().map(|v| from_cx(v)).unwrap_or_else(|| diag.to_vec());
    let d = match &p.d {
        Some(d) => from_cx(d),
        None => {
            if r.len() != p.lambda.len() + 1 {
                return Err(CliError::Input(format!(
                    "{} coefficients for {} diagonal entries",
                    p.lambda.len(),
                    r.len()
                )));
            }
            let mut prev = r[0];
            p.lambda
                .iter()
                .zip(&r[1..])
                .map(|(l, rn)| {
                    prev = prev * *l + rn * (1.0 - l);
                    prev
                })
                .collect()
        }
    };
    Ok(BootstrapPlan::new(r, d, p.lambda.clone())?)
}

/// `head=[...] tail=zeros in_l2=true ...`.
fn sequence_from_pairs(parts: &[String]) -> Result<SequenceJson, CliError> {
    let mut head = Vec::new();
    let mut tail = None;
    let mut flags = serde_json::Map::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--seq expects key=value, got {p:?}")))?;
        match k {
            "head" => {
                head = serde_json::from_str(v).map_err(|e| CliError::Input(format!("head: {e}")))?;
            }
            "tail" => tail = Some(v.to_string()),
            "in_l1" | "in_l2" | "sup" => {
                let parsed: Value = serde_json::from_str(v).map_err(|e| CliError::Input(format!("{k}: {e}")))?;
                flags.insert(k.to_string(), parsed);
            }
            other => return Err(CliError::Usage(format!("unknown --seq key {other:?}"))),
        }
    }
    let mut t = flags;
    t.insert("kind".into(), json!(tail.ok_or_else(|| CliError::Usage("--seq needs tail=<kind>".into()))?));
    if t["kind"] == "class_flags" {
        t.entry("in_l1").or_insert(json!(false));
        t.entry("sup").or_insert(json!(f64::MAX));
    }
    let tail = serde_json::from_value(Value::Object(t)).map_err(|e| CliError::Input(format!("tail: {e}")))?;
    Ok(SequenceJson { head, tail })
}

fn write_json(path: &Path, value: &impl serde::Serialize, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Usage(format!("{} exists; pass --force to overwrite", path.display())));
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
