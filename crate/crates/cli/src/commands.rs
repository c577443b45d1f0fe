//! Command dispatch and machine-readable reports.

use std::fmt;
use std::time::Instant;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use novikov_k1::decompose::{
    decompose_laurent, decompose_novikov, decompose_poly, decompose_series, oracle_field, verify_roundtrip, Report, Status,
    VerifyOptions,
};
use novikov_k1::matrix::{cofactor_det, invert_series_matrix, theta_shift, InvertiblePair, TriangularizationCert, TwistedMatrix};
use novikov_k1::nil::{lower_bound, rank_check, window_stable, AutomorphismPair, ConeSplit, NilpotentPair};
use novikov_k1::random::Sampler;
use novikov_k1::ring::{AMat, Ring};
use novikov_k1::series::{Ctx, Flavor, Prec, Series, WittVector};
use novikov_k1::witt::{noninjectivity_witness, NoninjectivityWitness};

use crate::problem::{elem_to_json, matrix_to_json, series_to_json, ProblemError, ProblemFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Invert,
    Triangularize,
    DecomposePoly,
    DecomposeSeries,
    DecomposeLaurent,
    DecomposeNovikov,
    VerifyRoundtrip,
    WittWitness,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Validate,
        Command::Invert,
        Command::Triangularize,
        Command::DecomposePoly,
        Command::DecomposeSeries,
        Command::DecomposeLaurent,
        Command::DecomposeNovikov,
        Command::VerifyRoundtrip,
        Command::WittWitness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Invert => "invert",
            Command::Triangularize => "triangularize",
            Command::DecomposePoly => "decompose-poly",
            Command::DecomposeSeries => "decompose-series",
            Command::DecomposeLaurent => "decompose-laurent",
            Command::DecomposeNovikov => "decompose-novikov",
            Command::VerifyRoundtrip => "verify-roundtrip",
            Command::WittWitness => "witt-witness",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Library(#[from] novikov_k1::Error),
    #[error("{0}")]
    Usage(String),
}

impl From<novikov_k1::matrix::MatrixError> for CommandError {
    fn from(e: novikov_k1::matrix::MatrixError) -> Self {
        CommandError::Library(e.into())
    }
}

impl CommandError {
    pub fn kind(&self) -> &'static str {
        match self {
            CommandError::Problem(ProblemError::Precision { .. }) => "precision",
            CommandError::Problem(_) => "schema",
            CommandError::Library(e) if e.is_capability() => "capability",
            CommandError::Library(novikov_k1::Error::NoWitness(_)) => "no-witness",
            CommandError::Library(_) => "library",
            CommandError::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self, command: &str) -> Value {
        let mut err = Map::new();
        err.insert("kind".into(), json!(self.kind()));
        err.insert("message".into(), json!(self.to_string()));
        if let CommandError::Problem(p) = self {
            if let Some(ptr) = p.pointer() {
                err.insert("pointer".into(), json!(ptr));
            }
        }
        json!({"command": command, "error": Value::Object(err), "status": "error"})
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub precision: Option<i64>,
    pub seed: u64,
    pub verify: bool,
}

#[derive(Clone, Debug)]
pub struct CommandReport {
    pub command: Command,
    pub input_digest: String,
    pub precision: i64,
    pub seed: u64,
    pub results: Value,
    pub checks: Report,
    pub elapsed_ms: u128,
}

impl CommandReport {
    pub fn passed(&self) -> bool {
        self.checks.passed()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Deterministic document; wall-clock timing only when asked for.
    pub fn to_json(&self, with_timing: bool) -> Value {
        let checks: Vec<Value> = self
            .checks
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "status": c.status.name(), "witness": c.witness}))
            .collect();
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command.name()));
        m.insert("input_digest".into(), json!(self.input_digest));
        m.insert("precision".into(), json!(self.precision));
        m.insert("seed".into(), json!(self.seed));
        m.insert("results".into(), self.results.clone());
        m.insert("checks".into(), Value::Array(checks));
        m.insert("status".into(), json!(if self.passed() { "pass" } else { "fail" }));
        if with_timing {
            m.insert("timing".into(), json!({"elapsed_ms": self.elapsed_ms}));
        }
        Value::Object(m)
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{} ({})\n", self.command, &self.input_digest[..16]);
        for c in &self.checks.checks {
            out.push_str(&format!("  {:<10} {}  {}\n", c.status.name(), c.name, c.witness));
        }
        let pass = self.checks.checks.iter().filter(|c| c.status == Status::Pass).count();
        let fail = self.checks.failures().count();
        let cap = self.checks.checks.len() - pass - fail;
        out.push_str(&format!(
            "{}: {pass} passed, {fail} failed, {cap} not applicable in {} ms\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.elapsed_ms
        ));
        out
    }
}

pub fn digest(pf: &ProblemFile) -> String {
    let h = Sha256::digest(pf.to_canonical_string().as_bytes());
    h.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn amat_json(ring: &Ring, m: &AMat) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|i| Value::Array(m.row(i).iter().map(|x| elem_to_json(ring, x)).collect()))
            .collect(),
    )
}

fn twisted_json(m: &TwistedMatrix) -> Value {
    json!({"flavor": m.flavor().name(), "entries": matrix_to_json(m)})
}

fn witt_json(w: &WittVector) -> Value {
    series_to_json(w.series())
}

fn nil_json(ctx: &Ctx, p: &NilpotentPair) -> Value {
    let ring = &ctx.ring;
    let profile = p.rank_profile(ctx).ok();
    json!({
        "idempotent": amat_json(ring, &p.module.e),
        "twist": p.twist,
        "nu": amat_json(ring, &p.nu),
        "index": p.index,
        "rank_profile": profile,
    })
}

fn auto_pair_json(ctx: &Ctx, p: &AutomorphismPair) -> Value {
    let ring = &ctx.ring;
    json!({
        "idempotent": amat_json(ring, &p.module.e),
        "phi": amat_json(ring, &p.phi),
        "phi_inv": amat_json(ring, &p.phi_inv),
        "stab_rank": p.stab_rank,
        "theta_rank": p.theta_rank,
    })
}

fn cert_json(c: &TriangularizationCert) -> Value {
    let ops: Vec<Value> = c
        .ops
        .iter()
        .map(|op| json!({"target": op.target, "source": op.source, "factor": series_to_json(&op.factor)}))
        .collect();
    json!({
        "precision": c.prec,
        "ops": ops,
        "diag": c.diag.iter().map(witt_json).collect::<Vec<_>>(),
        "gamma": matrix_to_json(&c.gamma),
    })
}

fn split_json(ring: &Ring, s: &ConeSplit) -> Value {
    json!({
        "h0": amat_json(ring, &s.h0),
        "h0_inverse": amat_json(ring, &s.g),
        "idempotent_domain": amat_json(ring, &s.e_dom),
        "idempotent_codomain": amat_json(ring, &s.e_cod),
    })
}

fn witness_json(ring: &Ring, w: &NoninjectivityWitness) -> Value {
    let factors: Vec<Value> = w
        .cert
        .factors
        .iter()
        .map(|f| json!({"row": f.row, "col": f.col, "x": series_to_json(&f.x)}))
        .collect();
    json!({
        "alpha": elem_to_json(ring, &w.alpha),
        "beta": elem_to_json(ring, &w.beta),
        "obstruction": elem_to_json(ring, &w.obstruction),
        "y": series_to_json(w.y.series()),
        "series_b2": witt_json(&w.series_b2),
        "factorization": factors,
    })
}

fn series_residual(a: &Series, b: &Series) -> String {
    if a.eq_at_common_prec(b) {
        a.display()
    } else {
        format!("residual {}", a.sub(b).display())
    }
}

fn matrix_residual(a: &TwistedMatrix, b: &TwistedMatrix) -> String {
    let d = a.sub(b);
    if d.is_zero() {
        "0".into()
    } else {
        format!("residual {}", d.display().replace('\n', "; "))
    }
}

/// Pair for the problem matrix: the inverse literal when present, otherwise
/// series inversion after clearing negative degrees. Exact flavors keep the
/// truncated inverse only if it is an exact two-sided inverse.
pub fn derive_pair(pf: &ProblemFile, n: i64) -> Result<InvertiblePair, CommandError> {
    let alpha = pf.matrix()?.clone();
    if !alpha.is_square() {
        return Err(CommandError::Usage("the matrix must be square".into()));
    }
    if let Some(beta) = &pf.inverse {
        return Ok(InvertiblePair::verified(alpha, beta.clone())?);
    }
    let ctx = alpha.ctx().clone();
    let size = alpha.rows();
    let k = lower_bound(&alpha);
    let shifted = alpha.shift(k)?.promote(if alpha.flavor().allows_negative() { Flavor::Novikov } else { Flavor::PowerSeries });
    let target = if pf.flavor.is_exact() {
        let span = alpha.upper().unwrap_or(0) - alpha.lower().unwrap_or(0) + 1;
        n.max(span * (size * ctx.ring.dim()) as i64 + k + 2)
    } else {
        n
    };
    let as_series = TwistedMatrix::from_coeffs(
        &ctx,
        Flavor::PowerSeries,
        size,
        size,
        shifted.prec(),
        shifted.terms().map(|(d, m)| (d, m.clone())),
    );
    let inv = invert_series_matrix(&as_series, target + k)?.beta;
    let beta = inv.promote(alpha.flavor().inexact()).mul(&theta_shift(&ctx, size, k));
    if pf.flavor.is_exact() {
        let exact = TwistedMatrix::from_coeffs(
            &ctx,
            pf.flavor,
            size,
            size,
            Prec::Infinite,
            beta.terms().map(|(d, m)| (d, m.clone())),
        );
        return InvertiblePair::verified(alpha, exact).map_err(|_| {
            CommandError::Usage(format!(
                "no {} inverse found below degree {target}; supply \"inverse\"",
                pf.flavor.name()
            ))
        });
    }
    Ok(InvertiblePair::verified(alpha, beta)?)
}

fn require_flavor(pf: &ProblemFile, allowed: &[Flavor], cmd: Command) -> Result<(), CommandError> {
    if allowed.contains(&pf.flavor) {
        Ok(())
    } else {
        Err(CommandError::Library(novikov_k1::Error::Capability(format!(
            "{cmd} does not apply to {} problems",
            pf.flavor.name()
        ))))
    }
}

fn identity_check(rep: &mut Report, name: &str, p: &TwistedMatrix, n: i64) {
    let id = TwistedMatrix::identity(p.ctx(), p.flavor(), p.rows(), Prec::Infinite);
    let ok = if p.prec() == Prec::Infinite { p.sub(&id).is_zero() } else { p.eq_below(&id, n) };
    let shown = if p.prec() == Prec::Infinite { p.clone() } else { p.truncate_to(n) };
    rep.check(name, ok, matrix_residual(&shown, &id));
}

pub fn run_command(cmd: Command, pf: &ProblemFile, opts: &RunOptions) -> Result<CommandReport, CommandError> {
    let start = Instant::now();
    let n = opts.precision.unwrap_or(pf.precision);
    if n < crate::problem::MIN_PRECISION {
        return Err(ProblemError::Precision {
            pointer: "/precision".into(),
            message: format!("precision {n} is below the minimum {}", crate::problem::MIN_PRECISION),
        }
        .into());
    }
    let mut pf_n = pf.clone();
    pf_n.precision = n;
    let pf = &pf_n;
    let ctx = pf.ctx.clone();
    let ring = ctx.ring.clone();
    let mut rep = Report::default();
    let mut res = Map::new();

    match cmd {
        Command::Validate => {
            res.insert("flavor".into(), json!(pf.flavor.name()));
            res.insert("ring".into(), json!(ring.to_string()));
            if let Some(a) = &pf.matrix {
                res.insert("rows".into(), json!(a.rows()));
                res.insert("cols".into(), json!(a.cols()));
                res.insert("lower".into(), json!(a.lower()));
                res.insert("upper".into(), json!(a.upper()));
                res.insert("k".into(), json!(lower_bound(a)));
            }
            if let (Some(a), Some(b)) = (&pf.matrix, &pf.inverse) {
                res.insert("l".into(), json!(lower_bound(b)));
                match InvertiblePair::verified(a.clone(), b.clone()) {
                    Ok(p) => {
                        rep.check("inverse.verified", true, format!("αβ = βα = 1 below {}", p.verified_to));
                        if pf.flavor == Flavor::Novikov {
                            let need = lower_bound(a) + lower_bound(b) + 2;
                            rep.check("precision.novikov_window", n >= need, format!("N = {n}, k+ℓ+2 = {need}"));
                        }
                    }
                    Err(e) => rep.check("inverse.verified", false, e.to_string()),
                }
            }
        }
        Command::Invert => {
            let pair = derive_pair(pf, n)?;
            res.insert("inverse".into(), twisted_json(&pair.beta));
            identity_check(&mut rep, "inverse.alpha_beta", &pair.alpha.mul(&pair.beta), n - lower_bound(&pair.beta).max(0));
            identity_check(&mut rep, "inverse.beta_alpha", &pair.beta.mul(&pair.alpha), n - lower_bound(&pair.beta).max(0));
        }
        Command::Triangularize | Command::DecomposeSeries => {
            require_flavor(pf, &[Flavor::Poly, Flavor::PowerSeries], cmd)?;
            let alpha = pf.matrix()?;
            let dec = decompose_series(alpha, n)?;
            let (_, rel) = novikov_k1::matrix::relative_f_torsion(alpha, n)?;
            let replay = dec.cert.replay(&rel);
            rep.check("certificate.replay", replay == dec.cert.gamma, matrix_residual(&replay, &dec.cert.gamma));
            rep.check("certificate.triangular", dec.cert.gamma_is_triangular(), "γ upper triangular with constant term 1");
            match cofactor_det(alpha) {
                Ok(det) => {
                    let d0 = cofactor_det(&TwistedMatrix::constant(&ctx, Flavor::Poly, &dec.b1, Prec::Infinite))?;
                    let rhs = d0.mul(dec.b2.series());
                    let lhs = det.truncate_to(dec.b2.prec());
                    rep.check("oracle.cofactor_det", lhs.eq_at_common_prec(&rhs), series_residual(&lhs, &rhs));
                }
                Err(e) => rep.capability("oracle.cofactor_det", e.to_string()),
            }
            res.insert("b1".into(), amat_json(&ring, &dec.b1));
            res.insert("b2".into(), witt_json(&dec.b2));
            res.insert("certificate".into(), cert_json(&dec.cert));
        }
        Command::DecomposePoly => {
            require_flavor(pf, &[Flavor::Poly], cmd)?;
            let pair = derive_pair(pf, n)?;
            let dec = decompose_poly(&pair)?;
            res.insert("b1".into(), amat_json(&ring, &dec.b1));
            res.insert("b2".into(), nil_json(&ctx, &dec.b2));
            let nu_pow = (0..dec.b2.index).fold(AMat::identity(&ring, dec.b2.nu.rows), |acc, i| {
                acc.mul(&ring, &dec.b2.nu.twist(&ctx.rho, dec.b2.twist * i as i64))
            });
            let killed = dec.b2.module.e.mul(&ring, &nu_pow);
            rep.check("b2.nilpotent", killed.is_zero(&ring), format!("index {}", dec.b2.index));
        }
        Command::DecomposeLaurent => {
            require_flavor(pf, &[Flavor::Poly, Flavor::LaurentPoly], cmd)?;
            let pair = derive_pair(pf, n)?;
            let dec = decompose_laurent(&pair)?;
            res.insert("b1".into(), auto_pair_json(&ctx, &dec.b1));
            res.insert("b2".into(), nil_json(&ctx, &dec.b2));
            res.insert("b3".into(), nil_json(&ctx, &dec.b3));
            res.insert("split".into(), split_json(&ring, &dec.split));
            rep.check("b1.invertible", dec.b1.is_invertible(&ctx), "φ restricted to P is invertible");
        }
        Command::DecomposeNovikov => {
            let pair = derive_pair(pf, n)?;
            pf.check_novikov_precision(&pair)?;
            let dec = decompose_novikov(&pair, n)?;
            res.insert("k".into(), json!(dec.k));
            res.insert("l".into(), json!(dec.l));
            res.insert("b1".into(), auto_pair_json(&ctx, &dec.b1));
            res.insert("b2".into(), witt_json(&dec.b2));
            res.insert("b3".into(), nil_json(&ctx, &dec.b3));
            res.insert("split".into(), split_json(&ring, &dec.split));
            res.insert("certificate".into(), cert_json(&dec.cert));
            rep.check(
                "b2.precision_bound",
                dec.meets_precision_bound(),
                format!("b2 known below {}, N − (k+ℓ) = {}", dec.b2.prec(), n - dec.k - dec.l),
            );
            rep.check("b1.invertible", dec.b1.is_invertible(&ctx), "φ restricted to P is invertible");
            match dec.b3.coker() {
                Some(ck) => match rank_check(ck) {
                    Ok(rc) => {
                        rep.check(
                            "b3.rank_identity",
                            rc.holds(),
                            format!("rank P = {}, rank Q = {}, window {}", rc.p_from_e, rc.q, rc.window),
                        );
                        rep.check("b3.window_stable", window_stable(&pair, ck)?, "rank sequence unchanged with ℓ+1");
                    }
                    Err(e) if e.is_capability() => rep.capability("b3.rank_identity", e.to_string()),
                    Err(e) => return Err(e.into()),
                },
                None => rep.capability("b3.rank_identity", "no cokernel attached"),
            }
        }
        Command::VerifyRoundtrip => {
            let pair = derive_pair(pf, n)?;
            pf.check_novikov_precision(&pair)?;
            let extended = opts.verify || pf.options.verify;
            let partner = if extended {
                let mut s = Sampler::new(&ctx, opts.seed);
                Some(s.generator_product(pair.n(), 2, n + 8, 1)?.0)
            } else {
                None
            };
            let vo = VerifyOptions {
                extended,
                generators: true,
                partner,
                cancel: None,
            };
            let (dec, r) = verify_roundtrip(&pair, n, &vo)?;
            res.insert("k".into(), json!(dec.k));
            res.insert("l".into(), json!(dec.l));
            res.insert("b2".into(), witt_json(&dec.b2));
            res.insert("b3".into(), nil_json(&ctx, &dec.b3));
            res.insert("oracle".into(), json!(oracle_field(&ctx).is_ok()));
            rep.extend(r);
        }
        Command::WittWitness => {
            let w = noninjectivity_witness(&ctx, n)?;
            res.insert("witness".into(), witness_json(&ring, &w));
            rep.check("witness.obstruction_nonzero", !ring.is_zero(&w.obstruction), ring.display(&w.obstruction));
            rep.check("witness.factorization", w.cert.verify(), format!("{} elementary factors", w.cert.factors.len()));
            rep.check("witness.series_b2", &w.series_b2 == w.y.witt(), series_to_json(w.series_b2.series()).to_string());
            rep.check("witness.recheck", w.verify(), "all witness identities recomputed");
        }
    }

    Ok(CommandReport {
        command: cmd,
        input_digest: digest(pf),
        precision: n,
        seed: opts.seed,
        results: Value::Object(res),
        checks: rep,
        elapsed_ms: start.elapsed().as_millis(),
    })
}
