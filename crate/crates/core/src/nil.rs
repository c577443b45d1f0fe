//! Projective modules given by idempotents, nilpotent pairs `(P, ν)` read off
//! from cokernels on a finite degree window, the two standard resolutions of
//! such a `P`, and the cone splitting that compares them.
//!
//! Window coordinates are left coordinates: a window element `Σ yⱼ·zʲ` is
//! stored as the concatenated rows `yⱼ`, so the left `A`-action is plain and
//! `A`-linear maps are right multiplication by constant matrices.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{theta_shift, witt_triangularize, InvertiblePair, TriangularizationCert, TwistedMatrix};
use crate::ring::linalg::{self, SolveOutcome};
use crate::ring::{AMat, Elem, Ring};
use crate::series::{Ctx, Flavor, Prec, WittVector};

/// Image of an idempotent `e` acting on row vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveModule {
    pub e: AMat,
}

impl ProjectiveModule {
    pub fn new(ring: &Ring, e: AMat) -> Result<ProjectiveModule> {
        if e.rows != e.cols {
            return Err(Error::Precondition("idempotent must be square".into()));
        }
        if e.mul(ring, &e) != e {
            return Err(Error::Invariant("e·e ≠ e".into()));
        }
        Ok(ProjectiveModule { e })
    }

    pub fn free(ring: &Ring, n: usize) -> ProjectiveModule {
        ProjectiveModule {
            e: AMat::identity(ring, n),
        }
    }

    pub fn ambient(&self) -> usize {
        self.e.rows
    }

    pub fn is_zero(&self, ring: &Ring) -> bool {
        self.e.is_zero(ring)
    }

    /// Dimension over the scalar field.
    pub fn f_dim(&self, ring: &Ring) -> Result<usize> {
        Ok(linalg::span_dim(ring, self.e.cols, &rows_of(&self.e))?)
    }

    /// Row-reduced scalar basis of the image (flattened coordinates).
    pub fn basis_of_image(&self, ring: &Ring) -> Result<Vec<Vec<Elem>>> {
        Ok(linalg::span_basis(ring, self.e.cols, &rows_of(&self.e))?)
    }
}

fn rows_of(m: &AMat) -> Vec<Vec<Elem>> {
    (0..m.rows).map(|i| m.row(i).to_vec()).collect()
}

/// Which cokernel a pair was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `A[z]`-side (or `A[[z]]`): ν induced by `z`, a ρ⁻¹-morphism.
    Plus,
    /// `z⁻¹A[z⁻¹]`-side: ν induced by `z⁻¹`, a ρ-morphism.
    Minus,
}

/// Cokernel of `α` on a finite window, together with the maps
/// `ι: P → W` and `p: W → P` with `p∘ι = 1`.
#[derive(Debug)]
pub struct Cokernel {
    pub side: Side,
    pub ctx: Ctx,
    pub n: usize,
    pub k: i64,
    pub l: i64,
    pub alpha: TwistedMatrix,
    pub beta: TwistedMatrix,
    pub e: AMat,
    pub nu: AMat,
    pub index: usize,
}

impl Cokernel {
    /// Window `[lo, hi)`: `[−ℓ, k)` on the plus side, `[−k, ℓ)` on the minus
    /// side.
    pub fn lo(&self) -> i64 {
        match self.side {
            Side::Plus => -self.l,
            Side::Minus => -self.k,
        }
    }

    pub fn hi(&self) -> i64 {
        match self.side {
            Side::Plus => self.k,
            Side::Minus => self.l,
        }
    }

    pub fn r(&self) -> usize {
        self.n * (self.hi() - self.lo()) as usize
    }

    pub fn twist(&self) -> i64 {
        match self.side {
            Side::Plus => -1,
            Side::Minus => 1,
        }
    }

    fn ring(&self) -> &Ring {
        &self.ctx.ring
    }

    /// Right-coefficient row series of a window vector.
    pub fn from_window(&self, w: &[Elem]) -> TwistedMatrix {
        from_window(&self.ctx, w, self.lo(), self.n)
    }

    /// `ι([x])`: the window part of `x·β`.
    pub fn iota(&self, x: &TwistedMatrix) -> Result<Vec<Elem>> {
        let xb = x.mul(&self.beta);
        window_of(&xb, self.lo(), self.hi(), self.n)
    }

    /// A representative of `p(w)`: `(wα)_{≥0}` on the plus side,
    /// `(wα)_{<0}` on the minus side.
    pub fn proj(&self, w: &[Elem]) -> TwistedMatrix {
        let wa = self.from_window(w).mul(&self.alpha);
        match self.side {
            Side::Plus => drop_below(&wa, 0),
            Side::Minus => wa.truncate_to(0).promote(Flavor::LaurentPoly).with_exact(self.alpha.prec()),
        }
    }

    /// `ν(y) = ρ^{twist}(y)·M` on window coordinates.
    pub fn apply_nu(&self, y: &[Elem]) -> Vec<Elem> {
        let t = self.ctx.rho.apply_all(self.twist(), y);
        self.nu.vec_mul(self.ring(), &t)
    }

    fn build(
        side: Side,
        pair: &InvertiblePair,
        k: i64,
        l: i64,
    ) -> Result<Cokernel> {
        let ctx = pair.ctx().clone();
        let n = pair.n();
        let mut ck = Cokernel {
            side,
            ctx,
            n,
            k,
            l,
            alpha: pair.alpha.clone(),
            beta: pair.beta.clone(),
            e: AMat::zeros(&pair.ctx().ring, 0, 0),
            nu: AMat::zeros(&pair.ctx().ring, 0, 0),
            index: 0,
        };
        let r = ck.r();
        let ring = ck.ring().clone();
        let mut e_rows = Vec::with_capacity(r);
        let mut nu_rows = Vec::with_capacity(r);
        for s in 0..r {
            let mut b = vec![ring.zero(); r];
            b[s] = ring.one();
            let x = ck.proj(&b);
            e_rows.push(ck.iota(&x)?);
            let shifted = match side {
                Side::Plus => x.shift(1)?,
                Side::Minus => x.shift(-1)?,
            };
            nu_rows.push(ck.iota(&shifted)?);
        }
        ck.e = mat_from_rows(r, e_rows);
        ck.nu = mat_from_rows(r, nu_rows);
        if ck.e.mul(&ring, &ck.e) != ck.e {
            return Err(Error::Invariant("window idempotent is not idempotent".into()));
        }
        ck.index = nil_index(&ck.ctx, &ck.e, &ck.nu, ck.twist(), r + 1)?;
        Ok(ck)
    }

    /// Rows of `ρ^{mt}(E)·P_m`, spanning `νᵐ(P)`.
    pub fn nu_power_image(&self, m: usize) -> AMat {
        nu_power_image(&self.ctx, &self.e, &self.nu, self.twist(), m)
    }
}

fn mat_from_rows(cols: usize, rows: Vec<Vec<Elem>>) -> AMat {
    let nrows = rows.len();
    AMat {
        rows: nrows,
        cols,
        data: rows.into_iter().flatten().collect(),
    }
}

trait WithExact {
    fn with_exact(self, prec: Prec) -> TwistedMatrix;
}

impl WithExact for TwistedMatrix {
    // A strictly negative part of an exact product is itself exact.
    fn with_exact(self, prec: Prec) -> TwistedMatrix {
        if prec == Prec::Infinite {
            let terms: Vec<(i64, AMat)> = self.terms().map(|(d, m)| (d, m.clone())).collect();
            TwistedMatrix::from_coeffs(self.ctx(), Flavor::LaurentPoly, self.rows(), self.cols(), Prec::Infinite, terms)
        } else {
            self
        }
    }
}

/// Removes all degrees below `lo`, keeping the precision.
pub(crate) fn drop_below(x: &TwistedMatrix, lo: i64) -> TwistedMatrix {
    let terms: Vec<(i64, AMat)> = x.terms().filter(|(d, _)| *d >= lo).map(|(d, m)| (d, m.clone())).collect();
    TwistedMatrix::from_coeffs(x.ctx(), x.flavor(), x.rows(), x.cols(), x.prec(), terms)
}

/// Left-coordinate window `[lo, hi)` of a row series: `yⱼ = ρ⁻ʲ(xⱼ)`.
pub(crate) fn window_of(x: &TwistedMatrix, lo: i64, hi: i64, n: usize) -> Result<Vec<Elem>> {
    if !x.prec().covers(hi - 1) && hi > lo {
        return Err(Error::Precision(format!(
            "window up to degree {} needs precision {hi}, have {}",
            hi - 1,
            x.prec()
        )));
    }
    let ctx = x.ctx();
    let mut out = Vec::with_capacity(n * (hi - lo).max(0) as usize);
    for j in lo..hi {
        match x.coeff_ref(j) {
            Some(m) => out.extend(ctx.rho.apply_all(-j, m.row(0))),
            None => out.extend((0..n).map(|_| ctx.ring.zero())),
        }
    }
    Ok(out)
}

/// Inverse of [`window_of`]: an exact row series.
pub(crate) fn from_window(ctx: &Ctx, w: &[Elem], lo: i64, n: usize) -> TwistedMatrix {
    let terms = w.chunks(n.max(1)).enumerate().filter_map(|(b, y)| {
        let j = lo + b as i64;
        if y.iter().all(|x| ctx.ring.is_zero(x)) {
            return None;
        }
        Some((j, AMat { rows: 1, cols: n, data: ctx.rho.apply_all(j, y) }))
    });
    let terms: Vec<_> = if n == 0 { Vec::new() } else { terms.collect() };
    TwistedMatrix::from_coeffs(ctx, Flavor::LaurentPoly, 1, n, Prec::Infinite, terms)
}

/// Constant row series.
pub(crate) fn const_row(ctx: &Ctx, v: &[Elem]) -> TwistedMatrix {
    let m = AMat { rows: 1, cols: v.len(), data: v.to_vec() };
    TwistedMatrix::constant(ctx, Flavor::LaurentPoly, &m, Prec::Infinite)
}

/// `[x | y]` for row series.
pub(crate) fn hcat(x: &TwistedMatrix, y: &TwistedMatrix) -> TwistedMatrix {
    let ctx = x.ctx();
    let ring = &ctx.ring;
    let cols = x.cols() + y.cols();
    let mut acc: BTreeMap<i64, AMat> = BTreeMap::new();
    for (d, m) in x.terms() {
        let e = acc.entry(d).or_insert_with(|| AMat::zeros(ring, 1, cols));
        for j in 0..m.cols {
            e.set(0, j, m.get(0, j).clone());
        }
    }
    for (d, m) in y.terms() {
        let e = acc.entry(d).or_insert_with(|| AMat::zeros(ring, 1, cols));
        for j in 0..m.cols {
            e.set(0, x.cols() + j, m.get(0, j).clone());
        }
    }
    let flavor = x.flavor().join(y.flavor());
    let prec = x.prec().min(y.prec());
    TwistedMatrix::from_coeffs(ctx, flavor, 1, cols, prec, acc)
}

/// Stacks row series into a matrix.
pub(crate) fn vstack(ctx: &Ctx, cols: usize, rows: &[TwistedMatrix]) -> TwistedMatrix {
    let ring = &ctx.ring;
    let n = rows.len();
    let mut acc: BTreeMap<i64, AMat> = BTreeMap::new();
    let mut flavor = Flavor::Poly;
    let mut prec = Prec::Infinite;
    for (i, r) in rows.iter().enumerate() {
        flavor = flavor.join(r.flavor());
        prec = prec.min(r.prec());
        for (d, m) in r.terms() {
            let e = acc.entry(d).or_insert_with(|| AMat::zeros(ring, n, cols));
            for j in 0..cols {
                e.set(i, j, m.get(0, j).clone());
            }
        }
    }
    if flavor.is_exact() && prec != Prec::Infinite {
        flavor = flavor.inexact();
    }
    TwistedMatrix::from_coeffs(ctx, flavor, n, cols, prec, acc)
}

/// `ρ^{mt}(E)·ρ^{(m−1)t}(M)···ρ^{t}(M)·M`, whose rows span `νᵐ(P)`.
fn nu_power_image(ctx: &Ctx, e: &AMat, nu: &AMat, t: i64, m: usize) -> AMat {
    let ring = &ctx.ring;
    let mut p = AMat::identity(ring, e.rows);
    for _ in 0..m {
        p = p.twist(&ctx.rho, t).mul(ring, nu);
    }
    e.twist(&ctx.rho, t * m as i64).mul(ring, &p)
}

fn nil_index(ctx: &Ctx, e: &AMat, nu: &AMat, t: i64, bound: usize) -> Result<usize> {
    for m in 0..=bound {
        if nu_power_image(ctx, e, nu, t, m).is_zero(&ctx.ring) {
            return Ok(m);
        }
    }
    Err(Error::Invariant(format!("ν is not nilpotent within {bound} steps")))
}

/// `(P, ν)` with ν a ρ^{twist}-morphism `x ↦ ρ^{twist}(x)·nu`.
#[derive(Clone, Debug)]
pub struct NilpotentPair {
    pub module: ProjectiveModule,
    pub twist: i64,
    pub nu: AMat,
    pub index: usize,
    pub(crate) coker: Option<Arc<Cokernel>>,
}

impl PartialEq for NilpotentPair {
    fn eq(&self, other: &NilpotentPair) -> bool {
        self.module == other.module && self.twist == other.twist && self.nu == other.nu && self.index == other.index
    }
}

impl NilpotentPair {
    /// A pair given directly; the index is computed.
    pub fn new(ctx: &Ctx, e: AMat, twist: i64, nu: AMat) -> Result<NilpotentPair> {
        let ring = &ctx.ring;
        let module = ProjectiveModule::new(ring, e)?;
        if nu.rows != module.ambient() || nu.cols != module.ambient() {
            return Err(Error::Precondition("ν must act on the ambient space".into()));
        }
        // ν(P) ⊆ P: the image rows are fixed by e.
        let img = nu_power_image(ctx, &module.e, &nu, twist, 1);
        if img.mul(ring, &module.e) != img {
            return Err(Error::Precondition("ν does not preserve the module".into()));
        }
        let index = nil_index(ctx, &module.e, &nu, twist, module.ambient() + 1)?;
        Ok(NilpotentPair {
            module,
            twist,
            nu,
            index,
            coker: None,
        })
    }

    /// `(Aⁿ, ν)` on a free module.
    pub fn free(ctx: &Ctx, twist: i64, nu: AMat) -> Result<NilpotentPair> {
        let e = AMat::identity(&ctx.ring, nu.rows);
        NilpotentPair::new(ctx, e, twist, nu)
    }

    fn from_coker(ck: Cokernel) -> NilpotentPair {
        NilpotentPair {
            module: ProjectiveModule { e: ck.e.clone() },
            twist: ck.twist(),
            nu: ck.nu.clone(),
            index: ck.index,
            coker: Some(Arc::new(ck)),
        }
    }

    pub fn coker(&self) -> Option<&Arc<Cokernel>> {
        self.coker.as_ref()
    }

    /// Scalar dimensions of `νʲ(P)` for `j = 0..=index`. Valid for any ρ;
    /// it is a similarity invariant only when ρ = id over a field.
    pub fn rank_profile(&self, ctx: &Ctx) -> Result<Vec<usize>> {
        (0..=self.index)
            .map(|m| {
                let img = nu_power_image(ctx, &self.module.e, &self.nu, self.twist, m);
                Ok(linalg::span_dim(&ctx.ring, img.cols, &rows_of(&img))?)
            })
            .collect()
    }
}

/// `(rank ν⁰, rank ν¹, …, 0)` over the scalar field; requires ρ = id.
pub fn nil_rank_sequence(ctx: &Ctx, pair: &NilpotentPair) -> Result<Vec<usize>> {
    if !ctx.rho.is_identity() || !ctx.ring.solvable() {
        return Err(Error::Capability(
            "rank sequences classify nilpotent pairs only over field-flattenable rings with ρ = id".into(),
        ));
    }
    pair.rank_profile(ctx)
}

/// Minimal `k` with `zᵏα` over `A[[z]]`.
pub fn lower_bound(m: &TwistedMatrix) -> i64 {
    (-m.lower().unwrap_or(0)).max(0)
}

/// Cokernel of `α̃: zᵏA_ρ[[z]]ⁿ → A_ρ[[z]]ⁿ` with ν induced by `z`.
pub fn coker_novikov(pair: &InvertiblePair, k: i64, n_prec: i64) -> Result<NilpotentPair> {
    let l = lower_bound(&pair.beta);
    if k < lower_bound(&pair.alpha) {
        return Err(Error::Precondition(format!(
            "k = {k} is below the lowest degree bound {} of α",
            lower_bound(&pair.alpha)
        )));
    }
    if n_prec < k + l + 2 {
        return Err(Error::Precision(format!(
            "precision {n_prec} is below k+ℓ+2 = {}",
            k + l + 2
        )));
    }
    if !pair.verified_to.covers(k + l + 1) {
        return Err(Error::Precision(format!(
            "inverse verified only below degree {}, need k+ℓ+2 = {}",
            pair.verified_to,
            k + l + 2
        )));
    }
    need_solving(pair.ctx())?;
    Ok(NilpotentPair::from_coker(Cokernel::build(Side::Plus, pair, k, l)?))
}

/// Cokernels of a Laurent polynomial matrix on both sides: `(P₊, ν₊)` with
/// twist −1 and `(P₋, ν₋)` with twist +1.
pub fn coker_laurent(pair: &InvertiblePair, k_plus: i64, k_minus: i64) -> Result<(NilpotentPair, NilpotentPair)> {
    need_exact(pair)?;
    need_solving(pair.ctx())?;
    let lo = pair.alpha.lower().unwrap_or(0);
    let hi = pair.alpha.upper().unwrap_or(0);
    if -lo > k_plus || hi > k_minus || k_plus < 0 || k_minus < 0 {
        return Err(Error::Precondition(format!(
            "α has degrees in [{lo}, {hi}], outside [−{k_plus}, {k_minus}]"
        )));
    }
    let l_plus = lower_bound(&pair.beta);
    let l_minus = pair.beta.upper().unwrap_or(0).max(0);
    let plus = Cokernel::build(Side::Plus, pair, k_plus, l_plus)?;
    let minus = Cokernel::build(Side::Minus, pair, k_minus, l_minus)?;
    Ok((NilpotentPair::from_coker(plus), NilpotentPair::from_coker(minus)))
}

/// Cokernel for a polynomial matrix: the `z⁻¹`-side cokernel, whose ν makes
/// `α ~ α₀·(1 − zν)`; ν is a ρ-morphism.
pub fn coker_poly(pair: &InvertiblePair, k: i64) -> Result<NilpotentPair> {
    need_exact(pair)?;
    need_solving(pair.ctx())?;
    if pair.alpha.lower().is_some_and(|d| d < 0) || pair.beta.lower().is_some_and(|d| d < 0) {
        return Err(Error::Precondition("α and its inverse must be polynomial".into()));
    }
    let top = pair.alpha.upper().unwrap_or(0);
    if k < top {
        return Err(Error::Precondition(format!("k = {k} is below the degree {top} of α")));
    }
    let l = pair.beta.upper().unwrap_or(0);
    Ok(NilpotentPair::from_coker(Cokernel::build(Side::Minus, pair, k, l)?))
}

fn need_exact(pair: &InvertiblePair) -> Result<()> {
    if pair.alpha.prec() != Prec::Infinite || pair.beta.prec() != Prec::Infinite {
        return Err(Error::Precondition("α and β must be exact (Laurent) polynomials".into()));
    }
    Ok(())
}

fn need_solving(ctx: &Ctx) -> Result<()> {
    if !ctx.ring.solvable() {
        return Err(Error::Capability(format!(
            "cokernels need a field-flattenable base ring, not {}",
            ctx.ring
        )));
    }
    Ok(())
}

/// Scalar dimensions backing the rank identity `rank P + rank Q = n(k+ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCheck {
    /// `dim P` from the idempotent.
    pub p_from_e: usize,
    /// `dim P` as the quotient of `A[[z]]ⁿ/z^{k+ℓ}` by the image of α.
    pub p_quotient: usize,
    /// `dim Q`, the cokernel of β on the window.
    pub q: usize,
    /// `n(k+ℓ)·dim A`.
    pub window: usize,
}

impl RankCheck {
    pub fn holds(&self) -> bool {
        self.p_from_e == self.p_quotient && self.p_from_e + self.q == self.window
    }
}

/// Independent dimension count for a plus-side cokernel.
pub fn rank_check(ck: &Cokernel) -> Result<RankCheck> {
    if ck.side != Side::Plus {
        return Err(Error::Precondition("rank check is for plus-side cokernels".into()));
    }
    let ring = ck.ring();
    let (n, k, l) = (ck.n, ck.k, ck.l);
    let width = k + l;
    let p_from_e = ProjectiveModule { e: ck.e.clone() }.f_dim(ring)?;
    // image of zᵏA[[z]]ⁿα in the window [0, k+ℓ)
    let mut gens = Vec::new();
    for d in k..(2 * k + l) {
        for i in 0..n {
            let x = unit_row(&ck.ctx, n, i, d);
            gens.push(window_of(&x.mul(&ck.alpha), 0, width, n)?);
        }
    }
    let img = linalg::span_dim(ring, n * width as usize, &gens)?;
    let total = n * width as usize * ring.dim();
    // span of ι(P) inside [−ℓ, k)
    let mut gens = Vec::new();
    for d in 0..width {
        for i in 0..n {
            let x = unit_row(&ck.ctx, n, i, d);
            gens.push(window_of(&x.mul(&ck.beta), -l, k, n)?);
        }
    }
    let iota_img = linalg::span_dim(ring, n * width as usize, &gens)?;
    Ok(RankCheck {
        p_from_e,
        p_quotient: total - img,
        q: total - iota_img,
        window: total,
    })
}

fn unit_row(ctx: &Ctx, n: usize, i: usize, d: i64) -> TwistedMatrix {
    let ring = &ctx.ring;
    let mut m = AMat::zeros(ring, 1, n);
    m.set(0, i, ring.one());
    TwistedMatrix::from_coeffs(ctx, Flavor::LaurentPoly, 1, n, Prec::Infinite, [(d, m)])
}

/// Recomputes the plus-side cokernel with the window enlarged to
/// `[−ℓ−1, k)` and compares rank profiles.
pub fn window_stable(pair: &InvertiblePair, ck: &Cokernel) -> Result<bool> {
    let inv = InvertiblePair {
        alpha: ck.alpha.clone(),
        beta: ck.beta.clone(),
        verified_to: pair.verified_to,
    };
    let wider = Cokernel::build(ck.side, &inv, ck.k, ck.l + 1)?;
    let a = NilpotentPair::from_coker(wider).rank_profile(&ck.ctx)?;
    let b = NilpotentPair {
        module: ProjectiveModule { e: ck.e.clone() },
        twist: ck.twist(),
        nu: ck.nu.clone(),
        index: ck.index,
        coker: None,
    }
    .rank_profile(&ck.ctx)?;
    Ok(a == b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionKind {
    /// `0 → zᵏA[[z]]ⁿ → A[[z]]ⁿ → P → 0`.
    Mu,
    /// `0 → zP[[z]] → P[[z]] → P → 0`.
    Theta,
}

/// A length-one resolution `0 → F₁ → F₀ → P → 0` with `F₁ = im e1`,
/// `F₀ = im e0` in coordinates over `A[[z]]` and differential `d`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub kind: ResolutionKind,
    pub coker: Arc<Cokernel>,
    pub e0: AMat,
    pub e1: AMat,
    pub d: TwistedMatrix,
    // ν-power matrices Pₘ with νᵐ(x) = ρ^{−m}(x)·Pₘ, m < index
    nu_pows: Vec<AMat>,
}

impl Resolution {
    fn ctx(&self) -> &Ctx {
        &self.coker.ctx
    }

    pub fn dim0(&self) -> usize {
        self.e0.rows
    }

    pub fn dim1(&self) -> usize {
        self.e1.rows
    }

    /// `π: F₀ → P` in window coordinates.
    pub fn pi(&self, y: &TwistedMatrix) -> Result<Vec<Elem>> {
        match self.kind {
            ResolutionKind::Mu => self.coker.iota(y),
            ResolutionKind::Theta => {
                let ring = &self.ctx().ring;
                let m = self.nu_pows.len() as i64;
                if m > 0 && !y.prec().covers(m - 1) {
                    return Err(Error::Precision("π̃ needs the first index-many coefficients".into()));
                }
                let mut out = vec![ring.zero(); self.dim0()];
                for (j, c) in y.terms() {
                    if j < 0 {
                        return Err(Error::Precondition("element of P[[z]] has negative degree".into()));
                    }
                    if j >= m {
                        break;
                    }
                    let v = self.nu_apply(j as usize, c.row(0));
                    for (o, x) in out.iter_mut().zip(v) {
                        *o = ring.add(o, &x);
                    }
                }
                Ok(out)
            }
        }
    }

    fn nu_apply(&self, m: usize, x: &[Elem]) -> Vec<Elem> {
        let ctx = self.ctx();
        let t = self.coker.twist();
        let tx = ctx.rho.apply_all(t * m as i64, x);
        self.nu_pows[m].vec_mul(&ctx.ring, &tx)
    }

    /// An `A`-linear lift `P → F₀` of π.
    pub fn lift(&self, p: &[Elem]) -> TwistedMatrix {
        match self.kind {
            ResolutionKind::Mu => self.coker.proj(p),
            ResolutionKind::Theta => const_row(self.ctx(), p),
        }
    }

    /// Left inverse of `d` on `ker π` (`τ` for the θ-resolution).
    pub fn retract(&self, y: &TwistedMatrix) -> Result<TwistedMatrix> {
        let ctx = self.ctx().clone();
        match self.kind {
            ResolutionKind::Mu => {
                let k = self.coker.k;
                Ok(y.mul(&self.coker.beta).mul(&theta_shift(&ctx, self.coker.n, -k)))
            }
            ResolutionKind::Theta => {
                let ring = &ctx.ring;
                let m = self.nu_pows.len() as i64;
                let r = self.dim0();
                // τ(y)_{j+1} = Σ_{i<m} νⁱ(y_{j+i+1}); coordinates u_j = ρ⁻¹(τ(y)_{j+1})
                let top = match y.prec() {
                    Prec::Finite(p) => p - m,
                    Prec::Infinite => y.upper().unwrap_or(0),
                };
                let mut terms = Vec::new();
                for j in 0..top.max(0) {
                    let mut acc = vec![ring.zero(); r];
                    for i in 0..m {
                        if let Some(c) = y.coeff_ref(j + i + 1) {
                            let v = self.nu_apply(i as usize, c.row(0));
                            for (o, x) in acc.iter_mut().zip(v) {
                                *o = ring.add(o, &x);
                            }
                        }
                    }
                    let t = self.coker.twist();
                    let u = ctx.rho.apply_all(t, &acc);
                    if u.iter().any(|x| !ring.is_zero(x)) {
                        terms.push((j, AMat { rows: 1, cols: r, data: u }));
                    }
                }
                let prec = match y.prec() {
                    Prec::Finite(p) => Prec::Finite((p - m).max(0)),
                    Prec::Infinite => Prec::Infinite,
                };
                let flavor = if prec == Prec::Infinite { Flavor::Poly } else { Flavor::PowerSeries };
                Ok(TwistedMatrix::from_coeffs(&ctx, flavor, 1, r, prec, terms))
            }
        }
    }

    pub fn apply_d(&self, u: &TwistedMatrix) -> TwistedMatrix {
        u.mul(&self.d)
    }
}

fn need_plus_coker(pair: &NilpotentPair) -> Result<Arc<Cokernel>> {
    match &pair.coker {
        Some(ck) if ck.side == Side::Plus => Ok(ck.clone()),
        Some(_) => Err(Error::Precondition("resolutions are built for plus-side cokernels".into())),
        None => Err(Error::Stale("pair carries no window data".into())),
    }
}

/// `(μ(α,k), θ(α,k))` and the comparison `(f, g)` from the first to the
/// second.
pub fn build_resolutions(pair: &NilpotentPair) -> Result<(Resolution, Resolution, ChainMap)> {
    let mu = mu_resolution(pair)?;
    let theta = theta_resolution(pair)?;
    let fg = chain_map(&mu, &theta)?;
    Ok((mu, theta, fg))
}

/// `μ(α,k)` for the cokernel behind `pair`.
pub fn mu_resolution(pair: &NilpotentPair) -> Result<Resolution> {
    let ck = need_plus_coker(pair)?;
    let ring = ck.ctx.ring.clone();
    let n = ck.n;
    let d = ck.alpha.shift(ck.k)?;
    Ok(Resolution {
        kind: ResolutionKind::Mu,
        e0: AMat::identity(&ring, n),
        e1: AMat::identity(&ring, n),
        d,
        nu_pows: Vec::new(),
        coker: ck,
    })
}

/// `θ(α,k)`: `d = z·1 − M` in the coordinates `x ↦ x·z⁻¹` on `zP[[z]]`.
pub fn theta_resolution(pair: &NilpotentPair) -> Result<Resolution> {
    let ck = need_plus_coker(pair)?;
    let ctx = ck.ctx.clone();
    let ring = &ctx.ring;
    let r = ck.r();
    let t = ck.twist();
    let d = TwistedMatrix::from_coeffs(
        &ctx,
        Flavor::Poly,
        r,
        r,
        Prec::Infinite,
        [(0, ck.nu.neg(ring)), (1, AMat::identity(ring, r))],
    );
    let mut nu_pows = Vec::with_capacity(ck.index);
    let mut p = AMat::identity(ring, r);
    for _ in 0..ck.index {
        nu_pows.push(p.clone());
        p = p.twist(&ctx.rho, t).mul(ring, &ck.nu);
    }
    Ok(Resolution {
        kind: ResolutionKind::Theta,
        e0: ck.e.clone(),
        e1: ck.e.twist(&ctx.rho, t),
        d,
        nu_pows,
        coker: ck,
    })
}

/// Lemma-3 style identities checked on given test elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSumCheck {
    pub pi_sigma: bool,
    pub tau_d: bool,
    pub sigma_pi_plus_d_tau: bool,
    pub pi_d_zero: bool,
}

impl DirectSumCheck {
    pub fn holds(&self) -> bool {
        self.pi_sigma && self.tau_d && self.sigma_pi_plus_d_tau && self.pi_d_zero
    }
}

/// Checks `π∘lift = 1`, `retract∘d = 1`, `lift∘π + d∘retract = 1` and
/// `π∘d = 0` on polynomial test elements `u ∈ F₁`, `y ∈ F₀`, `p ∈ P`.
pub fn check_direct_sum_system(
    res: &Resolution,
    us: &[TwistedMatrix],
    ys: &[TwistedMatrix],
    ps: &[Vec<Elem>],
) -> Result<DirectSumCheck> {
    let ring = res.ctx().ring.clone();
    let e = &res.coker.e;
    let mut out = DirectSumCheck {
        pi_sigma: true,
        tau_d: true,
        sigma_pi_plus_d_tau: true,
        pi_d_zero: true,
    };
    for p in ps {
        let p = e.vec_mul(&ring, &e.vec_mul(&ring, p));
        out.pi_sigma &= res.pi(&res.lift(&p))? == p;
    }
    for u in us {
        let du = res.apply_d(u);
        let back = res.retract(&du)?;
        out.tau_d &= back.eq_at_common_prec(u);
        out.pi_d_zero &= res.pi(&du)?.iter().all(|x| ring.is_zero(x));
    }
    for y in ys {
        let p = res.pi(y)?;
        let s = res.lift(&p).add(&res.apply_d(&res.retract(y)?));
        out.sigma_pi_plus_d_tau &= s.eq_at_common_prec(y);
    }
    Ok(out)
}

/// Chain map `(f₀, f₁)` between two resolutions of the same `P`, lifting
/// the identity.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub f0: TwistedMatrix,
    pub f1: TwistedMatrix,
    pub identity: bool,
}

fn same_module(r1: &Resolution, r2: &Resolution) -> Result<()> {
    if !Arc::ptr_eq(&r1.coker, &r2.coker) {
        return Err(Error::Precondition("resolutions resolve different modules".into()));
    }
    Ok(())
}

/// The canonical comparison: `f₀ = lift₂∘π₁` on generators and
/// `f₁ = retract₂∘f₀∘d₁`; the identity when both resolutions coincide.
pub fn chain_map(r1: &Resolution, r2: &Resolution) -> Result<ChainMap> {
    same_module(r1, r2)?;
    let ctx = r1.ctx().clone();
    if r1.kind == r2.kind {
        return Ok(ChainMap {
            f0: TwistedMatrix::constant(&ctx, Flavor::Poly, &r1.e0, Prec::Infinite),
            f1: TwistedMatrix::constant(&ctx, Flavor::Poly, &r1.e1, Prec::Infinite),
            identity: true,
        });
    }
    let mut f0_rows = Vec::with_capacity(r1.dim0());
    for s in 0..r1.dim0() {
        let q = const_row(&ctx, r1.e0.row(s));
        f0_rows.push(r2.lift(&r1.pi(&q)?));
    }
    let f0 = vstack(&ctx, r2.dim0(), &f0_rows);
    let mut f1_rows = Vec::with_capacity(r1.dim1());
    for s in 0..r1.dim1() {
        let c = const_row(&ctx, r1.e1.row(s));
        let y = r1.apply_d(&c).mul(&f0);
        f1_rows.push(r2.retract(&y)?);
    }
    let f1 = vstack(&ctx, r2.dim1(), &f1_rows);
    Ok(ChainMap { f0, f1, identity: false })
}

/// The isomorphism `h: F₀′ ⊕ F₁ → F₁′ ⊕ F₀` from a splitting of the mapping
/// cone, with its constant term and the relative torsion `h₀⁻¹h`.
#[derive(Clone, Debug)]
pub struct ConeSplit {
    pub h: TwistedMatrix,
    pub h0: AMat,
    /// Inverse of `h₀` between the images: `h₀·g = e_dom`, `g·h₀ = e_cod`.
    pub g: AMat,
    pub e_dom: AMat,
    pub e_cod: AMat,
    /// `e_dom·h·g + (1 − e_dom)`, constant term 1.
    pub x_full: TwistedMatrix,
}

/// Splits the cone of `cm: R₁ → R₂` with the section
/// `s(q) = (−retract₂(f₀(y) − q), y)`, `y = lift₁(π₂(q))`.
pub fn split_cone(r1: &Resolution, r2: &Resolution, cm: &ChainMap) -> Result<ConeSplit> {
    same_module(r1, r2)?;
    let ctx = r1.ctx().clone();
    let ring = ctx.ring.clone();
    let (a1, b1, a2, b2) = (r1.dim0(), r1.dim1(), r2.dim0(), r2.dim1());
    if a2 + b1 != b2 + a1 {
        return Err(Error::Invariant("cone terms have different ranks".into()));
    }
    let cols = b2 + a1;
    let mut rows = Vec::with_capacity(a2 + b1);
    for s in 0..a2 {
        let q = const_row(&ctx, r2.e0.row(s));
        let y = if cm.identity { q.clone() } else { r1.lift(&r2.pi(&q)?) };
        let resid = y.mul(&cm.f0).sub(&q);
        let x = r2.retract(&resid)?.neg();
        rows.push(hcat(&x, &y));
    }
    for s in 0..b1 {
        let c = const_row(&ctx, r1.e1.row(s));
        rows.push(hcat(&c.mul(&cm.f1).neg(), &r1.apply_d(&c)));
    }
    let h = vstack(&ctx, cols, &rows);
    let e_dom = AMat::block_diag(&ring, &[&r2.e0, &r1.e1]);
    let e_cod = AMat::block_diag(&ring, &[&r2.e1, &r1.e0]);
    let h0 = h.coeff(0);
    let g = pseudo_inverse(&ring, &h0, &e_dom, &e_cod)?;
    let x = h.mul(&TwistedMatrix::constant(&ctx, Flavor::Poly, &g, Prec::Infinite));
    let one_minus = AMat::identity(&ring, e_dom.rows).sub(&ring, &e_dom);
    let x_full = x.add(&TwistedMatrix::constant(&ctx, Flavor::Poly, &one_minus, Prec::Infinite));
    Ok(ConeSplit {
        h,
        h0,
        g,
        e_dom,
        e_cod,
        x_full,
    })
}

/// `g` with `h₀·g = e_dom` and `g·h₀ = e_cod`, for `h₀` an isomorphism
/// `im e_dom → im e_cod`.
pub fn pseudo_inverse(ring: &Ring, h0: &AMat, e_dom: &AMat, e_cod: &AMat) -> Result<AMat> {
    let size = e_cod.rows;
    let mut rows = Vec::with_capacity(size);
    for t in 0..size {
        match linalg::solve_right_linear(ring, h0, e_cod.row(t))? {
            SolveOutcome::Solution(y) => rows.push(e_dom.vec_mul(ring, &y)),
            SolveOutcome::NoSolution => {
                return Err(Error::Invariant("h₀ is not onto its target".into()));
            }
        }
    }
    let g = mat_from_rows(e_dom.cols, rows);
    if h0.mul(ring, &g) != *e_dom || g.mul(ring, h0) != *e_cod {
        return Err(Error::Invariant("h₀ is not an isomorphism between the images".into()));
    }
    Ok(g)
}

/// Witt torsion of `h₀⁻¹h`: the ordered diagonal product after
/// triangularization, with the certificate.
pub fn witt_of_split(split: &ConeSplit, n_prec: i64) -> Result<(WittVector, TriangularizationCert)> {
    let cert = witt_triangularize(&split.x_full, n_prec)?;
    Ok((cert.diag_product(), cert))
}

/// The class `[P ⊕ Aⁿ, φ] − [Aᵗ, θₜ]` with `t = theta_rank`, where
/// `φ(x) = ρ(x)·phi` and `φ⁻¹(q) = ρ⁻¹(q)·phi_inv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismPair {
    pub module: ProjectiveModule,
    pub phi: AMat,
    pub phi_inv: AMat,
    pub stab_rank: usize,
    /// `(k+1)·n` for a pair read off a cokernel of `zᵏ`-shifted α.
    pub theta_rank: usize,
}

impl AutomorphismPair {
    /// `(Aⁿ, θ·a)`: φ(x) = ρ(x)·a for an invertible constant `a`.
    pub fn free(ctx: &Ctx, a: &AMat) -> Result<AutomorphismPair> {
        let ring = &ctx.ring;
        let inv = linalg::invert(ring, a)?;
        Ok(AutomorphismPair {
            module: ProjectiveModule::free(ring, a.rows),
            phi: a.clone(),
            phi_inv: inv.twist(&ctx.rho, -1),
            stab_rank: a.rows,
            theta_rank: a.rows,
        })
    }

    /// `true` when φ and φ⁻¹ compose to the identity on the module.
    pub fn is_invertible(&self, ctx: &Ctx) -> bool {
        let ring = &ctx.ring;
        let e = &self.module.e;
        // φ(φ⁻¹(q)) = q·ρ(phi_inv)·phi, φ⁻¹(φ(x)) = x·ρ⁻¹(phi)·phi_inv
        let a = e.mul(ring, &self.phi_inv.twist(&ctx.rho, 1)).mul(ring, &self.phi);
        let b = e.mul(ring, &self.phi.twist(&ctx.rho, -1)).mul(ring, &self.phi_inv);
        a == *e && b == *e
    }
}

/// `φ = ρ∘h₀` on `P ⊕ Aⁿ`, measured against `(k+1)·[Aⁿ, θₙ]`: passing from
/// `k` to `k+1` adds a copy of `Aⁿ` to `P`.
pub fn phi_from_h0(ctx: &Ctx, split: &ConeSplit, n: usize, k: i64) -> Result<AutomorphismPair> {
    let phi = split.h0.twist(&ctx.rho, 1);
    let pair = AutomorphismPair {
        module: ProjectiveModule::new(&ctx.ring, split.e_dom.clone())?,
        phi,
        phi_inv: split.g.clone(),
        stab_rank: n,
        theta_rank: n * (k + 1) as usize,
    };
    if !pair.is_invertible(ctx) {
        return Err(Error::Invariant("φ built from h₀ is not invertible".into()));
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn q(n: i64) -> Elem {
        Elem::Q(rat(n))
    }

    fn qctx() -> Ctx {
        Ctx::untwisted(Ring::rationals())
    }

    fn amat(rows: &[&[i64]]) -> AMat {
        AMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    fn laurent(ctx: &Ctx, n: usize, terms: Vec<(i64, AMat)>) -> TwistedMatrix {
        TwistedMatrix::from_coeffs(ctx, Flavor::LaurentPoly, n, n, Prec::Infinite, terms)
    }

    fn pair(ctx: &Ctx, n: usize, a: Vec<(i64, AMat)>, b: Vec<(i64, AMat)>) -> InvertiblePair {
        InvertiblePair::verified(laurent(ctx, n, a), laurent(ctx, n, b)).unwrap()
    }

    fn e12() -> AMat {
        amat(&[&[0, 1], &[0, 0]])
    }

    fn id2() -> AMat {
        amat(&[&[1, 0], &[0, 1]])
    }

    #[test]
    fn z_has_cokernel_a_with_zero_nu() {
        let ctx = qctx();
        let p = pair(&ctx, 1, vec![(1, amat(&[&[1]]))], vec![(-1, amat(&[&[1]]))]);
        let np = coker_novikov(&p, 0, 8).unwrap();
        assert_eq!(np.twist, -1);
        assert_eq!(nil_rank_sequence(&ctx, &np).unwrap(), vec![1, 0]);
        let (plus, minus) = coker_laurent(&p, 0, 1).unwrap();
        assert_eq!(plus.rank_profile(&ctx).unwrap(), vec![1, 0]);
        assert!(minus.module.is_zero(&ctx.ring));
    }

    #[test]
    fn one_minus_zinv_nu() {
        let ctx = qctx();
        let p = pair(
            &ctx,
            2,
            vec![(0, id2()), (-1, e12().neg(&ctx.ring))],
            vec![(0, id2()), (-1, e12())],
        );
        let np = coker_novikov(&p, 1, 8).unwrap();
        assert_eq!(nil_rank_sequence(&ctx, &np).unwrap(), vec![2, 1, 0]);
        let rc = rank_check(np.coker().unwrap()).unwrap();
        assert!(rc.holds(), "{rc:?}");
        assert!(window_stable(&p, np.coker().unwrap()).unwrap());
        let (plus, minus) = coker_laurent(&p, 1, 0).unwrap();
        assert_eq!(plus.rank_profile(&ctx).unwrap(), vec![2, 1, 0]);
        assert!(minus.module.is_zero(&ctx.ring));
    }

    #[test]
    fn poly_example_gives_forced_nu() {
        let ctx = qctx();
        let a1 = amat(&[&[0, -1], &[0, 0]]);
        let p = pair(&ctx, 2, vec![(0, id2()), (1, a1.clone())], vec![(0, id2()), (1, a1.neg(&ctx.ring))]);
        let np = coker_poly(&p, 1).unwrap();
        assert_eq!(np.twist, 1);
        assert_eq!(nil_rank_sequence(&ctx, &np).unwrap(), vec![2, 1, 0]);
        let ident = pair(&ctx, 2, vec![(0, id2())], vec![(0, id2())]);
        assert!(coker_poly(&ident, 0).unwrap().module.is_zero(&ctx.ring));
    }

    #[test]
    fn rank_sequences_of_free_pairs() {
        let ctx = qctx();
        let shift3 = amat(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let p = NilpotentPair::free(&ctx, 1, shift3).unwrap();
        assert_eq!(nil_rank_sequence(&ctx, &p).unwrap(), vec![3, 2, 1, 0]);
        let z = NilpotentPair::free(&ctx, 1, amat(&[&[0, 0], &[0, 0]])).unwrap();
        assert_eq!(nil_rank_sequence(&ctx, &z).unwrap(), vec![2, 0]);
    }

    #[test]
    fn resolutions_satisfy_direct_sum_identities() {
        let ctx = qctx();
        let p = pair(
            &ctx,
            2,
            vec![(0, id2()), (-1, e12().neg(&ctx.ring))],
            vec![(0, id2()), (-1, e12())],
        );
        let np = coker_novikov(&p, 1, 8).unwrap();
        let th = theta_resolution(&np).unwrap();
        let ring = &ctx.ring;
        let r = th.dim0();
        let e = &th.e0;
        let mk = |m: &AMat, seed: i64| {
            let v: Vec<Elem> = (0..r).map(|i| ring.from_i64(seed + i as i64)).collect();
            m.vec_mul(ring, &v)
        };
        let ys: Vec<TwistedMatrix> = (0..3)
            .map(|s| {
                TwistedMatrix::from_coeffs(
                    &ctx,
                    Flavor::Poly,
                    1,
                    r,
                    Prec::Infinite,
                    (0..4).map(|d| (d, AMat { rows: 1, cols: r, data: mk(e, s + d) })),
                )
            })
            .collect();
        let us: Vec<TwistedMatrix> = (0..3)
            .map(|s| {
                TwistedMatrix::from_coeffs(
                    &ctx,
                    Flavor::Poly,
                    1,
                    r,
                    Prec::Infinite,
                    (0..3).map(|d| (d, AMat { rows: 1, cols: r, data: mk(&th.e1, 2 * s - d) })),
                )
            })
            .collect();
        let ps: Vec<Vec<Elem>> = (0..3).map(|s| mk(e, 3 * s + 1)).collect();
        assert!(check_direct_sum_system(&th, &us, &ys, &ps).unwrap().holds());
        let mu = mu_resolution(&np).unwrap();
        let cm = chain_map(&mu, &th).unwrap();
        let split = split_cone(&mu, &th, &cm).unwrap();
        assert!(split.x_full.coeff(0).is_identity(ring));
    }

    #[test]
    fn cone_for_z_gives_trivial_witt_vector() {
        let ctx = qctx();
        let p = pair(&ctx, 1, vec![(1, amat(&[&[1]]))], vec![(-1, amat(&[&[1]]))]);
        let np = coker_novikov(&p, 0, 8).unwrap();
        let mu = mu_resolution(&np).unwrap();
        let th = theta_resolution(&np).unwrap();
        let cm = chain_map(&mu, &th).unwrap();
        let split = split_cone(&mu, &th, &cm).unwrap();
        let (w, _) = witt_of_split(&split, 8).unwrap();
        assert!(w.is_one());
        let phi = phi_from_h0(&ctx, &split, 1, 0).unwrap();
        assert_eq!(phi.phi.rows, 2);
    }
}
