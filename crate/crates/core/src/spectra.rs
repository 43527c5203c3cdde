//! Zeros of analytic functions by the argument principle, and the spectrum
//! reports, multiplicities and Jordan chains built on them.
//!
//! Winding numbers are accumulated segment by segment: a segment's change of
//! arg F is the principal arg of F(end)/F(start), accepted once a Simpson
//! estimate of ∫F′/F agrees with it; otherwise the segment is bisected. The
//! result is an exact integer by construction, so quadtree additivity can
//! be checked with `==`.

use crate::chain::Mode;
use crate::charfn::{charfn_mode, eigvec_jet_mode, eigvec_mode, SolutionSlice};
use crate::cx;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sequence::{OperatorSpec, RegClass};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

/// |F| below this multiple of the magnitude scale counts as a zero.
const NODE_FLOOR: f64 = 1e-13;
/// Residual bound for accepting a Newton point.
const RESIDUAL_REL: f64 = 1e-8;
const MAX_SEG_DEPTH: usize = 40;
const JITTERS: usize = 5;
const JITTER_REL: f64 = 1e-3;

/// A function we can expand in Taylor jets.
pub trait AnalyticFn: Sync {
    /// Jet of the given order at z, and ln of the magnitude scale there.
    fn eval(&self, z: C, order: usize) -> Result<(Jet, f64)>;
}

/// F̃ (regularized) or F_J (generic) of a spec.
pub struct CharFn<'a> {
    pub spec: &'a OperatorSpec,
    pub mode: Mode,
    pub tol: f64,
}

impl AnalyticFn for CharFn<'_> {
    fn eval(&self, z: C, order: usize) -> Result<(Jet, f64)> {
        let v = charfn_mode(self.spec, self.mode, Jet::variable(z, order), self.tol)?;
        Ok((v.value, v.log_magnitude))
    }
}

/// z ↦ det(J_{[−N,N]} − z).
pub struct FiniteSection<'a> {
    pub spec: &'a OperatorSpec,
    pub n: usize,
}

impl AnalyticFn for FiniteSection<'_> {
    fn eval(&self, z: C, order: usize) -> Result<(Jet, f64)> {
        let zj = Jet::variable(z, order);
        let one = Jet::constant(z, order, C::new(1.0, 0.0));
        let n = self.n as i64;
        let (mut d2, mut d1) = (Jet::constant(z, order, C::new(0.0, 0.0)), one);
        let (mut m2, mut m1) = (0.0f64, 1.0f64);
        for k in -n..=n {
            let a = one.scale(self.spec.lambda(k)) - zj;
            let w2 = self.spec.w_sq(k - 1);
            let cur = if k == -n { a * d1 } else { a * d1 - d2.scale(w2) };
            d2 = d1;
            d1 = cur;
            let mc = (self.spec.lambda(k) - z).norm() * m1 + if k == -n { 0.0 } else { w2.norm() * m2 };
            m2 = m1;
            m1 = mc;
        }
        Ok((d1, m1.max(f64::MIN_POSITIVE).ln()))
    }
}

/// Any closure on jets, e.g. a polynomial for testing.
pub struct JetFn<F>(pub F);

impl<F: Fn(Jet) -> Jet + Sync> AnalyticFn for JetFn<F> {
    fn eval(&self, z: C, order: usize) -> Result<(Jet, f64)> {
        Ok(((self.0)(Jet::variable(z, order)), 0.0))
    }
}

/// Axis-parallel rectangle [x0, x1] × [y0, y1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1;
        if !ok {
            return Err(Error::InvalidFamilyParams(format!("degenerate rectangle [{x0}, {x1}]×[{y0}, {y1}]")));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x0, self.x1, self.y0, self.y1]
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diam(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> C {
        C::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, z: C) -> bool {
        z.re > self.x0 && z.re < self.x1 && z.im > self.y0 && z.im < self.y1
    }

    fn expand(&self, d: f64) -> Rect {
        Rect { x0: self.x0 - d, x1: self.x1 + d, y0: self.y0 - d, y1: self.y1 + d }
    }

    fn dist_to(&self, z: C) -> f64 {
        let dx = (self.x0 - z.re).max(z.re - self.x1).max(0.0);
        let dy = (self.y0 - z.im).max(z.im - self.y1).max(0.0);
        dx.hypot(dy)
    }

    fn far_dist_to(&self, z: C) -> f64 {
        let dx = (z.re - self.x0).abs().max((z.re - self.x1).abs());
        let dy = (z.im - self.y0).abs().max((z.im - self.y1).abs());
        dx.hypot(dy)
    }

    fn pieces(&self) -> Vec<Piece> {
        let (a, b, c, d) =
            (C::new(self.x0, self.y0), C::new(self.x1, self.y0), C::new(self.x1, self.y1), C::new(self.x0, self.y1));
        vec![Piece::Line(a, b), Piece::Line(b, c), Piece::Line(c, d), Piece::Line(d, a)]
    }
}

/// A closed, positively oriented contour.
#[derive(Clone, Copy, Debug)]
pub enum Contour {
    Rect(Rect),
    Circle { center: C, radius: f64 },
}

impl Contour {
    fn pieces(&self) -> Vec<Piece> {
        match *self {
            Contour::Rect(r) => r.pieces(),
            Contour::Circle { center, radius } => vec![Piece::Arc(center, radius)],
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Line(C, C),
    Arc(C, f64),
}

fn lerp(a: C, b: C, u: f64) -> C {
    if u == 1.0 {
        b
    } else {
        a + (b - a) * u
    }
}

impl Piece {
    /// Point at u ∈ [0, 1] and dz/du. Lines are parametrized from their
    /// lexicographically smaller end so shared edges hit identical nodes.
    fn at(&self, u: f64) -> (C, C) {
        match *self {
            Piece::Line(a, b) => {
                let z = if (a.re, a.im) <= (b.re, b.im) { lerp(a, b, u) } else { lerp(b, a, 1.0 - u) };
                (z, b - a)
            }
            Piece::Arc(c, r) => {
                let e = C::from_polar(1.0, 2.0 * PI * u);
                (c + e * r, C::new(0.0, 2.0 * PI * r) * e)
            }
        }
    }

    fn initial_splits(&self) -> usize {
        match self {
            Piece::Line(..) => 4,
            Piece::Arc(..) => 16,
        }
    }
}

#[derive(Clone, Copy)]
struct Node {
    f: C,
    /// F′/F
    g: C,
}

/// Evaluation cache for one search. Keys are exact coordinates, so shared
/// box edges and repeated circles cost nothing the second time.
struct Evaluator<'a> {
    f: &'a dyn AnalyticFn,
    cache: Mutex<HashMap<(u64, u64), (C, C, f64)>>,
}

impl<'a> Evaluator<'a> {
    fn new(f: &'a dyn AnalyticFn) -> Self {
        Evaluator { f, cache: Mutex::new(HashMap::new()) }
    }

    fn node(&self, z: C) -> Result<Node> {
        let key = (z.re.to_bits(), z.im.to_bits());
        let hit = self.cache.lock().unwrap().get(&key).copied();
        let (f, df, log_scale) = match hit {
            Some(v) => v,
            None => {
                let (jet, ls) = self.f.eval(z, 1)?;
                let v = (jet.coeff(0), jet.coeff(1), ls);
                self.cache.lock().unwrap().insert(key, v);
                v
            }
        };
        if !(f.norm() >= NODE_FLOOR * log_scale.exp()) {
            return Err(Error::OnContourZero { re: z.re, im: z.im });
        }
        Ok(Node { f, g: df / f })
    }

    /// Change of arg F along `piece` between u0 and u1.
    fn segment(&self, piece: &Piece, (u0, n0): (f64, Node), (u1, n1): (f64, Node), depth: usize) -> Result<f64> {
        let um = 0.5 * (u0 + u1);
        let (zm, dm) = piece.at(um);
        let nm = self.node(zm)?;
        let (_, d0) = piece.at(u0);
        let (_, d1) = piece.at(u1);
        let simpson = (n0.g * d0 + nm.g * dm * 4.0 + n1.g * d1) * ((u1 - u0) / 6.0);
        let ratio = n1.f / n0.f;
        let darg = ratio.arg();
        let dlog = ratio.norm().ln();
        if darg.abs() < 2.0 && (darg - simpson.im).abs() < 0.05 && (dlog - simpson.re).abs() < 0.05 {
            return Ok(darg);
        }
        if depth >= MAX_SEG_DEPTH {
            return Err(Error::NonConvergent(format!("contour segment near {zm} not resolved")));
        }
        let left = self.segment(piece, (u0, n0), (um, nm), depth + 1)?;
        let right = self.segment(piece, (um, nm), (u1, n1), depth + 1)?;
        Ok(left + right)
    }

    fn winding(&self, contour: &Contour) -> Result<i64> {
        let mut segs = Vec::new();
        for p in contour.pieces() {
            let k = p.initial_splits();
            for i in 0..k {
                segs.push((p, i as f64 / k as f64, (i + 1) as f64 / k as f64));
            }
        }
        let parts: Vec<Result<f64>> = segs
            .par_iter()
            .map(|(p, u0, u1)| {
                let n0 = self.node(p.at(*u0).0)?;
                let n1 = self.node(p.at(*u1).0)?;
                self.segment(p, (*u0, n0), (*u1, n1), 0)
            })
            .collect();
        // report a contour zero in preference to other failures
        let mut total = 0.0;
        let mut first_err = None;
        for r in parts {
            match r {
                Ok(v) => total += v,
                Err(e @ Error::OnContourZero { .. }) => return Err(e),
                Err(e) => first_err = first_err.or(Some(e)),
            }
        }
        if let Some(e) = first_err {
            return Err(e);
        }
        let turns = total / (2.0 * PI);
        let k = turns.round();
        if (turns - k).abs() > 0.05 {
            return Err(Error::NonConvergent(format!("winding {turns} not near an integer")));
        }
        Ok(k as i64)
    }
}

/// Number of zeros minus poles of `f` inside `contour`.
pub fn winding_count(f: &dyn AnalyticFn, contour: &Contour) -> Result<i64> {
    Evaluator::new(f).winding(contour)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "WINDING+NEWTON")]
    WindingNewton,
    #[serde(rename = "WINDING_ONLY")]
    WindingOnly,
}

/// A located zero.
#[derive(Clone, Debug, Serialize)]
pub struct Eigenpoint {
    #[serde(serialize_with = "cx::ser")]
    pub z: C,
    pub multiplicity: usize,
    /// |F(z)|
    #[serde(rename = "residual")]
    pub newton_residual: f64,
    pub method: Method,
    /// Radius of the circle whose winding certified the multiplicity.
    pub certify_radius: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// A disk the search does not enter.
#[derive(Clone, Debug, Serialize)]
pub struct Zone {
    #[serde(serialize_with = "cx::ser")]
    pub center: C,
    pub radius: f64,
    pub reason: String,
}

impl Zone {
    fn touches(&self, r: &Rect) -> bool {
        r.dist_to(self.center) <= self.radius
    }
}

#[derive(Clone, Debug)]
pub struct LocateOpts {
    pub tol: f64,
    pub max_depth: usize,
    pub exclusions: Vec<Zone>,
    pub cluster_tol: f64,
}

impl LocateOpts {
    pub fn new(tol: f64) -> Self {
        LocateOpts { tol, max_depth: 40, exclusions: Vec::new(), cluster_tol: 10.0 * tol }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LocateStats {
    pub boxes: usize,
    pub depth: usize,
    pub evaluations: usize,
    pub jitters: usize,
    pub dropped_in_zones: usize,
}

#[derive(Clone, Debug)]
pub struct Located {
    pub points: Vec<Eigenpoint>,
    pub stats: LocateStats,
}

#[derive(Clone, Copy)]
struct Task {
    rect: Rect,
    winding: Option<i64>,
    depth: usize,
}

enum Outcome {
    Point(Eigenpoint),
    Split(Vec<Task>, usize),
    Drop { zone: bool },
}

struct Search<'a> {
    ev: Evaluator<'a>,
    opts: &'a LocateOpts,
}

impl Search<'_> {
    fn in_zone(&self, r: &Rect) -> Option<&Zone> {
        self.opts.exclusions.iter().find(|z| z.touches(r))
    }

    fn process(&self, t: &Task) -> Result<Outcome> {
        if t.depth > self.opts.max_depth {
            return Err(Error::DepthExceeded(self.opts.max_depth));
        }
        if let Some(zone) = self.in_zone(&t.rect) {
            // straddling boxes shrink to a quarter of the radius, then go
            if t.rect.far_dist_to(zone.center) <= zone.radius || t.rect.diam() <= 0.25 * zone.radius {
                return Ok(Outcome::Drop { zone: true });
            }
            return self.split(t);
        }
        let w = match t.winding {
            Some(w) => w,
            None => self.winding_rect(&t.rect)?,
        };
        if w == 0 {
            return Ok(Outcome::Drop { zone: false });
        }
        if w < 0 {
            return Err(Error::NonConvergent(format!("negative winding {w}: a pole inside the search box")));
        }
        let m = w as usize;
        if let Some(p) = self.newton(&t.rect, m)? {
            return Ok(Outcome::Point(p));
        }
        if t.rect.diam() < 64.0 * self.opts.tol {
            let z = t.rect.center();
            let (jet, _) = self.ev.f.eval(z, 0)?;
            return Ok(Outcome::Point(Eigenpoint {
                z,
                multiplicity: m,
                newton_residual: jet.coeff(0).norm(),
                method: Method::WindingOnly,
                certify_radius: 0.5 * t.rect.diam(),
                flags: Vec::new(),
            }));
        }
        self.split(&Task { winding: Some(w), ..*t })
    }

    fn winding_rect(&self, r: &Rect) -> Result<i64> {
        self.ev.winding(&Contour::Rect(*r))
    }

    fn split(&self, t: &Task) -> Result<Outcome> {
        let r = t.rect;
        let split_x = r.width() >= 0.5 * r.height();
        let split_y = r.height() >= 0.5 * r.width();
        for attempt in 0..=JITTERS {
            // off-center cuts keep symmetric spectra off the new edges
            let shift = JITTER_REL * attempt as f64 * if attempt % 2 == 0 { 1.0 } else { -1.0 };
            let xm = r.x0 + (0.4873 + shift) * r.width();
            let ym = r.y0 + (0.5127 - shift) * r.height();
            let xs: Vec<(f64, f64)> = if split_x { vec![(r.x0, xm), (xm, r.x1)] } else { vec![(r.x0, r.x1)] };
            let ys: Vec<(f64, f64)> = if split_y { vec![(r.y0, ym), (ym, r.y1)] } else { vec![(r.y0, r.y1)] };
            let rects: Vec<Rect> =
                ys.iter().flat_map(|&(y0, y1)| xs.iter().map(move |&(x0, x1)| Rect { x0, x1, y0, y1 })).collect();
            let windings: Vec<Result<Option<i64>>> = rects
                .par_iter()
                .map(|c| if self.in_zone(c).is_some() { Ok(None) } else { self.winding_rect(c).map(Some) })
                .collect();
            let mut ws = Vec::with_capacity(rects.len());
            let mut on_contour = false;
            for w in windings {
                match w {
                    Ok(v) => ws.push(v),
                    Err(Error::OnContourZero { .. }) => on_contour = true,
                    Err(e) => return Err(e),
                }
            }
            if on_contour {
                continue;
            }
            if let (Some(parent), true) = (t.winding, ws.iter().all(|w| w.is_some())) {
                let sum: i64 = ws.iter().map(|w| w.unwrap()).sum();
                if sum != parent {
                    return Err(Error::NonConvergent(format!(
                        "winding not additive: parent {parent}, children {sum}"
                    )));
                }
            }
            let kids = rects
                .into_iter()
                .zip(ws)
                .map(|(rect, winding)| Task { rect, winding, depth: t.depth + 1 })
                .collect();
            return Ok(Outcome::Split(kids, attempt));
        }
        Err(Error::ContourDeadlock)
    }

    /// Newton on F^{(m−1)} from the box center, then the certifying circle.
    fn newton(&self, r: &Rect, m: usize) -> Result<Option<Eigenpoint>> {
        let tol = self.opts.tol;
        let mut z = r.center();
        let mut converged = false;
        for _ in 0..50 {
            let (jet, _) = match self.ev.f.eval(z, m) {
                Ok(v) => v,
                Err(_) => return Ok(None),
            };
            let den = jet.derivative(m);
            if den == C::new(0.0, 0.0) || !den.is_finite() {
                return Ok(None);
            }
            let dz = jet.derivative(m - 1) / den;
            z -= dz;
            if !dz.is_finite() || r.expand(tol).dist_to(z) > 0.0 {
                return Ok(None);
            }
            if dz.norm() < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(None);
        }
        let (jet, ls) = self.ev.f.eval(z, 0)?;
        let residual = jet.coeff(0).norm();
        if residual > RESIDUAL_REL * ls.exp() {
            return Ok(None);
        }
        let limit = 0.5 * r.width().min(r.height()).max(8.0 * tol);
        Ok(certify(&self.ev, z, m, tol, limit)?.map(|radius| Eigenpoint {
            z,
            multiplicity: m,
            newton_residual: residual,
            method: Method::WindingNewton,
            certify_radius: radius,
            flags: Vec::new(),
        }))
    }
}

/// Smallest radius 8·tol·16^k ≤ `limit` whose circle has winding `m`, or
/// `None` if the first circle that can be evaluated disagrees.
fn certify(ev: &Evaluator, z: C, m: usize, tol: f64, limit: f64) -> Result<Option<f64>> {
    let mut radius = 8.0 * tol;
    while radius <= limit {
        match ev.winding(&Contour::Circle { center: z, radius }) {
            Ok(k) => return Ok((k == m as i64).then_some(radius)),
            Err(Error::OnContourZero { .. }) | Err(Error::NonConvergent(_)) => radius *= 16.0,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Merge points closer than `tol`, summing multiplicities.
fn merge(mut pts: Vec<Eigenpoint>, tol: f64) -> Vec<Eigenpoint> {
    sort_points(&mut pts);
    let mut out: Vec<Eigenpoint> = Vec::new();
    for p in pts {
        match out.iter_mut().find(|q| (q.z - p.z).norm() <= tol) {
            Some(q) => {
                let (mq, mp) = (q.multiplicity as f64, p.multiplicity as f64);
                q.z = (q.z * mq + p.z * mp) / (mq + mp);
                q.multiplicity += p.multiplicity;
                q.newton_residual = q.newton_residual.max(p.newton_residual);
                q.certify_radius = q.certify_radius.max(p.certify_radius);
                if p.method == Method::WindingOnly {
                    q.method = Method::WindingOnly;
                }
                if !q.flags.iter().any(|f| f == "MERGED") {
                    q.flags.push("MERGED".into());
                }
            }
            None => out.push(p),
        }
    }
    out
}

fn sort_points(pts: &mut [Eigenpoint]) {
    pts.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
}

/// Zeros of `f` in `region`, sorted by (Re, Im).
pub fn locate_zeros(f: &dyn AnalyticFn, region: Rect, tol: f64, max_depth: usize) -> Result<Vec<Eigenpoint>> {
    let opts = LocateOpts { max_depth, ..LocateOpts::new(tol) };
    Ok(locate_zeros_with(f, region, &opts)?.points)
}

pub fn locate_zeros_with(f: &dyn AnalyticFn, region: Rect, opts: &LocateOpts) -> Result<Located> {
    let search = Search { ev: Evaluator::new(f), opts };
    let mut stats = LocateStats::default();
    // The root contour can only be moved outward; points are filtered back
    // to the requested region at the end.
    let mut root = None;
    for attempt in 0..=JITTERS {
        let r = region.expand(JITTER_REL * attempt as f64 * region.diam());
        if search.in_zone(&r).is_some() {
            root = Some(Task { rect: r, winding: None, depth: 0 });
            break;
        }
        match search.winding_rect(&r) {
            Ok(w) => {
                root = Some(Task { rect: r, winding: Some(w), depth: 0 });
                break;
            }
            Err(Error::OnContourZero { .. }) => stats.jitters += 1,
            Err(e) => return Err(e),
        }
    }
    let root = root.ok_or(Error::ContourDeadlock)?;
    let mut frontier = vec![root];
    let mut points = Vec::new();
    while !frontier.is_empty() {
        stats.boxes += frontier.len();
        stats.depth = stats.depth.max(frontier[0].depth);
        let outs: Vec<Result<Outcome>> = frontier.par_iter().map(|t| search.process(t)).collect();
        let mut next = Vec::new();
        for o in outs {
            match o? {
                Outcome::Point(p) => points.push(p),
                Outcome::Split(kids, jit) => {
                    stats.jitters += jit;
                    next.extend(kids);
                }
                Outcome::Drop { zone } => stats.dropped_in_zones += zone as usize,
            }
        }
        frontier = next;
    }
    // distinct nodes: the call count depends on which thread wins a race
    stats.evaluations = search.ev.cache.lock().unwrap().len();
    let mut pts: Vec<Eigenpoint> = merge(points, opts.cluster_tol)
        .into_iter()
        .filter(|p| region.contains(p.z))
        .filter(|p| opts.exclusions.iter().all(|zn| (p.z - zn.center).norm() > zn.radius))
        .collect();
    sort_points(&mut pts);
    Ok(Located { points: pts, stats })
}

/// A point the method cannot classify.
#[derive(Clone, Debug, Serialize)]
pub struct UnknownPoint {
    #[serde(serialize_with = "cx::ser")]
    pub z: C,
    pub status: String,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumDiagnostics {
    pub mode: String,
    pub class: String,
    pub tol: f64,
    pub eval_tol: f64,
    pub cluster_tol: f64,
    pub boxes: usize,
    pub max_depth: usize,
    pub evaluations: usize,
    pub jitters: usize,
    pub dropped_in_zones: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub region: [f64; 4],
    pub eigenpoints: Vec<Eigenpoint>,
    pub excluded_zones: Vec<Zone>,
    pub unknown_points: Vec<UnknownPoint>,
    pub diagnostics: SpectrumDiagnostics,
}

#[derive(Clone, Debug)]
pub struct SpectrumOpts {
    /// Radius of the disk kept away from the origin for Compact and
    /// Combined classes; default 10·tol.
    pub origin_radius: Option<f64>,
    /// Radius of the disks around λ_n in generic mode.
    pub exclusion_radius: f64,
    pub max_depth: usize,
}

impl Default for SpectrumOpts {
    fn default() -> Self {
        SpectrumOpts { origin_radius: None, exclusion_radius: 1e-3, max_depth: 40 }
    }
}

/// Relative accuracy of the function values the search runs on.
pub fn eval_tol(tol: f64) -> f64 {
    (tol * 1e-2).clamp(1e-13, 1e-8)
}

fn search_mode(spec: &OperatorSpec) -> Mode {
    if spec.reg_class == RegClass::None {
        Mode::Generic
    } else {
        Mode::Regularized
    }
}

/// Eigenvalues of the operator in `region`.
pub fn spectrum(spec: &OperatorSpec, region: Rect, tol: f64, opts: &SpectrumOpts) -> Result<SpectrumReport> {
    let mode = search_mode(spec);
    let mut zones = Vec::new();
    let mut unknown = Vec::new();
    let origin = C::new(0.0, 0.0);
    let r0 = opts.origin_radius.unwrap_or(10.0 * tol);
    match spec.reg_class {
        RegClass::Compact { .. } => {
            zones.push(Zone { center: origin, radius: r0, reason: "origin (accumulation of Ran(λ))".into() });
            unknown.push(UnknownPoint {
                z: origin,
                status: "UNKNOWN".into(),
                note: "0 ∈ spec(J) since J is compact; whether it is an eigenvalue is not decided".into(),
            });
        }
        RegClass::Combined { .. } => {
            zones.push(Zone { center: origin, radius: r0, reason: "origin (accumulation of Ran(λ))".into() });
            unknown.push(UnknownPoint {
                z: origin,
                status: "UNKNOWN".into(),
                note: "spectral status of the origin is not decided".into(),
            });
        }
        RegClass::CompactResolvent { .. } => {}
        RegClass::None => {
            let reach = region.expand(opts.exclusion_radius);
            for n in -4096..=4096i64 {
                let l = spec.lambda(n);
                if reach.dist_to(l) == 0.0 && !zones.iter().any(|z: &Zone| z.center == l) {
                    zones.push(Zone { center: l, radius: opts.exclusion_radius, reason: format!("λ_{n}") });
                }
            }
            for d in spec.der_points() {
                zones.push(Zone { center: d, radius: opts.exclusion_radius, reason: "der(λ)".into() });
                unknown.push(UnknownPoint {
                    z: d,
                    status: "UNKNOWN".into(),
                    note: "accumulation point of Ran(λ); spectral status not decided".into(),
                });
            }
        }
    }
    zones.retain(|z| region.dist_to(z.center) <= z.radius);
    unknown.retain(|u| region.expand(r0).dist_to(u.z) == 0.0);
    let etol = eval_tol(tol);
    let f = CharFn { spec, mode, tol: etol };
    let lopts = LocateOpts { max_depth: opts.max_depth, exclusions: zones.clone(), ..LocateOpts::new(tol) };
    let located = locate_zeros_with(&f, region, &lopts)?;
    let s = located.stats;
    Ok(SpectrumReport {
        region: region.as_array(),
        eigenpoints: located.points,
        excluded_zones: zones,
        unknown_points: unknown,
        diagnostics: SpectrumDiagnostics {
            mode: if mode == Mode::Generic { "generic" } else { "regularized" }.into(),
            class: spec.reg_class.name().into(),
            tol,
            eval_tol: etol,
            cluster_tol: lopts.cluster_tol,
            boxes: s.boxes,
            max_depth: s.depth,
            evaluations: s.evaluations,
            jitters: s.jitters,
            dropped_in_zones: s.dropped_in_zones,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Multiplicity {
    pub nu_a: usize,
    /// |F^{(k)}(z0)| for k = 0..=nu_a+1
    pub derivative_profile: Vec<f64>,
    pub radius: f64,
}

/// Order of z0 as a zero of the characteristic function.
pub fn multiplicity(spec: &OperatorSpec, z0: C, tol: f64) -> Result<Multiplicity> {
    let f = CharFn { spec, mode: search_mode(spec), tol: eval_tol(tol) };
    multiplicity_of(&f, z0, tol)
}

/// As [`multiplicity`] for any analytic function.
pub fn multiplicity_of(f: &dyn AnalyticFn, z0: C, tol: f64) -> Result<Multiplicity> {
    let ev = Evaluator::new(f);
    let mut radius = 8.0 * tol;
    let mut last = Error::NonConvergent("no certifying circle".into());
    let mut found = None;
    for _ in 0..8 {
        match ev.winding(&Contour::Circle { center: z0, radius }) {
            Ok(k) => {
                found = Some(k);
                break;
            }
            Err(e @ (Error::OnContourZero { .. } | Error::NonConvergent(_))) => {
                last = e;
                radius *= 16.0;
            }
            Err(e) => return Err(e),
        }
    }
    let nu = match found {
        Some(k) if k >= 0 => k as usize,
        Some(k) => return Err(Error::NonConvergent(format!("negative winding {k}"))),
        None => return Err(last),
    };
    if nu + 1 > crate::jet::MAX_ORDER {
        return Err(Error::NonConvergent(format!("multiplicity {nu} above the supported jet order")));
    }
    let (jet, _) = f.eval(z0, nu + 1)?;
    let profile: Vec<f64> = (0..=nu + 1).map(|k| jet.derivative(k).norm()).collect();
    // On the certifying circle the order-ν term must dominate the lower ones.
    let terms: Vec<f64> = (0..=nu).map(|k| jet.coeff(k).norm() * radius.powi(k as i32)).collect();
    let lower: f64 = terms[..nu].iter().sum();
    if nu > 0 && lower >= 0.5 * terms[nu] {
        let implied = terms.iter().position(|t| *t >= lower.max(terms[nu]) * 0.5).unwrap_or(0);
        return Err(Error::Inconsistent { winding: nu, profile: implied });
    }
    Ok(Multiplicity { nu_a: nu, derivative_profile: profile, radius })
}

/// f, f′, ..., f^{(ν−1)} at an eigenvalue of order ν.
pub fn generalized_eigvecs(
    spec: &OperatorSpec,
    z0: C,
    nu: usize,
    n_range: (i64, i64),
    tol: f64,
) -> Result<Vec<SolutionSlice>> {
    if nu == 0 {
        return Err(Error::InvalidFamilyParams("multiplicity must be at least 1".into()));
    }
    if nu > crate::jet::MAX_ORDER + 1 {
        return Err(Error::NonConvergent(format!("chain length {nu} above the supported jet order")));
    }
    let mode = search_mode(spec);
    if mode == Mode::Regularized && z0 == C::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    if nu == 1 {
        return Ok(vec![eigvec_mode(spec, mode, z0, n_range, tol)?.0]);
    }
    let jets = eigvec_jet_mode(spec, mode, z0, nu - 1, n_range, tol)?;
    Ok((0..nu).map(|k| jets.derivative(k)).collect())
}

/// max_n |((𝒥 − z0)u^{(j)})_n − j·u^{(j−1)}_n| / (‖u^{(j)}‖ + ‖u^{(j−1)}‖) per
/// link j of a chain, over interior indices.
pub fn chain_residuals(spec: &OperatorSpec, z0: C, chain: &[SolutionSlice]) -> Vec<f64> {
    (1..chain.len())
        .map(|j| {
            let (u, v) = (&chain[j], &chain[j - 1]);
            let (a, b) = u.n_range;
            let scale = l2(&u.values) + l2(&v.values);
            ((a + 1)..b)
                .map(|n| {
                    let row = spec.w(n - 1) * u.at(n - 1) + (spec.lambda(n) - z0) * u.at(n) + spec.w(n) * u.at(n + 1);
                    (row - v.at(n) * j as f64).norm()
                })
                .fold(0.0, f64::max)
                / scale.max(f64::MIN_POSITIVE)
        })
        .collect()
}

fn l2(v: &[C]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// det of the Gram matrix of the slices, divided by the product of their
/// squared norms; near 0 means linearly dependent.
pub fn normalized_gram_det(slices: &[SolutionSlice]) -> f64 {
    let k = slices.len();
    let mut g = vec![vec![C::new(0.0, 0.0); k]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = slices[i].values.iter().zip(&slices[j].values).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let norms: f64 = (0..k).map(|i| g[i][i].re).product();
    det(g).norm() / norms.max(f64::MIN_POSITIVE)
}

fn det(mut m: Vec<Vec<C>>) -> C {
    let n = m.len();
    let mut d = C::new(1.0, 0.0);
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm())).unwrap();
        if m[piv][c] == C::new(0.0, 0.0) {
            return C::new(0.0, 0.0);
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let v = m[c][k];
                m[r][k] -= f * v;
            }
        }
    }
    d
}

/// Zeros of the finite-section determinant det(J_{[−N,N]} − z) in `region`,
/// flagged DIAGNOSTIC.
pub fn finite_section_zeros(spec: &OperatorSpec, n: usize, region: Rect, tol: f64) -> Result<Vec<Eigenpoint>> {
    let f = FiniteSection { spec, n };
    let mut pts = locate_zeros(&f, region, tol, 40)?;
    for p in &mut pts {
        p.flags.push("DIAGNOSTIC".into());
    }
    Ok(pts)
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteSectionLevel {
    pub n: usize,
    pub zeros: Vec<Eigenpoint>,
    /// Distance from each zero to the nearest zero of the previous level.
    pub drift: Vec<Option<f64>>,
}

/// Finite-section zeros for a sequence of N with drift between levels.
pub fn finite_section_report(
    spec: &OperatorSpec,
    ns: &[usize],
    region: Rect,
    tol: f64,
) -> Result<Vec<FiniteSectionLevel>> {
    let mut out: Vec<FiniteSectionLevel> = Vec::new();
    for &n in ns {
        let zeros = finite_section_zeros(spec, n, region, tol)?;
        let drift = zeros
            .iter()
            .map(|p| {
                out.last().and_then(|prev| prev.zeros.iter().map(|q| (q.z - p.z).norm()).min_by(f64::total_cmp))
            })
            .collect();
        out.push(FiniteSectionLevel { n, zeros, drift });
    }
    Ok(out)
}

/// ‖(𝒥 − z)u‖ over interior indices divided by ‖u‖ over the slice.
pub fn residual_norm(spec: &OperatorSpec, z: C, u: &SolutionSlice) -> Result<f64> {
    let (a, b) = u.n_range;
    if b - a < 4 {
        return Err(Error::WindowTooSmall((b - a + 1).max(0) as usize));
    }
    let nu = l2(&u.values);
    if nu == 0.0 {
        return Err(Error::ZeroVector);
    }
    let r: f64 = ((a + 1)..b)
        .map(|n| (spec.w(n - 1) * u.at(n - 1) + (spec.lambda(n) - z) * u.at(n) + spec.w(n) * u.at(n + 1)).norm_sqr())
        .sum();
    Ok(r.sqrt() / nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{bessel_compact, linear_free, q_geometric};
    use std::time::Instant;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn square(j: Jet) -> Jet {
        let s = j - Jet::constant(j.base, j.order(), c(1.0, 0.0));
        s * s
    }

    #[test]
    fn winding_examples() {
        let lf = linear_free(1.0).unwrap();
        let f = CharFn { spec: &lf, mode: Mode::Regularized, tol: 1e-12 };
        assert_eq!(winding_count(&f, &Contour::Circle { center: c(2.0, 0.0), radius: 0.4 }).unwrap(), 1);
        assert_eq!(winding_count(&f, &Contour::Circle { center: c(2.5, 0.0), radius: 0.3 }).unwrap(), 0);
        let sq = JetFn(square);
        assert_eq!(winding_count(&sq, &Contour::Circle { center: c(1.0, 0.0), radius: 0.5 }).unwrap(), 2);
        let r = Rect::new(0.0, 2.0, -1.0, 1.0).unwrap();
        assert_eq!(winding_count(&sq, &Contour::Rect(r)).unwrap(), 2);
    }

    #[test]
    fn zero_on_contour_detected() {
        let sq = JetFn(square);
        let r = Rect::new(1.0, 2.0, -1.0, 1.0).unwrap();
        assert!(matches!(winding_count(&sq, &Contour::Rect(r)), Err(Error::OnContourZero { .. })));
    }

    #[test]
    fn locate_polynomial_zeros() {
        // (z − 1)²(z + 0.5i)(z − 0.3)
        let f = JetFn(|j: Jet| {
            let one = Jet::constant(j.base, j.order(), c(1.0, 0.0));
            square(j) * (j + one.scale(c(0.0, 0.5))) * (j - one.scale(c(0.3, 0.0)))
        });
        let pts = locate_zeros(&f, Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap(), 1e-10, 40).unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[0].z - c(0.0, -0.5)).norm() < 1e-9);
        assert!((pts[1].z - c(0.3, 0.0)).norm() < 1e-9);
        assert!((pts[2].z - c(1.0, 0.0)).norm() < 1e-9);
        assert_eq!(pts[2].multiplicity, 2);
        assert_eq!(pts[0].multiplicity, 1);
    }

    #[test]
    fn linear_free_spectrum() {
        let t = Instant::now();
        let lf = linear_free(1.0).unwrap();
        let rep =
            spectrum(&lf, Rect::new(-3.5, 3.5, -1.0, 1.0).unwrap(), 1e-10, &SpectrumOpts::default()).unwrap();
        eprintln!("{:?} {:?}", t.elapsed(), rep.diagnostics);
        let zs: Vec<C> = rep.eigenpoints.iter().map(|p| p.z).collect();
        assert_eq!(zs.len(), 7, "{zs:?}");
        for (k, p) in (-3..=3).zip(&rep.eigenpoints) {
            assert!((p.z - c(k as f64, 0.0)).norm() < 1e-8);
            assert_eq!(p.multiplicity, 1);
        }
    }

    #[test]
    fn bessel_and_q_spectra() {
        let t = Instant::now();
        let b = bessel_compact(0.3, 0.7).unwrap();
        let rep = spectrum(&b, Rect::new(0.2, 1.0, -0.2, 0.2).unwrap(), 1e-10, &SpectrumOpts::default()).unwrap();
        eprintln!("{:?} {:?}", t.elapsed(), rep.diagnostics);
        let zs: Vec<C> = rep.eigenpoints.iter().map(|p| p.z).collect();
        // 1/(α + n) for n = 4, 3, 2, 1
        let want = [1.0 / 4.3, 1.0 / 3.3, 1.0 / 2.3, 1.0 / 1.3];
        assert_eq!(zs.len(), 4, "{zs:?}");
        for (z, w) in zs.iter().zip(want) {
            assert!((z - w).norm() < 1e-8, "{z} vs {w}");
        }
        let t = Instant::now();
        let q = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let rep = spectrum(&q, Rect::new(0.1, 1.1, -0.1, 0.1).unwrap(), 1e-10, &SpectrumOpts::default()).unwrap();
        eprintln!("{:?} {:?}", t.elapsed(), rep.diagnostics);
        let zs: Vec<C> = rep.eigenpoints.iter().map(|p| p.z).collect();
        let want = [0.125, 0.25, 0.5, 1.0];
        assert_eq!(zs.len(), 4, "{zs:?}");
        for (z, w) in zs.iter().zip(want) {
            assert!((z - w).norm() < 1e-8, "{z} vs {w}");
        }
    }

    fn collision() -> OperatorSpec {
        // −β² = q: the ladders q^ℤ and −β²q^ℕ₀ meet at q, q², ...
        q_geometric(0.5, c(0.0, 0.5f64.sqrt())).unwrap()
    }

    #[test]
    fn multiplicities() {
        let lf = linear_free(1.0).unwrap();
        let m = multiplicity(&lf, c(1.0, 0.0), 1e-10).unwrap();
        assert_eq!(m.nu_a, 1);
        assert!((m.derivative_profile[1] - 1.0).abs() < 1e-8);
        let sq = JetFn(square);
        assert_eq!(multiplicity_of(&sq, c(1.0, 0.0), 1e-10).unwrap().nu_a, 2);
        let q = collision();
        let m = multiplicity(&q, c(0.5, 0.0), 1e-10).unwrap();
        assert_eq!(m.nu_a, 2, "{m:?}");
        let m = multiplicity(&q, c(2.0, 0.0), 1e-10).unwrap();
        assert_eq!(m.nu_a, 1, "{m:?}");
    }

    #[test]
    fn collision_spectrum_has_double_points() {
        let q = collision();
        let rep = spectrum(&q, Rect::new(0.1, 1.1, -0.1, 0.1).unwrap(), 1e-10, &SpectrumOpts::default()).unwrap();
        let got: Vec<(f64, usize)> = rep.eigenpoints.iter().map(|p| (p.z.re, p.multiplicity)).collect();
        assert_eq!(got.len(), 4, "{got:?}");
        for ((z, m), (wz, wm)) in got.iter().zip([(0.125, 2), (0.25, 2), (0.5, 2), (1.0, 1)]) {
            assert!((z - wz).abs() < 1e-8, "{got:?}");
            assert_eq!(*m, wm);
        }
    }

    #[test]
    fn jordan_chain_at_double_point() {
        let q = collision();
        let z0 = c(0.5, 0.0);
        let chain = generalized_eigvecs(&q, z0, 2, (-6, 12), 1e-12).unwrap();
        assert_eq!(chain.len(), 2);
        let res = chain_residuals(&q, z0, &chain);
        assert!(res[0] < 1e-7, "{res:?}");
        assert!(residual_norm(&q, z0, &chain[0]).unwrap() < 1e-7);
        assert!(normalized_gram_det(&chain) > 1e-6);
    }

    #[test]
    fn single_chain_is_eigenvector() {
        let lf = linear_free(1.0).unwrap();
        let z0 = c(2.0, 0.0);
        let chain = generalized_eigvecs(&lf, z0, 1, (-5, 10), 1e-12).unwrap();
        let ev = crate::regularization::eigvec_reg(&lf, z0, (-5, 10), 1e-12).unwrap();
        assert_eq!(chain[0].values, ev.values);
        assert!(residual_norm(&lf, z0, &chain[0]).unwrap() < 1e-7);
    }

    #[test]
    fn residual_norm_guards() {
        let lf = linear_free(1.0).unwrap();
        let mk = |vals: Vec<C>| SolutionSlice {
            n_range: (0, vals.len() as i64 - 1),
            values: vals,
            kind: crate::charfn::SolutionKind::FSolution,
            z: c(0.0, 0.0),
            tail_err: 0.0,
            window_n: 0,
        };
        assert!(matches!(residual_norm(&lf, c(0.0, 0.0), &mk(vec![c(1.0, 0.0); 4])), Err(Error::WindowTooSmall(4))));
        assert!(matches!(residual_norm(&lf, c(0.0, 0.0), &mk(vec![c(0.0, 0.0); 8])), Err(Error::ZeroVector)));
        let r = residual_norm(&lf, c(0.3, 0.0), &mk((0..9).map(|k| c((k as f64 * 1.7).sin(), 0.0)).collect())).unwrap();
        assert!(r > 0.1 && r < 10.0);
    }

    #[test]
    fn finite_sections_approach_integers() {
        let lf = linear_free(1.0).unwrap();
        let r = Rect::new(-0.5, 0.5, -0.5, 0.5).unwrap();
        let levels = finite_section_report(&lf, &[8, 12, 16], r, 1e-10).unwrap();
        let dist: Vec<f64> =
            levels.iter().map(|l| l.zeros.iter().map(|p| p.z.norm()).fold(f64::INFINITY, f64::min)).collect();
        assert!(dist[1] < 1e-3, "{dist:?}");
        assert!(dist[2] <= dist[1] && dist[1] <= dist[0], "{dist:?}");
        assert!(levels[1].zeros.iter().all(|p| p.flags.iter().any(|f| f == "DIAGNOSTIC")));
        assert!(levels[1].drift.iter().all(|d| d.is_some()));
    }

    #[test]
    fn empty_region() {
        let lf = linear_free(1.0).unwrap();
        let rep = spectrum(&lf, Rect::new(0.2, 0.8, 0.1, 0.5).unwrap(), 1e-10, &SpectrumOpts::default()).unwrap();
        assert!(rep.eigenpoints.is_empty());
    }
}
