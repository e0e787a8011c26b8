//! Polyline loops in the branch-point-punctured `x`-plane and sign-coherent
//! analytic continuation of `y = √p(x)` along them.
//!
//! A loop is a closed polyline with a distinguished basepoint (its first
//! vertex) and a starting sheet: the sign relating `y` at the basepoint to
//! the principal branch of `√p(base)`. Construction rejects loops that touch
//! a branch point or whose lift to the curve is not closed (odd total
//! winding parity around the branch points).
//!
//! Winding numbers are computed by summing argument increments with adaptive
//! segment subdivision and must round to integers with defect below 1e−6;
//! they double as the certificate that `pair_loop` built what it claims.

use crate::curve::HyperellipticCurve;
use crate::rng::SplitMix64;
use num_complex::Complex64;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PathError {
    #[error("loop passes through or touches a branch point")]
    TouchesBranchPoint,
    #[error("loop does not lift to a closed loop on the curve (odd winding parity)")]
    OpenLift,
    #[error("winding number failed to resolve to an integer (defect {0:.3e})")]
    WindingUnresolved(f64),
    #[error("no corridor with the required clearance exists")]
    PathBlocked,
    #[error("branch indices must be distinct and in range")]
    InvalidBranchPair,
    #[error("basepoint too close to a branch point")]
    BaseTooClose,
    #[error("loops have different basepoints or starting sheets")]
    BasepointMismatch,
    #[error("continuation step underflow: required step below 1e-12")]
    StepUnderflow,
    #[error("sheet did not return to its starting value along the loop")]
    SheetMismatch,
    #[error("start sheet must be +1 or -1")]
    BadSheet,
    #[error("a loop needs at least one vertex")]
    Empty,
}

/// A closed polyline loop with sheet bookkeeping.
#[derive(Debug, Clone)]
pub struct LoopPath {
    vertices: Vec<Complex64>,
    start_sheet: i8,
    clearance: f64,
    winding: Vec<i64>,
}

impl LoopPath {
    /// Validates and builds a loop from an explicit vertex list.
    pub fn from_vertices(
        curve: &HyperellipticCurve,
        vertices: Vec<Complex64>,
        start_sheet: i8,
    ) -> Result<Self, PathError> {
        if start_sheet != 1 && start_sheet != -1 {
            return Err(PathError::BadSheet);
        }
        let vertices = dedupe(vertices);
        if vertices.is_empty() {
            return Err(PathError::Empty);
        }

        let clearance = polyline_clearance(&vertices, curve.branch_points());
        if !(clearance > 0.0) {
            return Err(PathError::TouchesBranchPoint);
        }

        let winding = winding_numbers(&vertices, curve.branch_points())?;
        let parity: i64 = winding.iter().sum();
        if parity.rem_euclid(2) != 0 {
            return Err(PathError::OpenLift);
        }

        Ok(Self {
            vertices,
            start_sheet,
            clearance,
            winding,
        })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn base_point(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn start_sheet(&self) -> i8 {
        self.start_sheet
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn winding(&self) -> &[i64] {
        &self.winding
    }

    /// Closed segment list, including the edge back to the basepoint.
    pub fn segments(&self) -> Vec<(Complex64, Complex64)> {
        let n = self.vertices.len();
        (0..n)
            .map(|k| (self.vertices[k], self.vertices[(k + 1) % n]))
            .filter(|(a, b)| a != b)
            .collect()
    }

    /// Total polyline length.
    pub fn length(&self) -> f64 {
        self.segments().iter().map(|(a, b)| (b - a).norm()).sum()
    }

    /// FNV-1a hash of the canonical vertex/sheet encoding, for reports.
    pub fn hash_hex(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(&[self.start_sheet as u8]);
        for v in &self.vertices {
            eat(&v.re.to_le_bytes());
            eat(&v.im.to_le_bytes());
        }
        format!("{h:016x}")
    }

    /// Vertex list with deterministic jitter below `frac · clearance`,
    /// optionally pinning the basepoint. Used by the homotopy-stability
    /// checks.
    pub fn jittered_vertices(
        &self,
        rng: &mut SplitMix64,
        frac: f64,
        fix_base: bool,
    ) -> Vec<Complex64> {
        let r = frac * self.clearance;
        self.vertices
            .iter()
            .enumerate()
            .map(|(k, v)| {
                if k == 0 && fix_base {
                    *v
                } else {
                    v + rng.unit_disc() * r
                }
            })
            .collect()
    }
}

fn dedupe(vertices: Vec<Complex64>) -> Vec<Complex64> {
    let scale = vertices.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let tol = 1e-14 * scale;
    let mut out: Vec<Complex64> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if out.last().is_none_or(|last| (last - v).norm() > tol) {
            out.push(v);
        }
    }
    while out.len() > 1 && (out[0] - *out.last().unwrap()).norm() <= tol {
        out.pop();
    }
    out
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn polyline_clearance(vertices: &[Complex64], obstacles: &[Complex64]) -> f64 {
    let n = vertices.len();
    let mut min = f64::INFINITY;
    for k in 0..n {
        let a = vertices[k];
        let b = vertices[(k + 1) % n];
        for ob in obstacles {
            min = min.min(point_segment_distance(*ob, a, b));
        }
    }
    min
}

/// Winding numbers of the closed polyline around each obstacle, by argument
/// summation with adaptive subdivision: a chord is only evaluated directly
/// once it subtends an unambiguous angle from the obstacle.
pub fn winding_numbers(
    vertices: &[Complex64],
    obstacles: &[Complex64],
) -> Result<Vec<i64>, PathError> {
    let n = vertices.len();
    let mut out = Vec::with_capacity(obstacles.len());
    for ob in obstacles {
        let mut total = 0.0f64;
        for k in 0..n {
            let a = vertices[k];
            let b = vertices[(k + 1) % n];
            total += subtended_angle(a, b, *ob, 52)?;
        }
        let turns = total / std::f64::consts::TAU;
        let rounded = turns.round();
        if (turns - rounded).abs() >= 1e-6 {
            return Err(PathError::WindingUnresolved((turns - rounded).abs()));
        }
        out.push(rounded as i64);
    }
    Ok(out)
}

fn subtended_angle(
    a: Complex64,
    b: Complex64,
    ob: Complex64,
    depth: u32,
) -> Result<f64, PathError> {
    let da = (a - ob).norm();
    let db = (b - ob).norm();
    if da == 0.0 || db == 0.0 {
        return Err(PathError::TouchesBranchPoint);
    }
    if (b - a).norm() <= 0.5 * da.min(db) {
        return Ok(((b - ob) / (a - ob)).arg());
    }
    if depth == 0 {
        return Err(PathError::TouchesBranchPoint);
    }
    let m = (a + b) * 0.5;
    Ok(subtended_angle(a, m, ob, depth - 1)? + subtended_angle(m, b, ob, depth - 1)?)
}

/// Builds the default loop around the branch points `i` and `j`: a corridor
/// from the basepoint to a 12-gon around `b_i`, the full 12-gon, back, and
/// the same for `b_j`. Corridors are traversed out and back identically, so
/// their net winding contribution cancels exactly.
pub fn pair_loop(
    curve: &HyperellipticCurve,
    i: usize,
    j: usize,
    base: Complex64,
    start_sheet: i8,
) -> Result<LoopPath, PathError> {
    let branch = curve.branch_points();
    if i == j || i >= branch.len() || j >= branch.len() {
        return Err(PathError::InvalidBranchPair);
    }
    let gap = curve.min_branch_gap();
    if curve.nearest_branch_dist(base) < 0.25 * gap {
        return Err(PathError::BaseTooClose);
    }

    let ring_radius = 0.2 * gap;
    let margin = 0.16 * gap;

    let mut vertices = vec![base];
    for &target_idx in &[i, j] {
        let target = branch[target_idx];
        let phi0 = (base - target).arg();
        let entry = target + Complex64::from_polar(ring_radius, phi0);
        let corridor =
            plan_corridor(base, entry, branch, margin, 24).ok_or(PathError::PathBlocked)?;

        vertices.extend(corridor.iter().copied());
        vertices.push(entry);
        for k in 1..12 {
            let phi = phi0 + std::f64::consts::TAU * k as f64 / 12.0;
            vertices.push(target + Complex64::from_polar(ring_radius, phi));
        }
        vertices.push(entry);
        vertices.extend(corridor.iter().rev().copied());
        vertices.push(base);
    }

    let loop_path = LoopPath::from_vertices(curve, vertices, start_sheet)?;

    // certificates: the loop winds once around each target and misses the rest
    for (k, w) in loop_path.winding().iter().enumerate() {
        let expect = if k == i || k == j { 1 } else { 0 };
        if *w != expect {
            return Err(PathError::PathBlocked);
        }
    }
    if loop_path.clearance() < 0.1 * gap {
        return Err(PathError::PathBlocked);
    }
    Ok(loop_path)
}

/// Straight corridor from `from` to `to`, detouring around any obstacle disc
/// of radius `margin`. Returns intermediate waypoints only.
fn plan_corridor(
    from: Complex64,
    to: Complex64,
    obstacles: &[Complex64],
    margin: f64,
    depth: u32,
) -> Option<Vec<Complex64>> {
    if depth == 0 {
        return None;
    }
    let mut worst: Option<(Complex64, f64)> = None;
    for ob in obstacles {
        let d = point_segment_distance(*ob, from, to);
        if d < margin && worst.is_none_or(|(_, wd)| d < wd) {
            worst = Some((*ob, d));
        }
    }
    let Some((ob, _)) = worst else {
        return Some(Vec::new());
    };

    // push the corridor sideways past the obstacle
    let dir = to - from;
    let len2 = dir.norm_sqr();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((ob - from).re * dir.re + (ob - from).im * dir.im) / len2).clamp(0.0, 1.0)
    };
    let foot = from + dir * t;
    let away = foot - ob;
    let away = if away.norm() < 1e-12 * margin.max(1.0) {
        Complex64::new(-dir.im, dir.re) / dir.norm()
    } else {
        away / away.norm()
    };
    let waypoint = ob + away * (1.3 * margin);

    let first = plan_corridor(from, waypoint, obstacles, margin, depth - 1)?;
    let second = plan_corridor(waypoint, to, obstacles, margin, depth - 1)?;
    let mut out = first;
    out.push(waypoint);
    out.extend(second);
    Some(out)
}

/// Composes loops sharing a basepoint and starting sheet; `loops[0]` is
/// traversed first.
pub fn compose(curve: &HyperellipticCurve, loops: &[LoopPath]) -> Result<LoopPath, PathError> {
    let first = loops.first().ok_or(PathError::Empty)?;
    let base = first.base_point();
    let scale = base.norm().max(1.0);
    let mut vertices = Vec::new();
    for l in loops {
        if (l.base_point() - base).norm() > 1e-12 * scale || l.start_sheet != first.start_sheet {
            return Err(PathError::BasepointMismatch);
        }
        vertices.extend_from_slice(&l.vertices);
    }
    LoopPath::from_vertices(curve, vertices, first.start_sheet)
}

/// The reversed loop, same basepoint and sheet.
pub fn invert(curve: &HyperellipticCurve, l: &LoopPath) -> Result<LoopPath, PathError> {
    let mut vertices = Vec::with_capacity(l.vertices.len());
    vertices.push(l.vertices[0]);
    vertices.extend(l.vertices.iter().skip(1).rev().copied());
    LoopPath::from_vertices(curve, vertices, l.start_sheet)
}

/// One point of a continuation trace: local segment parameter, position, and
/// the sign-coherent value of `y`.
#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub s: f64,
    pub x: Complex64,
    pub y: Complex64,
}

/// Sign-coherent samples of `y = √p(x)` along a loop, grouped by segment.
///
/// Sample spacing keeps each step below `min(0.4, 1/deg p)` times the
/// distance to the nearest branch point, which bounds the argument drift of
/// `y` between samples by about half a radian — far from a branch flip.
#[derive(Debug, Clone)]
pub struct ContinuationTrace {
    segments: Vec<(Complex64, Complex64)>,
    samples: Vec<Vec<TracePoint>>,
    step_bound: f64,
}

impl ContinuationTrace {
    pub fn segments(&self) -> &[(Complex64, Complex64)] {
        &self.segments
    }

    pub fn segment_samples(&self, k: usize) -> &[TracePoint] {
        &self.samples[k]
    }

    pub fn step_bound(&self) -> f64 {
        self.step_bound
    }

    /// Flattened `(x, y)` sample list.
    pub fn samples(&self) -> Vec<(Complex64, Complex64)> {
        self.samples.iter().flatten().map(|p| (p.x, p.y)).collect()
    }

    pub fn first_y(&self) -> Complex64 {
        self.samples[0][0].y
    }

    /// Sign-coherent `y` at parameter `s` of segment `k`.
    pub fn y_at(&self, curve: &HyperellipticCurve, k: usize, s: f64) -> Complex64 {
        let pts = &self.samples[k];
        let idx = match pts.binary_search_by(|p| p.s.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let reference = pts[idx];
        let (a, b) = self.segments[k];
        let x = a + (b - a) * s;
        coherent_sqrt(curve.eval_p(x), reference.y)
    }
}

/// The square root of `p_val` on the branch continuing `y_ref`.
pub fn coherent_sqrt(p_val: Complex64, y_ref: Complex64) -> Complex64 {
    let w = p_val.sqrt();
    if (w * y_ref.conj()).re >= 0.0 {
        w
    } else {
        -w
    }
}

/// Continues `y = √p(x)` along an open polyline chain; no closure check.
/// Used for basepoint-transfer paths.
pub fn continue_y_chain(
    curve: &HyperellipticCurve,
    vertices: &[Complex64],
    start_sheet: i8,
    max_step: f64,
) -> Result<ContinuationTrace, PathError> {
    if start_sheet != 1 && start_sheet != -1 {
        return Err(PathError::BadSheet);
    }
    let vertices = dedupe(vertices.to_vec());
    if vertices.is_empty() {
        return Err(PathError::Empty);
    }
    let segments: Vec<(Complex64, Complex64)> = vertices.windows(2).map(|w| (w[0], w[1])).collect();
    for &(a, b) in &segments {
        for ob in curve.branch_points() {
            if !(point_segment_distance(*ob, a, b) > 0.0) {
                return Err(PathError::TouchesBranchPoint);
            }
        }
    }
    let y0 = curve.principal_y(vertices[0]) * start_sheet as f64;
    trace_segments(curve, segments, y0, max_step, vertices[0], None)
}

/// Continues `y = √p(x)` along the loop, subdividing so that every step is
/// strictly below half the distance to the nearest branch point (and below
/// `max_step`). The lift must close up; `LoopPath` construction guarantees
/// the parity, and the trace verifies it numerically.
pub fn continue_y(
    curve: &HyperellipticCurve,
    l: &LoopPath,
    max_step: f64,
) -> Result<ContinuationTrace, PathError> {
    let segments = l.segments();
    let y0 = curve.principal_y(l.base_point()) * l.start_sheet() as f64;
    trace_segments(curve, segments, y0, max_step, l.base_point(), Some(y0))
}

fn trace_segments(
    curve: &HyperellipticCurve,
    segments: Vec<(Complex64, Complex64)>,
    y0: Complex64,
    max_step: f64,
    base: Complex64,
    expect_closure: Option<Complex64>,
) -> Result<ContinuationTrace, PathError> {
    let factor = (0.4f64).min(1.0 / curve.degree() as f64);
    let mut samples = Vec::with_capacity(segments.len());
    let mut y = y0;
    let mut step_bound = 0.0f64;

    for &(a, b) in &segments {
        let delta = b - a;
        let len = delta.norm();
        let mut seg_samples = vec![TracePoint { s: 0.0, x: a, y }];
        let mut s = 0.0f64;
        while s < 1.0 {
            let x = a + delta * s;
            let step = (factor * curve.nearest_branch_dist(x)).min(max_step);
            if step < 1e-12 {
                return Err(PathError::StepUnderflow);
            }
            let ds = step / len;
            s = (s + ds).min(1.0);
            let xn = if s >= 1.0 { b } else { a + delta * s };
            let yn = coherent_sqrt(curve.eval_p(xn), y);
            step_bound = step_bound.max((xn - seg_samples.last().unwrap().x).norm());
            seg_samples.push(TracePoint { s, x: xn, y: yn });
            y = yn;
        }
        samples.push(seg_samples);
    }

    if segments.is_empty() {
        samples.push(vec![TracePoint { s: 0.0, x: base, y }]);
    } else if let Some(y_expect) = expect_closure {
        if (y - y_expect).norm() > 1e-10 * y_expect.norm() {
            return Err(PathError::SheetMismatch);
        }
    }

    Ok(ContinuationTrace {
        segments,
        samples,
        step_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::make_hyperelliptic;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sextic() -> HyperellipticCurve {
        let mut p = vec![Complex64::ZERO; 7];
        p[0] = c(-1.0, 0.0);
        p[6] = c(1.0, 0.0);
        make_hyperelliptic(&p).unwrap()
    }

    fn ngon(center: Complex64, radius: f64, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64)
            })
            .collect()
    }

    #[test]
    fn pair_loop_winds_exactly_around_its_pair() {
        let curve = sextic();
        let base = curve.default_base();
        for (i, j) in [(0usize, 1usize), (2, 5), (4, 3)] {
            let l = pair_loop(&curve, i, j, base, 1).unwrap();
            for (k, w) in l.winding().iter().enumerate() {
                assert_eq!(*w, if k == i || k == j { 1 } else { 0 }, "pair ({i},{j})");
            }
            assert!(l.clearance() >= 0.1 * curve.min_branch_gap());
        }
    }

    #[test]
    fn pair_loop_rejects_bad_inputs() {
        let curve = sextic();
        let base = curve.default_base();
        assert!(matches!(
            pair_loop(&curve, 2, 2, base, 1),
            Err(PathError::InvalidBranchPair)
        ));
        let near_branch = curve.branch_points()[0] + c(0.01, 0.0);
        assert!(matches!(
            pair_loop(&curve, 0, 1, near_branch, 1),
            Err(PathError::BaseTooClose)
        ));
    }

    #[test]
    fn single_branch_circle_is_rejected_as_open_lift() {
        let curve = sextic();
        let b0 = curve.branch_points()[0];
        let circle = ngon(b0, 0.3 * curve.min_branch_gap(), 16);
        match LoopPath::from_vertices(&curve, circle, 1) {
            Err(PathError::OpenLift) => {}
            other => panic!("expected OpenLift, got {other:?}"),
        }
    }

    #[test]
    fn big_circle_encloses_all_and_lifts_closed() {
        let curve = sextic();
        let circle = ngon(c(0.0, 0.0), 3.0, 64);
        let l = LoopPath::from_vertices(&curve, circle, 1).unwrap();
        assert!(l.winding().iter().all(|w| *w == 1));
        let trace = continue_y(&curve, &l, f64::INFINITY).unwrap();
        let first = trace.first_y();
        let last = trace.samples().last().unwrap().1;
        assert!((first - last).norm() <= 1e-10 * first.norm());
    }

    #[test]
    fn continuation_never_flips_between_samples() {
        let curve = sextic();
        let l = pair_loop(&curve, 0, 3, curve.default_base(), -1).unwrap();
        let trace = continue_y(&curve, &l, f64::INFINITY).unwrap();
        let samples = trace.samples();
        for win in samples.windows(2) {
            let (_, y0) = win[0];
            let (x1, y1) = win[1];
            let cont = coherent_sqrt(curve.eval_p(x1), y0);
            assert!((y1 - cont).norm() < y1.norm());
        }
        // y² = p(x) pointwise
        for (x, y) in &samples {
            assert!((y * y - curve.eval_p(*x)).norm() <= 1e-9 * curve.eval_p(*x).norm().max(1.0));
        }
    }

    #[test]
    fn sheet_choice_flips_the_trace() {
        let curve = sextic();
        let plus = pair_loop(&curve, 0, 1, curve.default_base(), 1).unwrap();
        let minus = pair_loop(&curve, 0, 1, curve.default_base(), -1).unwrap();
        let tp = continue_y(&curve, &plus, f64::INFINITY).unwrap();
        let tm = continue_y(&curve, &minus, f64::INFINITY).unwrap();
        assert!((tp.first_y() + tm.first_y()).norm() < 1e-14);
    }

    #[test]
    fn continuation_is_homotopy_stable_under_jitter() {
        let curve = sextic();
        let l = pair_loop(&curve, 1, 2, curve.default_base(), 1).unwrap();
        let mut rng = SplitMix64::new(42);
        for _ in 0..5 {
            let jittered = l.jittered_vertices(&mut rng, 0.19, false);
            let lj = LoopPath::from_vertices(&curve, jittered, 1).unwrap();
            assert_eq!(lj.winding(), l.winding());
            // closed lift survives: continuation succeeds
            continue_y(&curve, &lj, f64::INFINITY).unwrap();
        }
    }

    #[test]
    fn compose_and_invert_bookkeeping() {
        let curve = sextic();
        let base = curve.default_base();
        let g1 = pair_loop(&curve, 0, 1, base, 1).unwrap();
        let g2 = pair_loop(&curve, 1, 2, base, 1).unwrap();

        let comp = compose(&curve, &[g1.clone(), g2.clone()]).unwrap();
        for k in 0..curve.branch_points().len() {
            assert_eq!(comp.winding()[k], g1.winding()[k] + g2.winding()[k]);
        }
        assert!(comp.clearance() <= g1.clearance().min(g2.clearance()) + 1e-12);

        let inv = invert(&curve, &g1).unwrap();
        assert_eq!(inv.winding(), &[-1, -1, 0, 0, 0, 0][..]);
        let double = invert(&curve, &inv).unwrap();
        assert_eq!(double.vertices(), g1.vertices());

        let other_base = pair_loop(&curve, 0, 1, base + c(0.5, 0.0), 1).unwrap();
        assert!(matches!(
            compose(&curve, &[g1.clone(), other_base]),
            Err(PathError::BasepointMismatch)
        ));
    }

    #[test]
    fn compose_associativity_up_to_base_repetition() {
        let curve = sextic();
        let base = curve.default_base();
        let a = pair_loop(&curve, 0, 1, base, 1).unwrap();
        let b = pair_loop(&curve, 1, 2, base, 1).unwrap();
        let cc = pair_loop(&curve, 2, 3, base, 1).unwrap();
        let left = compose(
            &curve,
            &[compose(&curve, &[a.clone(), b.clone()]).unwrap(), cc.clone()],
        )
        .unwrap();
        let right = compose(
            &curve,
            &[a.clone(), compose(&curve, &[b.clone(), cc.clone()]).unwrap()],
        )
        .unwrap();
        assert_eq!(left.vertices(), right.vertices());
    }
}
