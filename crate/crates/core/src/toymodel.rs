//! Exhaustive analysis of the discrete quality-ball model of watermark capacity.
//!
//! Images are grid points with `channels * height * width` coordinates, each
//! in `0..levels`. Watermarked variants of a clean image must stay within an
//! l2 ball implied by a minimum PSNR, and codewords must not be confusable
//! under the chosen conflict rule.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest quality ball accepted.
pub const MAX_BALL: usize = 20_000;
/// Largest ball for which every maximal set is enumerated.
pub const MAX_ENUMERATION_BALL: usize = 64;
/// Cap on enumerated maximal sets.
pub const MAX_MAXIMAL_SETS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("invalid toy configuration: {0}")]
    InvalidConfig(String),
    #[error("quality ball has {0} points, limit is {MAX_BALL}")]
    BallTooLarge(usize),
    #[error("point has {found} coordinates, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("unknown conflict rule '{0}' (expected adjacent or ball<r>)")]
    UnknownRule(String),
}

pub type Point = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ConflictRule {
    /// Points conflict when tolerance related.
    Adjacent,
    /// Points conflict when their radius-`radius` edit balls intersect
    /// (l1 distance at most `2 * radius`).
    BallOverlap { radius: usize },
}

impl ConflictRule {
    pub fn conflicts(self, a: &[usize], b: &[usize]) -> bool {
        match self {
            ConflictRule::Adjacent => tolerance_related(a, b),
            ConflictRule::BallOverlap { radius } => a != b && l1(a, b) <= 2 * radius,
        }
    }
}

impl fmt::Display for ConflictRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConflictRule::Adjacent => f.write_str("adjacent"),
            ConflictRule::BallOverlap { radius } => write!(f, "ball{radius}"),
        }
    }
}

impl FromStr for ConflictRule {
    type Err = ToyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        if s == "adjacent" {
            return Ok(ConflictRule::Adjacent);
        }
        s.strip_prefix("ball")
            .map(|r| r.trim_start_matches(['_', '(']).trim_end_matches(')'))
            .and_then(|r| r.parse().ok())
            .map(|radius| ConflictRule::BallOverlap { radius })
            .ok_or(ToyError::UnknownRule(s))
    }
}

fn l1(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum()
}

/// Exactly one coordinate differs, by exactly one level.
pub fn tolerance_related(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && l1(a, b) == 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub levels: usize,
    pub center: Point,
    pub min_psnr: f64,
    pub range: f64,
    pub rule: ConflictRule,
}

impl ToyConfig {
    /// Clean image at the middle level in every coordinate.
    pub fn new(channels: usize, height: usize, width: usize, levels: usize, min_psnr: f64, rule: ConflictRule) -> Self {
        ToyConfig {
            channels,
            height,
            width,
            levels,
            center: vec![levels.saturating_sub(1) / 2; channels * height * width],
            min_psnr,
            range: 1.0,
            rule,
        }
    }

    pub fn dims(&self) -> usize {
        self.channels * self.height * self.width
    }

    /// Spacing between adjacent levels.
    pub fn step(&self) -> f64 {
        self.range / (self.levels - 1) as f64
    }

    /// l2 radius at which the PSNR equals `min_psnr` (0 for an infinite target).
    pub fn epsilon(&self) -> f64 {
        (self.dims() as f64 * self.range * self.range * 10f64.powf(-self.min_psnr / 10.0)).sqrt()
    }

    pub fn validate(&self) -> Result<(), ToyError> {
        let bad = |m: String| Err(ToyError::InvalidConfig(m));
        if self.levels < 2 {
            return bad("levels must be >= 2".into());
        }
        if self.dims() == 0 {
            return bad("image must have at least one sample".into());
        }
        if self.center.len() != self.dims() {
            return bad(format!("center has {} coordinates, expected {}", self.center.len(), self.dims()));
        }
        if self.center.iter().any(|&c| c >= self.levels) {
            return bad("center coordinates must lie in 0..levels".into());
        }
        if !(self.range > 0.0 && self.range.is_finite()) || self.min_psnr.is_nan() || self.min_psnr == f64::NEG_INFINITY {
            return bad("range must be positive and finite; min_psnr must not be NaN or -inf".into());
        }
        Ok(())
    }

    fn check_point(&self, p: &[usize]) -> Result<(), ToyError> {
        if p.len() != self.dims() {
            return Err(ToyError::ShapeMismatch {
                expected: self.dims(),
                found: p.len(),
            });
        }
        Ok(())
    }

    fn in_ball(&self, p: &[usize]) -> bool {
        let offsets: Vec<isize> = p.iter().zip(&self.center).map(|(&a, &c)| a as isize - c as isize).collect();
        self.offset_in_ball(&offsets)
    }

    fn offset_in_ball(&self, offsets: &[isize]) -> bool {
        let step = self.step();
        let d2: f64 = offsets.iter().map(|&o| (o as f64 * step).powi(2)).sum();
        d2.sqrt() <= self.epsilon() * (1.0 + 1e-12)
    }
}

/// Grid points within `epsilon` of the centre, in lexicographic order.
pub fn quality_ball(cfg: &ToyConfig) -> Result<Vec<Point>, ToyError> {
    cfg.validate()?;
    let reach = (cfg.epsilon() / cfg.step() * (1.0 + 1e-12)).floor() as usize;
    let lo: Vec<usize> = cfg.center.iter().map(|&c| c.saturating_sub(reach)).collect();
    let hi: Vec<usize> = cfg.center.iter().map(|&c| (c + reach).min(cfg.levels - 1)).collect();
    let boxed = lo
        .iter()
        .zip(&hi)
        .try_fold(1usize, |acc, (l, h)| acc.checked_mul(h - l + 1));
    if boxed.is_none_or(|n| n > 50 * MAX_BALL) {
        return Err(ToyError::BallTooLarge(boxed.unwrap_or(usize::MAX)));
    }
    let mut out = Vec::new();
    let mut p = lo.clone();
    loop {
        if cfg.in_ball(&p) {
            out.push(p.clone());
            if out.len() > MAX_BALL {
                return Err(ToyError::BallTooLarge(out.len()));
            }
        }
        // odometer increment, last coordinate fastest
        let mut i = p.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if p[i] < hi[i] {
                p[i] += 1;
                break;
            }
            p[i] = lo[i];
        }
    }
}

/// Adjacency bitsets of the conflict graph over `points`.
struct Graph {
    n: usize,
    words: usize,
    adj: Vec<Vec<u64>>,
}

impl Graph {
    fn build(points: &[Point], rule: ConflictRule) -> Self {
        let n = points.len();
        let words = n.div_ceil(64).max(1);
        let mut adj = vec![vec![0u64; words]; n];
        for i in 0..n {
            for j in i + 1..n {
                if rule.conflicts(&points[i], &points[j]) {
                    adj[i][j / 64] |= 1 << (j % 64);
                    adj[j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        Graph { n, words, adj }
    }

    fn conflict(&self, i: usize, j: usize) -> bool {
        self.adj[i][j / 64] >> (j % 64) & 1 == 1
    }

    fn full(&self) -> Vec<u64> {
        let mut s = vec![0u64; self.words];
        for i in 0..self.n {
            s[i / 64] |= 1 << (i % 64);
        }
        s
    }
}

fn members(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &bits)| {
        (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
    })
}

fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

fn without_neighbours(set: &[u64], g: &Graph, v: usize) -> Vec<u64> {
    let mut s: Vec<u64> = set.iter().zip(&g.adj[v]).map(|(a, b)| a & !b).collect();
    s[v / 64] &= !(1 << (v % 64));
    s
}

/// Number of greedy conflict cliques covering `set`; bounds the independent
/// set size within it.
fn clique_cover_bound(set: &[u64], g: &Graph) -> usize {
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for v in members(set) {
        match cliques.iter_mut().find(|c| c.iter().all(|&u| g.conflict(u, v))) {
            Some(c) => c.push(v),
            None => cliques.push(vec![v]),
        }
    }
    cliques.len()
}

fn branch(g: &Graph, cand: Vec<u64>, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if count(&cand) == 0 {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return;
    }
    if current.len() + clique_cover_bound(&cand, g) <= best.len() {
        return;
    }
    let v = members(&cand).next().expect("non-empty");
    current.push(v);
    branch(g, without_neighbours(&cand, g, v), current, best);
    current.pop();
    let mut rest = cand;
    rest[v / 64] &= !(1 << (v % 64));
    branch(g, rest, current, best);
}

/// Exact maximum independent set by branch and bound. Returns vertex indices.
pub fn maximum_independent_set(points: &[Point], rule: ConflictRule) -> Vec<usize> {
    let g = Graph::build(points, rule);
    let mut best = Vec::new();
    branch(&g, g.full(), &mut Vec::new(), &mut best);
    best.sort_unstable();
    best
}

/// Maximum independent set size by trying every subset (for small inputs).
pub fn brute_force_max_size(points: &[Point], rule: ConflictRule) -> usize {
    assert!(points.len() <= 24, "subset enumeration limited to 24 points");
    let n = points.len();
    let conflict: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| rule.conflicts(&points[i], &points[j])).collect())
        .collect();
    (0u32..1 << n)
        .filter(|mask| {
            (0..n).all(|i| mask >> i & 1 == 0 || (i + 1..n).all(|j| mask >> j & 1 == 0 || !conflict[i][j]))
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Every maximal independent set (Bron–Kerbosch with pivoting on the
/// complement), up to `limit` sets.
pub fn maximal_independent_sets(points: &[Point], rule: ConflictRule, limit: usize) -> (Vec<Vec<usize>>, bool) {
    let g = Graph::build(points, rule);
    let mut out = Vec::new();
    let mut complete = true;
    bron_kerbosch(&g, &mut Vec::new(), g.full(), vec![0; g.words], &mut out, limit, &mut complete);
    (out, complete)
}

fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<usize>,
    p: Vec<u64>,
    x: Vec<u64>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
    complete: &mut bool,
) {
    if out.len() >= limit {
        *complete = false;
        return;
    }
    if count(&p) == 0 && count(&x) == 0 {
        let mut s = r.clone();
        s.sort_unstable();
        out.push(s);
        return;
    }
    // pivot with most non-neighbours (in the conflict graph) among P
    let pivot = members(&p)
        .chain(members(&x))
        .max_by_key(|&u| count(&without_neighbours(&p, g, u)))
        .expect("P or X non-empty");
    let candidates: Vec<usize> = members(&p)
        .filter(|&v| v == pivot || g.conflict(pivot, v))
        .collect();
    let (mut p, mut x) = (p, x);
    for v in candidates {
        r.push(v);
        bron_kerbosch(g, r, without_neighbours(&p, g, v), without_neighbours(&x, g, v), out, limit, complete);
        r.pop();
        p[v / 64] &= !(1 << (v % 64));
        x[v / 64] |= 1 << (v % 64);
    }
}

/// Greedy maximal set from each start vertex, scanning in index order.
pub fn greedy_maximal_sets(points: &[Point], rule: ConflictRule) -> Vec<Vec<usize>> {
    let g = Graph::build(points, rule);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for start in 0..g.n {
        let mut set = vec![start];
        for v in (0..g.n).filter(|&v| v != start) {
            if set.iter().all(|&u| !g.conflict(u, v)) {
                set.push(v);
            }
        }
        set.sort_unstable();
        if seen.insert(set.clone()) {
            out.push(set);
        }
    }
    out
}

pub fn is_independent(set: &[Point], rule: ConflictRule) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, a)| set[i + 1..].iter().all(|b| !rule.conflicts(a, b)))
}

/// Independent and no ball point can be added.
pub fn is_maximal(set: &[Point], ball: &[Point], rule: ConflictRule) -> bool {
    is_independent(set, rule)
        && ball
            .iter()
            .filter(|p| !set.contains(p))
            .all(|p| set.iter().any(|s| rule.conflicts(s, p)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WatermarkSet {
    pub size: usize,
    pub capacity_bits: f64,
    pub points: Vec<Point>,
}

impl WatermarkSet {
    fn new(points: Vec<Point>) -> Self {
        WatermarkSet {
            size: points.len(),
            capacity_bits: (points.len() as f64).log2(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyReport {
    pub config: ToyConfig,
    pub rule: String,
    pub step: f64,
    pub epsilon: f64,
    pub ball_size: usize,
    pub max_size: usize,
    pub capacity_bits: f64,
    pub maximum_set: WatermarkSet,
    /// Whether every maximal set was enumerated (otherwise greedy only).
    pub maximal_sets_exhaustive: bool,
    pub maximal_set_count: usize,
    /// Count of maximal sets by size.
    pub maximal_size_histogram: BTreeMap<usize, usize>,
    /// First maximal set of each size, in enumeration order.
    pub maximal_sets: Vec<WatermarkSet>,
}

impl ToyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("toy report serializes")
    }
}

/// Maximum and representative maximal watermark sets for a configuration.
pub fn watermark_sets(cfg: &ToyConfig) -> Result<ToyReport, ToyError> {
    let ball = quality_ball(cfg)?;
    let pick = |idx: &[usize]| -> Vec<Point> { idx.iter().map(|&i| ball[i].clone()).collect() };
    let maximum = pick(&maximum_independent_set(&ball, cfg.rule));
    let (sets, exhaustive) = if ball.len() <= MAX_ENUMERATION_BALL {
        let (s, complete) = maximal_independent_sets(&ball, cfg.rule, MAX_MAXIMAL_SETS);
        (s, complete)
    } else {
        (greedy_maximal_sets(&ball, cfg.rule), false)
    };
    let mut hist = BTreeMap::new();
    let mut reps: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
    for s in &sets {
        *hist.entry(s.len()).or_insert(0) += 1;
        reps.entry(s.len()).or_insert_with(|| pick(s));
    }
    for s in reps.values().chain(std::iter::once(&maximum)) {
        if !is_maximal(s, &ball, cfg.rule) && s != &maximum {
            return Err(ToyError::InvalidConfig("internal: non-maximal set produced".into()));
        }
        if !is_independent(s, cfg.rule) {
            return Err(ToyError::InvalidConfig("internal: dependent set produced".into()));
        }
    }
    let max_size = maximum.len();
    Ok(ToyReport {
        config: cfg.clone(),
        rule: cfg.rule.to_string(),
        step: cfg.step(),
        epsilon: cfg.epsilon(),
        ball_size: ball.len(),
        max_size,
        capacity_bits: (max_size as f64).log2(),
        maximum_set: WatermarkSet::new(maximum),
        maximal_sets_exhaustive: exhaustive,
        maximal_set_count: sets.len(),
        maximal_size_histogram: hist,
        maximal_sets: reps.into_values().rev().map(WatermarkSet::new).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoexistenceReport {
    pub rule: String,
    /// Distinct points `a + (b - center)`, clamped to the grid.
    pub composed: Vec<Point>,
    pub overlap_with_a: usize,
    pub overlap_with_b: usize,
    pub outside_ball: usize,
    /// Compositions (with multiplicity) whose unclamped sum lies beyond epsilon.
    pub beyond_epsilon_unclamped: usize,
    /// Unordered pairs of distinct composed points that conflict.
    pub separation_violations: usize,
    /// Conflicting pairs already present within `a`.
    pub violations_within_a: usize,
}

/// Applies every perturbation of `b` on top of every point of `a`.
pub fn toy_coexistence(a: &[Point], b: &[Point], cfg: &ToyConfig) -> Result<CoexistenceReport, ToyError> {
    cfg.validate()?;
    for p in a.iter().chain(b) {
        cfg.check_point(p)?;
    }
    let mut composed: Vec<Point> = Vec::new();
    let mut seen = HashSet::new();
    let mut beyond = 0;
    let top = cfg.levels as isize - 1;
    for pa in a {
        for pb in b {
            let offsets: Vec<isize> = pa
                .iter()
                .zip(pb)
                .zip(&cfg.center)
                .map(|((&x, &y), &c)| x as isize + y as isize - 2 * c as isize)
                .collect();
            if !cfg.offset_in_ball(&offsets) {
                beyond += 1;
            }
            let p: Point = offsets
                .iter()
                .zip(&cfg.center)
                .map(|(&o, &c)| (c as isize + o).clamp(0, top) as usize)
                .collect();
            if seen.insert(p.clone()) {
                composed.push(p);
            }
        }
    }
    let conflicts = |s: &[Point]| {
        s.iter()
            .enumerate()
            .map(|(i, x)| s[i + 1..].iter().filter(|y| cfg.rule.conflicts(x, y)).count())
            .sum()
    };
    Ok(CoexistenceReport {
        rule: cfg.rule.to_string(),
        overlap_with_a: composed.iter().filter(|p| a.contains(p)).count(),
        overlap_with_b: composed.iter().filter(|p| b.contains(p)).count(),
        outside_ball: composed.iter().filter(|p| !cfg.in_ball(p)).count(),
        beyond_epsilon_unclamped: beyond,
        separation_violations: conflicts(&composed),
        violations_within_a: conflicts(a),
        composed,
    })
}
