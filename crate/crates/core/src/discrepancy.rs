//! Net, stratification and discrepancy checks on finite point sets.
//!
//! Points are rows of reals in `[0,1)`. Intervals are half-open throughout.

use crate::error::{Error, Result};
use crate::qmc::NetParams;

/// The dyadic box Π [c_j 2^{-k_j}, (c_j+1) 2^{-k_j}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryInterval {
    pub levels: Vec<u32>,
    pub cells: Vec<u64>,
}

impl ElementaryInterval {
    pub fn total_level(&self) -> u32 {
        self.levels.iter().sum()
    }

    pub fn volume(&self) -> f64 {
        (-(self.total_level() as f64)).exp2()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.levels
            .iter()
            .zip(&self.cells)
            .zip(x)
            .all(|((&k, &c), &xj)| cell_index(xj, k) == c)
    }
}

/// Outcome of [`verify_net`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetVerdict {
    pub holds: bool,
    /// First interval whose count differs from 2^{m-|k|}, with that count.
    pub witness: Option<(ElementaryInterval, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub value: f64,
    /// Anchored-box corner at which the local discrepancy attains `value`.
    pub corner: Vec<f64>,
    pub n: usize,
    pub d: usize,
}

#[inline]
fn cell_index(x: f64, level: u32) -> u64 {
    (x * (level as f64).exp2()).floor() as u64
}

fn dims_of(points: &[Vec<f64>]) -> Result<usize> {
    let d = points.first().map(|p| p.len()).ok_or_else(|| Error::Domain("empty point set".into()))?;
    if d == 0 || points.iter().any(|p| p.len() != d) {
        return Err(Error::Domain("points must share a positive dimension".into()));
    }
    Ok(d)
}

/// (1/n) #{x_i in [0,a)} − vol([0,a)).
///
/// Corners on the closed cube `[0,1]^d` are accepted so that suprema
/// approached as a_j → 1 can be evaluated.
pub fn local_discrepancy(points: &[Vec<f64>], a: &[f64]) -> Result<f64> {
    let d = dims_of(points)?;
    if a.len() != d {
        return Err(Error::Domain(format!("corner has {} coordinates, points have {d}", a.len())));
    }
    if a.iter().any(|&aj| !(0.0..=1.0).contains(&aj)) {
        return Err(Error::Domain(format!("corner {a:?} outside the unit cube")));
    }
    let inside = points.iter().filter(|x| x.iter().zip(a).all(|(xj, aj)| xj < aj)).count();
    Ok(inside as f64 / points.len() as f64 - a.iter().product::<f64>())
}

/// Largest point count handled exactly in each dimension (index = d).
pub const STAR_EXACT_LIMITS: [usize; 4] = [0, 1 << 20, 1 << 12, 1 << 10];

/// Exact star discrepancy by enumerating the critical grid.
///
/// Grid values per axis are the distinct coordinates plus 1. The "too few
/// points" side is evaluated at grid corners with open counts; the "too many"
/// side at corners nudged one ulp above point coordinates (closed counts).
pub fn star_discrepancy_exact(points: &[Vec<f64>]) -> Result<DiscrepancyReport> {
    let d = dims_of(points)?;
    let n = points.len();
    if d > 3 {
        return Err(Error::Capability(format!("exact star discrepancy supports d <= 3, got {d}")));
    }
    if n > STAR_EXACT_LIMITS[d] {
        return Err(Error::Capability(format!(
            "exact star discrepancy in d = {d} supports n <= {}, got {n}",
            STAR_EXACT_LIMITS[d]
        )));
    }
    if points.iter().flatten().any(|&x| !(0.0..1.0).contains(&x)) {
        return Err(Error::Domain("points must lie in [0,1)^d".into()));
    }

    // Per axis: sorted distinct values and each point's rank among them.
    let axes: Vec<(Vec<f64>, Vec<usize>)> = (0..d)
        .map(|j| {
            let mut vals: Vec<f64> = points.iter().map(|p| p[j]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            let ranks = points
                .iter()
                .map(|p| vals.binary_search_by(|v| v.partial_cmp(&p[j]).unwrap()).unwrap())
                .collect();
            (vals, ranks)
        })
        .collect();

    let mut best = Candidate { value: -1.0, corner: vec![0.0; d] };
    match d {
        1 => star_1d(&axes, n, &mut best),
        2 => star_2d(&axes, n, &mut best),
        _ => star_3d(&axes, n, &mut best),
    }
    Ok(DiscrepancyReport { value: best.value, corner: best.corner, n, d })
}

struct Candidate {
    value: f64,
    corner: Vec<f64>,
}

impl Candidate {
    #[inline]
    fn offer(&mut self, value: f64, corner: impl FnOnce() -> Vec<f64>) {
        if value > self.value {
            self.value = value;
            self.corner = corner();
        }
    }
}

/// Grid value `g` of an axis: the g-th distinct coordinate, or 1 past the end.
#[inline]
fn grid(vals: &[f64], g: usize) -> f64 {
    vals.get(g).copied().unwrap_or(1.0)
}

/// Corner coordinate just above the g-th distinct value.
#[inline]
fn above(vals: &[f64], g: usize) -> f64 {
    vals[g].next_up()
}

fn star_1d(axes: &[(Vec<f64>, Vec<usize>)], n: usize, best: &mut Candidate) {
    let (vals, ranks) = &axes[0];
    let mut per = vec![0usize; vals.len()];
    for &r in ranks {
        per[r] += 1;
    }
    let nf = n as f64;
    let mut below = 0usize;
    for g in 0..=vals.len() {
        let a = grid(vals, g);
        best.offer(a - below as f64 / nf, || vec![a]);
        if g < vals.len() {
            below += per[g];
            let b = above(vals, g);
            best.offer(below as f64 / nf - b, || vec![b]);
        }
    }
}

fn star_2d(axes: &[(Vec<f64>, Vec<usize>)], n: usize, best: &mut Candidate) {
    let (v1, r1) = &axes[0];
    let (v2, r2) = &axes[1];
    let (u1, u2) = (v1.len(), v2.len());
    let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); u1];
    for (i, &r) in r1.iter().enumerate() {
        by_row[r].push(r2[i]);
    }
    let nf = n as f64;
    // open[g2] = #{r1 < g1, r2 < g2}
    let mut open = vec![0u32; u2 + 1];
    for g1 in 0..=u1 {
        let a1 = grid(v1, g1);
        for g2 in 0..=u2 {
            let a2 = grid(v2, g2);
            best.offer(a1 * a2 - open[g2] as f64 / nf, || vec![a1, a2]);
        }
        if g1 == u1 {
            break;
        }
        for &r in &by_row[g1] {
            for c in &mut open[r + 1..] {
                *c += 1;
            }
        }
        let b1 = above(v1, g1);
        for g2 in 0..u2 {
            let b2 = above(v2, g2);
            best.offer(open[g2 + 1] as f64 / nf - b1 * b2, || vec![b1, b2]);
        }
    }
}

fn star_3d(axes: &[(Vec<f64>, Vec<usize>)], n: usize, best: &mut Candidate) {
    let (v1, r1) = &axes[0];
    let (v2, r2) = &axes[1];
    let (v3, r3) = &axes[2];
    let (u1, u2, u3) = (v1.len(), v2.len(), v3.len());
    let mut by_row: Vec<Vec<(usize, usize)>> = vec![Vec::new(); u1];
    for i in 0..n {
        by_row[r1[i]].push((r2[i], r3[i]));
    }
    let nf = n as f64;
    let stride = u3 + 1;
    // open[g2 * stride + g3] = #{r1 < g1, r2 < g2, r3 < g3}
    let mut open = vec![0u32; (u2 + 1) * stride];
    for g1 in 0..=u1 {
        let a1 = grid(v1, g1);
        for g2 in 0..=u2 {
            let a12 = a1 * grid(v2, g2);
            let row = &open[g2 * stride..(g2 + 1) * stride];
            for (g3, &c) in row.iter().enumerate() {
                let vol = a12 * grid(v3, g3);
                best.offer(vol - c as f64 / nf, || vec![a1, grid(v2, g2), grid(v3, g3)]);
            }
        }
        if g1 == u1 {
            break;
        }
        for &(q2, q3) in &by_row[g1] {
            for g2 in q2 + 1..=u2 {
                for c in &mut open[g2 * stride + q3 + 1..(g2 + 1) * stride] {
                    *c += 1;
                }
            }
        }
        let b1 = above(v1, g1);
        for g2 in 0..u2 {
            let b12 = b1 * above(v2, g2);
            let row = &open[(g2 + 1) * stride..(g2 + 2) * stride];
            for g3 in 0..u3 {
                let vol = b12 * above(v3, g3);
                best.offer(row[g3 + 1] as f64 / nf - vol, || vec![b1, above(v2, g2), above(v3, g3)]);
            }
        }
    }
}

/// Checks that every elementary interval with |k| <= m − t holds exactly
/// 2^{m−|k|} points. Shapes are visited by increasing |k|, then by
/// decreasing k_1, k_2, ...
pub fn verify_net(points: &[Vec<f64>], params: NetParams) -> Result<NetVerdict> {
    let n = points.len();
    if n != 1usize << params.m {
        return Err(Error::Domain(format!("{n} points, expected 2^{} ", params.m)));
    }
    let d = dims_of(points)?;
    if d != params.d {
        return Err(Error::Domain(format!("points have dimension {d}, params say {}", params.d)));
    }
    let max_level = params.m - params.t;
    let mut counts = Vec::new();
    for total in 1..=max_level {
        let mut shape = vec![0u32; d];
        let mut found = None;
        for_each_composition(total, &mut shape, 0, &mut |k| {
            if found.is_some() {
                return;
            }
            let expect = 1usize << (params.m - total);
            counts.clear();
            counts.resize(1usize << total, 0usize);
            for x in points {
                counts[flat_cell(x, k)] += 1;
            }
            if let Some(bad) = counts.iter().position(|&c| c != expect) {
                found = Some((unflatten(bad, k), counts[bad]));
            }
        });
        if let Some(w) = found {
            return Ok(NetVerdict { holds: false, witness: Some(w) });
        }
    }
    Ok(NetVerdict { holds: true, witness: None })
}

/// Enumerates k with Σk = total, first coordinate descending.
fn for_each_composition(total: u32, k: &mut [u32], j: usize, f: &mut impl FnMut(&[u32])) {
    if j + 1 == k.len() {
        k[j] = total;
        f(k);
        return;
    }
    for kj in (0..=total).rev() {
        k[j] = kj;
        for_each_composition(total - kj, k, j + 1, f);
    }
}

#[inline]
fn flat_cell(x: &[f64], k: &[u32]) -> usize {
    let mut idx = 0usize;
    for (&xj, &kj) in x.iter().zip(k) {
        idx = (idx << kj) | cell_index(xj, kj) as usize;
    }
    idx
}

fn unflatten(mut idx: usize, k: &[u32]) -> ElementaryInterval {
    let mut cells = vec![0u64; k.len()];
    for j in (0..k.len()).rev() {
        cells[j] = (idx & ((1usize << k[j]) - 1)) as u64;
        idx >>= k[j];
    }
    ElementaryInterval { levels: k.to_vec(), cells }
}

/// Smallest t for which the points form a (t, m, d)-net.
pub fn min_t(points: &[Vec<f64>], m: u32, d: usize) -> Result<u32> {
    for t in 0..m {
        if verify_net(points, NetParams::new(t, m, d)?)?.holds {
            return Ok(t);
        }
    }
    // t = m only asks that all points lie in the cube.
    verify_net(points, NetParams::new(m, m, d)?)?;
    Ok(m)
}

/// True iff every coordinate puts exactly one value in each [k/n, (k+1)/n).
pub fn verify_stratified(points: &[Vec<f64>]) -> Result<bool> {
    let d = dims_of(points)?;
    Ok((0..d).all(|j| column_stratified(points.iter().map(|p| p[j]), points.len())))
}

pub(crate) fn column_stratified(values: impl Iterator<Item = f64>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for v in values {
        if !(0.0..1.0).contains(&v) {
            return false;
        }
        let k = ((v * n as f64).floor() as usize).min(n - 1);
        if std::mem::replace(&mut seen[k], true) {
            return false;
        }
    }
    seen.iter().all(|&s| s)
}

/// Count of values in [A, B) with its guaranteed range for stratified input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalCount {
    pub count: usize,
    /// ⌈nβ⌉ − 2, floored at 0.
    pub lower: usize,
    /// ⌊nβ⌋ + 2.
    pub upper: usize,
}

impl IntervalCount {
    pub fn within_bounds(&self) -> bool {
        self.lower <= self.count && self.count <= self.upper
    }
}

/// Counts stratified values in [A, B) and reports the bound
/// ⌈nβ⌉ − 2 ≤ n_* ≤ ⌊nβ⌋ + 2 with β = B − A.
pub fn count_in_interval(values: &[f64], lo: f64, hi: f64) -> Result<IntervalCount> {
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::Domain(format!("need 0 <= A < B <= 1, got [{lo}, {hi})")));
    }
    let n = values.len();
    if n == 0 || !column_stratified(values.iter().copied(), n) {
        return Err(Error::Contract("values are not stratified".into()));
    }
    let count = values.iter().filter(|&&v| lo <= v && v < hi).count();
    let nb = n as f64 * (hi - lo);
    // Guard against nβ landing a rounding error away from an integer.
    let snapped = if (nb - nb.round()).abs() < 1e-9 { nb.round() } else { nb };
    let lower = (snapped.ceil() as i64 - 2).max(0) as usize;
    let upper = snapped.floor() as usize + 2;
    Ok(IntervalCount { count, lower, upper })
}
