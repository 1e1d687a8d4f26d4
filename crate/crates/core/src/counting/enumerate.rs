//! Exact enumeration of constrained tuples.
//!
//! Two exact methods are used. For `i^a` with small integer `a` the tuple
//! sums are integers, so counts and weights are convolved over the sum value
//! (work `O(n · S · I)` rather than the number of tuples). Otherwise a
//! depth-first search fixes the first `n-1` coordinates with prefix-sum
//! pruning and resolves the last coordinate as a contiguous index range by
//! binary search.

use super::{TupleConstraint, TupleShape, WindowKind};
use crate::error::{domain, Error, Result};

/// Default cap on visited nodes (DFS nodes or convolution cell updates).
pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMethod {
    DepthFirst,
    IntegerConvolution,
}

/// Number of tuples in the window and their weight `Σ Π i_k^{-σ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enumeration {
    pub count: u64,
    pub weight: f64,
    pub nodes: u64,
    pub method: EnumerationMethod,
}

/// Largest index whose term still leaves room for `rest` further coordinates
/// (each at least 1) inside the window.
fn max_index(shape: &TupleShape, upper: f64, rest: usize) -> u64 {
    let room = upper - rest as f64;
    if shape.term(1) > room {
        return 0;
    }
    let mut hi: u64 = 2;
    while shape.term(hi) <= room {
        hi *= 2;
    }
    // term(lo) ≤ room < term(hi)
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if shape.term(mid) <= room {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Crude a-priori size of the prefix search, for error messages.
fn size_estimate(imax: u64, depth: usize) -> f64 {
    let mut e = 1.0;
    for k in 1..=depth {
        e *= imax as f64 / k as f64;
    }
    e
}

fn weight_of(i: u64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        1.0
    } else {
        (i as f64).powf(-sigma)
    }
}

struct Dfs<'a> {
    c: &'a TupleConstraint,
    terms: Vec<f64>,
    /// `prefix[i] = Σ_{j ≤ i} j^{-σ}`
    prefix: Vec<f64>,
    nodes: u64,
    cap: u64,
    count: u64,
    weight: f64,
}

impl Dfs<'_> {
    fn in_upper(&self, sum: f64) -> bool {
        match self.c.window {
            WindowKind::HalfOpen => sum < self.c.upper(),
            WindowKind::Closed => sum <= self.c.upper(),
        }
    }

    fn visit(&mut self, depth: usize, partial: f64, product: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::SizeCap {
                estimate: size_estimate(self.terms.len() as u64 - 1, self.c.n - 1),
                cap: self.cap as f64,
            });
        }
        let rest = self.c.n - depth - 1;
        if rest == 0 {
            // last coordinate: term(i) ∈ [m - partial, upper - partial)
            let lo = self.terms[1..].partition_point(|&t| partial + t < self.c.m) + 1;
            let hi = self.terms[1..].partition_point(|&t| self.in_upper(partial + t)) + 1;
            if hi > lo {
                self.count += (hi - lo) as u64;
                self.weight += product * (self.prefix[hi - 1] - self.prefix[lo - 1]);
            }
            return Ok(());
        }
        for i in 1..self.terms.len() {
            let next = partial + self.terms[i];
            if !self.in_upper(next + rest as f64) {
                break;
            }
            let w = product * (self.prefix[i] - self.prefix[i - 1]);
            self.visit(depth + 1, next, w)?;
        }
        Ok(())
    }
}

fn depth_first(c: &TupleConstraint, sigma: f64, cap: u64) -> Result<Enumeration> {
    let imax = max_index(&c.shape, c.upper(), c.n - 1);
    let mut terms = vec![0.0; imax as usize + 1];
    let mut prefix = vec![0.0; imax as usize + 1];
    for i in 1..=imax {
        terms[i as usize] = c.shape.term(i);
        prefix[i as usize] = prefix[i as usize - 1] + weight_of(i, sigma);
    }
    let mut dfs = Dfs { c, terms, prefix, nodes: 0, cap, count: 0, weight: 0.0 };
    if imax > 0 {
        dfs.visit(0, 0.0, 1.0)?;
    }
    Ok(Enumeration { count: dfs.count, weight: dfs.weight, nodes: dfs.nodes, method: EnumerationMethod::DepthFirst })
}

/// Counts and weights of `k`-tuples of positive integers with
/// `Σ i_j^a = t` exactly, for every `k ≤ n_max` and `t ≤ max_sum`.
#[derive(Debug, Clone)]
pub struct IntegerSumTable {
    pub a: u32,
    pub sigma: f64,
    pub max_sum: usize,
    counts: Vec<Vec<u64>>,
    weights: Vec<Vec<f64>>,
    /// Cell updates performed while building.
    pub work: u64,
}

impl IntegerSumTable {
    pub fn build(a: u32, sigma: f64, max_sum: usize, n_max: usize, cap: u64) -> Result<Self> {
        if a == 0 || n_max == 0 {
            return domain("integer sum table needs a ≥ 1 and n ≥ 1");
        }
        let terms: Vec<(usize, f64)> = (1u64..)
            .map_while(|i| i.checked_pow(a).map(|t| (t as usize, weight_of(i, sigma))))
            .take_while(|&(t, _)| t <= max_sum)
            .collect();
        let estimate = n_max as f64 * max_sum as f64 * terms.len() as f64;
        if estimate > cap as f64 {
            return Err(Error::SizeCap { estimate, cap: cap as f64 });
        }
        let mut base_c = vec![0u64; max_sum + 1];
        let mut base_w = vec![0.0; max_sum + 1];
        for &(t, w) in &terms {
            base_c[t] = 1;
            base_w[t] = w;
        }
        let mut counts = vec![base_c];
        let mut weights = vec![base_w];
        let mut work = terms.len() as u64;
        for _ in 1..n_max {
            let (pc, pw) = (counts.last().unwrap(), weights.last().unwrap());
            let mut nc = vec![0u64; max_sum + 1];
            let mut nw = vec![0.0; max_sum + 1];
            for s in 1..=max_sum {
                if pc[s] == 0 {
                    continue;
                }
                for &(t, w) in &terms {
                    let u = s + t;
                    if u > max_sum {
                        break;
                    }
                    nc[u] += pc[s];
                    nw[u] += pw[s] * w;
                    work += 1;
                }
            }
            counts.push(nc);
            weights.push(nw);
        }
        Ok(Self { a, sigma, max_sum, counts, weights, work })
    }

    pub fn n_max(&self) -> usize {
        self.counts.len()
    }

    /// Count and weight for a constraint whose shape exponent, σ and size
    /// match this table.
    pub fn query(&self, c: &TupleConstraint) -> Result<(u64, f64)> {
        if c.shape.integer_exponent() != Some(self.a) {
            return domain("constraint shape does not match the table exponent");
        }
        if c.n > self.n_max() {
            return domain(format!("table holds tuples up to length {}, asked for {}", self.n_max(), c.n));
        }
        let lo = c.m.ceil().max(1.0) as usize;
        let upper = c.upper();
        let hi_f = match c.window {
            WindowKind::HalfOpen if upper.fract() == 0.0 => upper - 1.0,
            _ => upper.floor(),
        };
        if hi_f > self.max_sum as f64 {
            return domain(format!("window end {upper} exceeds table size {}", self.max_sum));
        }
        if hi_f < lo as f64 {
            return Ok((0, 0.0));
        }
        let hi = hi_f as usize;
        let (cs, ws) = (&self.counts[c.n - 1], &self.weights[c.n - 1]);
        Ok(((lo..=hi).map(|t| cs[t]).sum(), (lo..=hi).map(|t| ws[t]).sum()))
    }
}

/// Count and weight `Σ_{tuples} Π i_k^{-σ}` of all tuples in the window
/// (`σ = 0` counts).
pub fn enumerate_tuples(c: &TupleConstraint, sigma: f64, cap: u64) -> Result<Enumeration> {
    if let Some(a) = c.shape.integer_exponent() {
        let upper = c.upper();
        let imax = max_index(&c.shape, upper, c.n - 1);
        let convolution_work = c.n as f64 * upper * imax as f64;
        let search_size = size_estimate(imax, c.n - 1);
        if upper < 1e7 && convolution_work < search_size {
            let table = IntegerSumTable::build(a, sigma, upper.floor() as usize, c.n, cap)?;
            let (count, weight) = table.query(c)?;
            return Ok(Enumeration { count, weight, nodes: table.work, method: EnumerationMethod::IntegerConvolution });
        }
    }
    depth_first(c, sigma, cap)
}

/// Exact number of tuples in the window.
pub fn count_tuples(c: &TupleConstraint, cap: u64) -> Result<Enumeration> {
    enumerate_tuples(c, 0.0, cap)
}

/// Calls `f` on every tuple in the window, in lexicographic order. Returns
/// the number of search nodes visited.
pub fn for_each_tuple(c: &TupleConstraint, cap: u64, mut f: impl FnMut(&[u64])) -> Result<u64> {
    let imax = max_index(&c.shape, c.upper(), c.n - 1);
    let terms: Vec<f64> = (0..=imax).map(|i| if i == 0 { 0.0 } else { c.shape.term(i) }).collect();
    let mut tuple = vec![0u64; c.n];
    let mut nodes = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        c: &TupleConstraint,
        terms: &[f64],
        tuple: &mut [u64],
        depth: usize,
        partial: f64,
        nodes: &mut u64,
        cap: u64,
        f: &mut dyn FnMut(&[u64]),
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > cap {
            return Err(Error::SizeCap { estimate: size_estimate(terms.len() as u64 - 1, c.n), cap: cap as f64 });
        }
        if depth == c.n {
            if c.contains(partial) {
                f(tuple);
            }
            return Ok(());
        }
        let rest = (c.n - depth - 1) as f64;
        for i in 1..terms.len() {
            let next = partial + terms[i];
            let fits = match c.window {
                WindowKind::HalfOpen => next + rest < c.upper(),
                WindowKind::Closed => next + rest <= c.upper(),
            };
            if !fits {
                break;
            }
            tuple[depth] = i as u64;
            rec(c, terms, tuple, depth + 1, next, nodes, cap, f)?;
        }
        Ok(())
    }

    if imax > 0 {
        rec(c, &terms, &mut tuple, 0, 0.0, &mut nodes, cap, &mut f)?;
    }
    Ok(nodes)
}

fn check_ds(d: f64, s: f64) -> Result<f64> {
    let ds = d * s;
    if !(ds > 1.0) {
        return domain(format!("the weighted sum needs ds > 1, got d·s = {ds}"));
    }
    Ok(ds)
}

/// `G(m, n, a, ε, s) = Σ_{A(m,n,a,ε)} Π i_k^{-ds}`.
pub fn g_sum(c: &TupleConstraint, d: f64, s: f64, cap: u64) -> Result<Enumeration> {
    if !matches!(c.shape, TupleShape::PowerLaw { .. }) {
        return domain("G is defined for the power-law shape i^a");
    }
    enumerate_tuples(c, check_ds(d, s)?, cap)
}

/// `Ĝ(m, n, b, ε, s) = Σ_{Â(m,n,b,ε)} Π i_k^{-ds}`.
pub fn ghat_sum(c: &TupleConstraint, d: f64, s: f64, cap: u64) -> Result<Enumeration> {
    if !matches!(c.shape, TupleShape::LogPower { .. }) {
        return domain("Ĝ is defined for the log-power shape e^{(log i)^b}");
    }
    enumerate_tuples(c, check_ds(d, s)?, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn power(m: f64, n: usize, a: f64, eps: f64) -> TupleConstraint {
        TupleConstraint::new(m, n, TupleShape::PowerLaw { a }, eps).unwrap()
    }

    /// Every tuple in `[1, limit]^n`, no pruning.
    fn brute_force(c: &TupleConstraint, sigma: f64, limit: u64) -> (u64, f64) {
        let mut idx = vec![1u64; c.n];
        let (mut count, mut weight) = (0u64, 0.0);
        loop {
            let sum: f64 = idx.iter().map(|&i| c.shape.term(i)).sum();
            if c.contains(sum) {
                count += 1;
                weight += idx.iter().map(|&i| (i as f64).powf(-sigma)).product::<f64>();
            }
            let mut p = 0;
            while p < c.n && idx[p] == limit {
                idx[p] = 1;
                p += 1;
            }
            if p == c.n {
                return (count, weight);
            }
            idx[p] += 1;
        }
    }

    #[test]
    fn spec_counts() {
        assert_eq!(count_tuples(&power(10.0, 2, 1.0, 0.3), DEFAULT_NODE_CAP).unwrap().count, 30);
        assert_eq!(count_tuples(&power(25.0, 1, 2.0, 0.2), DEFAULT_NODE_CAP).unwrap().count, 1);
        assert_eq!(count_tuples(&power(2.0, 3, 1.0, 0.1), DEFAULT_NODE_CAP).unwrap().count, 0);
    }

    #[test]
    fn g_sum_examples() {
        let g = g_sum(&power(25.0, 1, 2.0, 0.2), 2.0, 1.0, DEFAULT_NODE_CAP).unwrap();
        assert_relative_eq!(g.weight, 0.04, epsilon = 1e-15);
        let c = power(10.0, 2, 1.0, 0.3);
        let oracle: f64 = (1..=12u64)
            .flat_map(|i| (1..=12u64).map(move |j| (i, j)))
            .filter(|(i, j)| (10..=12).contains(&(i + j)))
            .map(|(i, j)| ((i * j) as f64).powi(-2))
            .sum();
        let g = g_sum(&c, 2.0, 1.0, DEFAULT_NODE_CAP).unwrap();
        assert_relative_eq!(g.weight, oracle, max_relative = 1e-13);
        assert_eq!(g_sum(&power(2.0, 3, 1.0, 0.1), 2.0, 1.0, DEFAULT_NODE_CAP).unwrap().weight, 0.0);
        assert!(g_sum(&c, 2.0, 0.5, DEFAULT_NODE_CAP).is_err());
    }

    #[test]
    fn ghat_examples() {
        let phi5 = 5f64.ln().powi(2).exp();
        let c = TupleConstraint::new(phi5, 1, TupleShape::LogPower { b: 2.0 }, 0.01).unwrap();
        let g = ghat_sum(&c, 2.0, 1.0, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(g.count, 1);
        assert_relative_eq!(g.weight, 0.04, epsilon = 1e-15);
        // e^{(log i)^2} for i = 2, 3 is 1.616 and 3.342: nothing in [2, 2.2)
        let c = TupleConstraint::new(2.0, 1, TupleShape::LogPower { b: 2.0 }, 0.1).unwrap();
        assert_eq!(ghat_sum(&c, 2.0, 1.0, DEFAULT_NODE_CAP).unwrap().count, 0);
    }

    #[test]
    fn both_methods_match_brute_force() {
        for &(m, n, a, eps, sigma) in &[
            (30.0, 3, 1.0, 0.25, 1.5),
            (57.5, 2, 1.0, 0.32, 2.0),
            (200.0, 3, 2.0, 0.15, 2.0),
            (40.0, 4, 1.0, 0.2, 1.5),
            (12.0, 2, 0.5, 0.3, 2.0),
        ] {
            let c = power(m, n, a, eps);
            let limit = max_index(&c.shape, c.upper(), 0);
            let (bc, bw) = brute_force(&c, sigma, limit);
            let dfs = depth_first(&c, sigma, DEFAULT_NODE_CAP).unwrap();
            assert_eq!(dfs.count, bc, "{c:?}");
            assert_relative_eq!(dfs.weight, bw, max_relative = 1e-12);
            if let Some(ai) = c.shape.integer_exponent() {
                let table = IntegerSumTable::build(ai, sigma, c.upper() as usize + 1, n, DEFAULT_NODE_CAP).unwrap();
                let (tc, tw) = table.query(&c).unwrap();
                assert_eq!(tc, bc);
                assert_relative_eq!(tw, bw, max_relative = 1e-12);
            }
        }
        for &(m, n, b, eps) in &[(20.0, 2, 1.5, 0.3), (60.0, 3, 2.0, 0.25)] {
            let c = TupleConstraint::new(m, n, TupleShape::LogPower { b }, eps).unwrap();
            let limit = max_index(&c.shape, c.upper(), 0);
            let (bc, bw) = brute_force(&c, 2.0, limit);
            let e = ghat_sum(&c, 2.0, 1.0, DEFAULT_NODE_CAP).unwrap();
            assert_eq!(e.count, bc);
            assert_relative_eq!(e.weight, bw, max_relative = 1e-12);
        }
    }

    #[test]
    fn closed_window_adds_boundary_sums() {
        let c = power(10.0, 2, 1.0, 0.3);
        // closing the window adds the 12 pairs with sum 13
        assert_eq!(count_tuples(&c.closed(), DEFAULT_NODE_CAP).unwrap().count, 42);
        let dfs = depth_first(&c.closed(), 0.0, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(dfs.count, 42);
    }

    #[test]
    fn stream_matches_count() {
        let c = power(20.0, 3, 1.0, 0.25);
        let mut seen = Vec::new();
        for_each_tuple(&c, DEFAULT_NODE_CAP, |t| seen.push(t.to_vec())).unwrap();
        assert_eq!(seen.len() as u64, count_tuples(&c, DEFAULT_NODE_CAP).unwrap().count);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        assert!(seen.iter().all(|t| c.contains(t.iter().sum::<u64>() as f64)));
    }

    #[test]
    fn cap_is_enforced() {
        let c = power(3000.0, 4, 0.7, 0.3);
        let err = enumerate_tuples(&c, 2.0, 10_000).unwrap_err();
        assert!(matches!(err, Error::SizeCap { .. }));
    }
}
