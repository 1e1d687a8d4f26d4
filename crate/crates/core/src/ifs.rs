//! Concrete d-decaying Gauss-like systems and their cylinder intervals.
//!
//! Two systems are provided:
//!
//! * [`SystemKind::AffinePowerLaw`]: branch `i` is the increasing affine map
//!   of `[0,1]` onto `[L_{i-1}, L_i)` with length `p_i = i^{-d}/ζ(d)`. Lengths
//!   multiply exactly under composition, so distortion is identically 1.
//! * [`SystemKind::MirroredGaussCF`]: the Gauss continued-fraction branches
//!   `g_i(x) = 1/(i+x)` conjugated by `h(x) = 1-x`, so that the images tile
//!   `[0,1)` left to right in index order. `d = 2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counting::zeta::zeta_normalizer;
use crate::error::{domain, Error, Result};
use crate::numeric::hurwitz_zeta;

/// Exact cylinder endpoints are only produced for digits below this.
pub const MATERIALIZE_LIMIT: u64 = 1 << 40;

/// Distance from a cylinder endpoint, in the coordinates of the current
/// branch, below which a point is treated as lying on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Affine left endpoints below this index are summed directly.
const DIRECT_ENDPOINT_LIMIT: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    AffinePowerLaw,
    MirroredGaussCF,
}

/// A concrete d-decaying Gauss-like iterated function system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IfsSystem {
    kind: SystemKind,
    d: f64,
    zeta_d: f64,
}

/// A finite digit sequence `a_1 … a_n` with every digit ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u64>);

impl Word {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&a| a == 0) {
            return domain(format!("digit at position {} is 0; digits start at 1", pos + 1));
        }
        Ok(Self(digits))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// The word extended by one digit.
    pub fn child(&self, digit: u64) -> Result<Word> {
        if digit == 0 {
            return domain("digits start at 1");
        }
        let mut v = self.0.clone();
        v.push(digit);
        Ok(Word(v))
    }
}

impl TryFrom<&[u64]> for Word {
    type Error = Error;

    fn try_from(value: &[u64]) -> Result<Self> {
        Word::new(value.to_vec())
    }
}

/// The n-cylinder `I_n(a_1, …, a_n) = f_{a_1} ∘ … ∘ f_{a_n}([0,1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderInterval {
    pub word: Word,
    pub lo: f64,
    pub hi: f64,
    /// Natural log of `hi - lo`, computed from the branch structure so it
    /// stays finite and accurate when `hi - lo` underflows.
    pub log_diameter: f64,
}

impl CylinderInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Two-sided bounds on `log |I_n|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiameterBounds {
    pub lower: f64,
    pub upper: f64,
}

impl DiameterBounds {
    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lower - tol <= v && v <= self.upper + tol
    }
}

/// Verdict for one of the five system axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<String>,
}

/// Outcome of [`IfsSystem::check_axioms`].
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    /// `min_i ξ_i i^d` over the checked branches.
    pub k1: f64,
    /// `max_i λ_i i^d` over the checked branches.
    pub k2: f64,
    /// Smallest composition length whose derivatives are uniformly below 1.
    pub contraction_m: Option<u32>,
    /// Supremum of `|(f_{a_1} ∘ … ∘ f_{a_m})'|` for that `m`.
    pub contraction_a: f64,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl IfsSystem {
    pub fn affine_power_law(d: f64) -> Result<Self> {
        if !(d > 1.0 && d.is_finite()) {
            return domain(format!("decay exponent d must be > 1, got {d}"));
        }
        Ok(Self { kind: SystemKind::AffinePowerLaw, d, zeta_d: zeta_normalizer(d)? })
    }

    pub fn mirrored_gauss() -> Self {
        Self {
            kind: SystemKind::MirroredGaussCF,
            d: 2.0,
            zeta_d: std::f64::consts::PI.powi(2) / 6.0,
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// ζ(d), the affine normalizer.
    pub fn zeta_d(&self) -> f64 {
        self.zeta_d
    }

    pub fn label(&self) -> String {
        match self.kind {
            SystemKind::AffinePowerLaw => format!("affine:{}", self.d),
            SystemKind::MirroredGaussCF => "gauss".to_string(),
        }
    }

    /// `log p_a = -d log a - log ζ(d)` for the affine system.
    fn log_affine_length(&self, log_a: f64) -> f64 {
        -self.d * log_a - self.zeta_d.ln()
    }

    /// `(log ξ_a, log λ_a)` from `log a`.
    pub fn log_branch_bounds(&self, log_a: f64) -> (f64, f64) {
        match self.kind {
            SystemKind::AffinePowerLaw => {
                let l = self.log_affine_length(log_a);
                (l, l)
            }
            SystemKind::MirroredGaussCF => {
                // log(a+1) = log a + log(1 + 1/a)
                let log_a1 = log_a + (-log_a).exp().ln_1p();
                (-2.0 * log_a1, -2.0 * log_a)
            }
        }
    }

    /// `(ξ_i, λ_i)`: bounds on `|f_i'|` over `[0,1]`.
    pub fn branch_bounds(&self, i: u64) -> Result<(f64, f64)> {
        if i == 0 {
            return domain("branch index must be ≥ 1");
        }
        let fi = i as f64;
        Ok(match self.kind {
            SystemKind::AffinePowerLaw => {
                let p = fi.powf(-self.d) / self.zeta_d;
                (p, p)
            }
            SystemKind::MirroredGaussCF => ((fi + 1.0).powi(-2), fi.powi(-2)),
        })
    }

    /// `L_{i-1} = Σ_{j<i} p_j` for the affine system.
    fn affine_left(&self, i: u64) -> f64 {
        if i <= DIRECT_ENDPOINT_LIMIT {
            let s: f64 = (1..i).map(|j| (j as f64).powf(-self.d)).sum();
            s / self.zeta_d
        } else {
            1.0 - hurwitz_zeta(self.d, i as f64) / self.zeta_d
        }
    }

    /// `1 - L_{i-1}`: the mass of branches `i, i+1, …`.
    fn affine_tail(&self, i: u64) -> f64 {
        if i <= DIRECT_ENDPOINT_LIMIT {
            1.0 - self.affine_left(i)
        } else {
            hurwitz_zeta(self.d, i as f64) / self.zeta_d
        }
    }

    /// Image `f_i([0,1])` as `(lo, hi)`.
    pub fn branch_image(&self, i: u64) -> (f64, f64) {
        let fi = i as f64;
        match self.kind {
            SystemKind::AffinePowerLaw => {
                let lo = self.affine_left(i);
                (lo, lo + fi.powf(-self.d) / self.zeta_d)
            }
            SystemKind::MirroredGaussCF => (1.0 - 1.0 / fi, fi / (fi + 1.0)),
        }
    }

    /// `f_i(x)`.
    pub fn apply_branch(&self, i: u64, x: f64) -> f64 {
        let fi = i as f64;
        match self.kind {
            SystemKind::AffinePowerLaw => {
                self.affine_left(i) + x * fi.powf(-self.d) / self.zeta_d
            }
            SystemKind::MirroredGaussCF => (fi - x) / (fi + 1.0 - x),
        }
    }

    /// `f_i'(x)`; positive since every branch is increasing.
    pub fn branch_derivative(&self, i: u64, x: f64) -> f64 {
        let fi = i as f64;
        match self.kind {
            SystemKind::AffinePowerLaw => fi.powf(-self.d) / self.zeta_d,
            SystemKind::MirroredGaussCF => (fi + 1.0 - x).powi(-2),
        }
    }

    /// `f_i^{-1}(y)` for `y` in the image of branch `i`.
    pub fn invert_branch(&self, i: u64, y: f64) -> f64 {
        let fi = i as f64;
        match self.kind {
            SystemKind::AffinePowerLaw => {
                (y - self.affine_left(i)) * self.zeta_d * fi.powf(self.d)
            }
            SystemKind::MirroredGaussCF => fi + 1.0 - 1.0 / (1.0 - y),
        }
    }

    fn check_materializable(word: &Word) -> Result<()> {
        match word.digits().iter().find(|&&a| a >= MATERIALIZE_LIMIT) {
            Some(&digit) => Err(Error::Overflow { digit }),
            None => Ok(()),
        }
    }

    /// Exact `log |I_n|` for a word of materializable digits.
    fn log_diameter_exact(&self, word: &Word) -> f64 {
        match self.kind {
            SystemKind::AffinePowerLaw => word
                .digits()
                .iter()
                .map(|&a| self.log_affine_length((a as f64).ln()))
                .sum(),
            SystemKind::MirroredGaussCF => {
                let c = Continuants::of(word.digits());
                -(c.q.ln() + (c.q + c.q_prev).ln()) - 2.0 * c.log_scale
            }
        }
    }

    /// The cylinder `I_n(word)`.
    pub fn cylinder_interval(&self, word: &Word) -> Result<CylinderInterval> {
        Self::check_materializable(word)?;
        let (lo, hi) = match self.kind {
            SystemKind::AffinePowerLaw => {
                let (mut lo, mut hi) = (0.0, 1.0);
                for &a in word.digits().iter().rev() {
                    lo = self.apply_branch(a, lo);
                    hi = self.apply_branch(a, hi);
                }
                (lo, hi)
            }
            SystemKind::MirroredGaussCF => {
                if word.is_empty() {
                    (0.0, 1.0)
                } else {
                    let c = Continuants::of(word.digits());
                    // Gauss cylinder endpoints p_n/q_n and (p_n+p_{n-1})/(q_n+q_{n-1}),
                    // mirrored through x ↦ 1 - x.
                    let e0 = 1.0 - c.p / c.q;
                    let e1 = 1.0 - (c.p + c.p_prev) / (c.q + c.q_prev);
                    (e0.min(e1), e0.max(e1))
                }
            }
        };
        Ok(CylinderInterval { word: word.clone(), lo, hi, log_diameter: self.log_diameter_exact(word) })
    }

    /// Bounds on `log |I_n|` from the per-branch derivative bounds.
    pub fn log_cylinder_diameter(&self, word: &Word) -> DiameterBounds {
        let logs: Vec<f64> = word.digits().iter().map(|&a| (a as f64).ln()).collect();
        self.log_cylinder_diameter_from_logs(&logs)
    }

    /// As [`Self::log_cylinder_diameter`], for digits given as `log a_i`.
    pub fn log_cylinder_diameter_from_logs(&self, log_digits: &[f64]) -> DiameterBounds {
        let (lower, upper) = log_digits.iter().fold((0.0, 0.0), |(lo, hi), &l| {
            let (x, y) = self.log_branch_bounds(l);
            (lo + x, hi + y)
        });
        DiameterBounds { lower, upper }
    }

    /// Digit `i` with `x ∈ f_i([0,1))`.
    fn first_digit(&self, x: f64) -> Result<u64> {
        match self.kind {
            SystemKind::MirroredGaussCF => {
                let r = (1.0 / (1.0 - x)).floor();
                if r >= MATERIALIZE_LIMIT as f64 {
                    return Err(Error::Overflow { digit: MATERIALIZE_LIMIT });
                }
                Ok(r as u64)
            }
            SystemKind::AffinePowerLaw => {
                // Largest i with L_{i-1} ≤ x.
                let mut hi: u64 = 2;
                while self.affine_tail(hi) > 1.0 - x {
                    if hi >= MATERIALIZE_LIMIT {
                        return Err(Error::Overflow { digit: hi });
                    }
                    hi *= 2;
                }
                let mut lo: u64 = hi / 2;
                // invariant: L_{lo-1} ≤ x < L_{hi-1}
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if self.affine_tail(mid) >= 1.0 - x {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(lo)
            }
        }
    }

    /// The first `depth` digits of the symbolic expansion of `x ∈ (0,1)`.
    pub fn expand_point(&self, x: f64, depth: usize) -> Result<Word> {
        if !(x > 0.0 && x < 1.0) {
            return domain(format!("x must lie in (0,1), got {x}"));
        }
        let mut digits = Vec::with_capacity(depth);
        let mut y = x;
        for level in 0..depth {
            if !(BOUNDARY_TOL..=1.0 - BOUNDARY_TOL).contains(&y) {
                return Err(Error::Ambiguous { x, depth: level });
            }
            let i = self.first_digit(y)?;
            let next = self.invert_branch(i, y);
            if !(BOUNDARY_TOL..=1.0 - BOUNDARY_TOL).contains(&next) {
                return Err(Error::Ambiguous { x, depth: level + 1 });
            }
            digits.push(i);
            y = next;
        }
        Word::new(digits)
    }

    /// `|I_{n+m}(w1·w2)| / (|I_n(w1)| · |I_m(w2)|)`.
    pub fn distortion_ratio(&self, w1: &Word, w2: &Word) -> Result<f64> {
        if w1.is_empty() || w2.is_empty() {
            return domain("distortion ratio needs two nonempty words");
        }
        Self::check_materializable(w1)?;
        Self::check_materializable(w2)?;
        let joined = w1.concat(w2);
        let log_ratio = self.log_diameter_exact(&joined)
            - self.log_diameter_exact(w1)
            - self.log_diameter_exact(w2);
        Ok(log_ratio.exp())
    }

    /// Checks the five system axioms on branches `1..=index_limit` and a grid
    /// of `sample_grid` points in `[0,1]`.
    pub fn check_axioms(&self, index_limit: u64, sample_grid: usize) -> Result<AxiomReport> {
        if index_limit < 2 || sample_grid < 2 {
            return domain("index_limit and sample_grid must both be ≥ 2");
        }
        let grid: Vec<f64> = (0..sample_grid).map(|k| k as f64 / (sample_grid - 1) as f64).collect();
        let images: Vec<(f64, f64)> = (1..=index_limit).map(|i| self.branch_image(i)).collect();
        let mut checks = Vec::with_capacity(5);

        // (1) disjoint open images
        let overlap = images
            .windows(2)
            .enumerate()
            .find(|(_, w)| w[0].1 > w[1].0 + 1e-15 || w[0].0 >= w[0].1);
        checks.push(AxiomCheck {
            axiom: 1,
            passed: overlap.is_none(),
            detail: "branch images have disjoint interiors".into(),
            witness: overlap.map(|(k, w)| format!("branches {} and {}: {:?} {:?}", k + 1, k + 2, w[0], w[1])),
        });

        // (2) images tile [0,1) with the uncovered remainder shrinking to 0
        let gap = images.windows(2).enumerate().find(|(_, w)| (w[0].1 - w[1].0).abs() > 1e-13);
        let remainder = 1.0 - images.last().expect("index_limit ≥ 2").1;
        let predicted = match self.kind {
            SystemKind::AffinePowerLaw => self.affine_tail(index_limit + 1),
            SystemKind::MirroredGaussCF => 1.0 / (index_limit as f64 + 1.0),
        };
        let starts_at_zero = images[0].0.abs() < 1e-15;
        let tail_ok = remainder > 0.0 && (remainder - predicted).abs() <= 1e-12 + 1e-9 * predicted;
        checks.push(AxiomCheck {
            axiom: 2,
            passed: gap.is_none() && starts_at_zero && tail_ok,
            detail: format!("images tile [0, {:.12}); uncovered mass {remainder:.3e} → 0", 1.0 - remainder),
            witness: gap
                .map(|(k, w)| format!("gap between branches {} and {}: {} vs {}", k + 1, k + 2, w[0].1, w[1].0))
                .or_else(|| (!starts_at_zero).then(|| format!("first image starts at {}", images[0].0)))
                .or_else(|| (!tail_ok).then(|| format!("remainder {remainder} vs predicted {predicted}"))),
        });

        // (3) f_i < f_{i+1} pointwise
        let mut order_witness = None;
        'outer: for i in 1..index_limit {
            for &x in &grid {
                if self.apply_branch(i, x) >= self.apply_branch(i + 1, x) {
                    order_witness = Some(format!("f_{i}({x}) ≥ f_{}({x})", i + 1));
                    break 'outer;
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: 3,
            passed: order_witness.is_none(),
            detail: "branches ordered left to right by index".into(),
            witness: order_witness,
        });

        // (4) some m-fold composition is a uniform contraction
        let (contraction_m, contraction_a) = self.contraction_constant(index_limit.min(64), &grid);
        checks.push(AxiomCheck {
            axiom: 4,
            passed: contraction_m.is_some(),
            detail: match contraction_m {
                Some(m) => format!("m = {m}, A = {contraction_a:.6}"),
                None => "no m ≤ 3 found".into(),
            },
            witness: contraction_m.is_none().then(|| format!("sup derivative {contraction_a}")),
        });

        // (5) ξ_i ≤ |f_i'| ≤ λ_i with K1 i^{-d} ≤ ξ_i ≤ λ_i ≤ K2 i^{-d}
        let mut k1 = f64::INFINITY;
        let mut k2: f64 = 0.0;
        let mut deriv_witness = None;
        for i in 1..=index_limit {
            let (xi, lam) = self.branch_bounds(i)?;
            let scale = (i as f64).powf(self.d);
            k1 = k1.min(xi * scale);
            k2 = k2.max(lam * scale);
            if deriv_witness.is_none() {
                for &x in &grid {
                    let der = self.branch_derivative(i, x).abs();
                    if der < xi * (1.0 - 1e-12) || der > lam * (1.0 + 1e-12) {
                        deriv_witness = Some(format!("|f_{i}'({x})| = {der} outside [{xi}, {lam}]"));
                        break;
                    }
                }
            }
        }
        checks.push(AxiomCheck {
            axiom: 5,
            passed: deriv_witness.is_none() && k1 > 0.0 && k2.is_finite(),
            detail: format!("K1 = {k1:.12}, K2 = {k2:.12}"),
            witness: deriv_witness,
        });

        Ok(AxiomReport { checks, k1, k2, contraction_m, contraction_a })
    }

    /// Smallest `m ∈ {1,2,3}` with `sup |(f_{a_1}∘…∘f_{a_m})'| < 1` over
    /// branches `1..=limit` and the grid, and that supremum.
    fn contraction_constant(&self, limit: u64, grid: &[f64]) -> (Option<u32>, f64) {
        let mut last_sup = f64::INFINITY;
        for m in 1..=3u32 {
            let per_level = match m {
                1 => limit,
                2 => limit.min(32),
                _ => limit.min(10),
            };
            let mut sup: f64 = 0.0;
            let mut word = vec![1u64; m as usize];
            loop {
                for &x in grid {
                    // chain rule, innermost branch applied first
                    let mut y = x;
                    let mut der = 1.0;
                    for &a in word.iter().rev() {
                        der *= self.branch_derivative(a, y);
                        y = self.apply_branch(a, y);
                    }
                    sup = sup.max(der.abs());
                }
                // odometer over [1, per_level]^m
                let mut pos = 0;
                while pos < word.len() && word[pos] == per_level {
                    word[pos] = 1;
                    pos += 1;
                }
                if pos == word.len() {
                    break;
                }
                word[pos] += 1;
            }
            last_sup = sup;
            if sup < 1.0 {
                return (Some(m), sup);
            }
        }
        (None, last_sup)
    }
}

/// Continuants `p_n, q_n, p_{n-1}, q_{n-1}` of a digit word, rescaled by
/// `e^{-log_scale}` to stay in range.
struct Continuants {
    p: f64,
    q: f64,
    p_prev: f64,
    q_prev: f64,
    log_scale: f64,
}

impl Continuants {
    fn of(digits: &[u64]) -> Self {
        let (mut p_prev, mut p) = (1.0f64, 0.0f64);
        let (mut q_prev, mut q) = (0.0f64, 1.0f64);
        let mut log_scale = 0.0;
        for &a in digits {
            let a = a as f64;
            let p_next = a * p + p_prev;
            let q_next = a * q + q_prev;
            p_prev = p;
            q_prev = q;
            p = p_next;
            q = q_next;
            if q > 1e150 {
                let s = q;
                p /= s;
                q /= s;
                p_prev /= s;
                q_prev /= s;
                log_scale += s.ln();
            }
        }
        Self { p, q, p_prev, q_prev, log_scale }
    }
}

/// Random pairs of words with lengths in `1..=max_len` and digits in
/// `1..=max_digit`, deterministic in `seed`.
pub fn sample_word_pairs(seed: u64, count: usize, max_len: usize, max_digit: u64) -> Vec<(Word, Word)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(1..=max_len);
        Word((0..len).map(|_| rng.gen_range(1..=max_digit)).collect())
    };
    (0..count).map(|_| (word(&mut rng), word(&mut rng))).collect()
}

/// Smallest and largest distortion ratio over a corpus of word pairs.
pub fn distortion_band<'a>(
    system: &IfsSystem,
    pairs: impl IntoIterator<Item = &'a (Word, Word)>,
) -> Result<(f64, f64)> {
    let mut band = (f64::INFINITY, f64::NEG_INFINITY);
    for (w1, w2) in pairs {
        let r = system.distortion_ratio(w1, w2)?;
        band = (band.0.min(r), band.1.max(r));
    }
    Ok(band)
}
