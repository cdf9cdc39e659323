use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};

use crate::error::{Error, Result};
use crate::geometry::{Cuboid, DirectionalDistribution};

/// Side of the origin along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The hyperplanes orthogonal to axis `k` on one side of the origin that
/// successively become the nearest one as time runs backwards from 1.
///
/// `x_0 ~ Exp(p_k)` and `t_0 ~ U(0,1)`; given `t_n`, the increment
/// `x_{n+1} - x_n` is `Exp(p_k t_n)` and `t_{n+1} ~ U(0, t_n)`.
/// Times are kept as logarithms. Positions are plain `f64` and overflow
/// after roughly 700 steps of a single chain.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisChain {
    axis: usize,
    sign: Sign,
    weight: f64,
    positions: Vec<f64>,
    log_times: Vec<f64>,
}

impl AxisChain {
    fn start<R: Rng + ?Sized>(axis: usize, sign: Sign, weight: f64, rng: &mut R) -> Self {
        let x0: f64 = Exp1.sample(rng);
        let u: f64 = Open01.sample(rng);
        AxisChain {
            axis,
            sign,
            weight,
            positions: vec![x0 / weight],
            log_times: vec![u.ln()],
        }
    }

    fn push<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let last_log_t = *self.log_times.last().expect("chain is never empty");
        let e: f64 = Exp1.sample(rng);
        let u: f64 = Open01.sample(rng);
        let x = *self.positions.last().expect("chain is never empty") + e * (-last_log_t).exp() / self.weight;
        self.positions.push(x);
        self.log_times.push(last_log_t + u.ln());
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `x_0 < x_1 < …`, distances from the origin.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// `ln t_0 > ln t_1 > …`.
    pub fn log_times(&self) -> &[f64] {
        &self.log_times
    }

    pub fn time(&self, n: usize) -> f64 {
        self.log_times[n].exp()
    }
}

/// Samples the first `depth` states of the chain for axis `k`.
pub fn sample_axis_chain<R: Rng + ?Sized>(k: usize, sign: Sign, p_k: f64, depth: usize, rng: &mut R) -> Result<AxisChain> {
    if !(p_k.is_finite() && p_k > 0.0) {
        return Err(Error::InvalidParameter(format!("axis weight {p_k} must be positive")));
    }
    if depth == 0 {
        return Err(Error::InvalidParameter("chain depth must be at least 1".into()));
    }
    let mut chain = AxisChain::start(k, sign, p_k, rng);
    while chain.len() < depth {
        chain.push(rng);
    }
    Ok(chain)
}

/// The zero cells `z̃_(0) ⊂ z̃_(-1) ⊂ …` of the marked Mondrian hyperplane
/// process, read backwards in time.
///
/// Entry `j` corresponds to `i = -j`. The jump times satisfy
/// `1 > t_0 > t_{-1} > …`; box `j` is the zero cell of the hyperplanes
/// born before `s` for every `s` in `(t_{-j}, t_{-j+1}]` (with
/// `t_1 = 1`), and at `t_{-j}` the directed extent named by `labels()[j]`
/// grows.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCellChain {
    weights: Vec<f64>,
    /// Chain `2k` points along `+e_k`, chain `2k+1` along `-e_k`.
    chains: Vec<AxisChain>,
    cursor: Vec<usize>,
    log_times: Vec<f64>,
    labels: Vec<(usize, Sign)>,
    boxes: Vec<Cuboid>,
}

impl ZeroCellChain {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of boxes (and jump times) generated so far.
    pub fn depth(&self) -> usize {
        self.boxes.len()
    }

    /// `z̃_(0), z̃_(-1), …`.
    pub fn boxes(&self) -> &[Cuboid] {
        &self.boxes
    }

    /// `ln t_0, ln t_{-1}, …`.
    pub fn log_times(&self) -> &[f64] {
        &self.log_times
    }

    pub fn time(&self, j: usize) -> f64 {
        self.log_times[j].exp()
    }

    /// Axis and side of the extent that grows at each jump time.
    pub fn labels(&self) -> &[(usize, Sign)] {
        &self.labels
    }

    pub fn axis_chains(&self) -> &[AxisChain] {
        &self.chains
    }

    /// Number of states of each axis chain that have been merged in.
    /// Sums to [`ZeroCellChain::depth`].
    pub fn consumed(&self) -> &[usize] {
        &self.cursor
    }

    fn current_box(&self) -> Result<Cuboid> {
        let d = self.dim();
        let mut lower = Vec::with_capacity(d);
        let mut upper = Vec::with_capacity(d);
        for k in 0..d {
            upper.push(self.chains[2 * k].positions[self.cursor[2 * k]]);
            lower.push(-self.chains[2 * k + 1].positions[self.cursor[2 * k + 1]]);
        }
        Cuboid::new(lower, upper).map_err(|_| {
            Error::LimitReached(format!(
                "zero-cell extents overflowed at depth {}",
                self.boxes.len()
            ))
        })
    }

    /// Extends the chain until it holds `depth` boxes.
    pub fn grow<R: Rng + ?Sized>(&mut self, depth: usize, rng: &mut R) -> Result<()> {
        while self.boxes.len() < depth {
            let bx = self.current_box()?;
            let (c, log_t) = self
                .cursor
                .iter()
                .enumerate()
                .map(|(c, &m)| (c, self.chains[c].log_times[m]))
                .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            self.boxes.push(bx);
            self.log_times.push(log_t);
            self.labels.push((self.chains[c].axis, self.chains[c].sign));
            self.cursor[c] += 1;
            if self.chains[c].len() <= self.cursor[c] {
                self.chains[c].push(rng);
            }
        }
        Ok(())
    }
}

/// Builds `depth` backward zero cells for the Mondrian distribution `phi`
/// from `2d` independent [`AxisChain`]s, extended as needed.
pub fn build_zero_cell_chain<R: Rng + ?Sized>(
    phi: &DirectionalDistribution,
    depth: usize,
    rng: &mut R,
) -> Result<ZeroCellChain> {
    let weights = phi
        .mondrian_weights()
        .ok_or_else(|| Error::Mismatch("the zero-cell chain needs a Mondrian distribution".into()))?
        .to_vec();
    if depth == 0 {
        return Err(Error::InvalidParameter("chain depth must be at least 1".into()));
    }
    let mut chains = Vec::with_capacity(2 * weights.len());
    for (k, &p) in weights.iter().enumerate() {
        if !(p > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "axis {k} has weight 0, so its zero-cell extent is infinite"
            )));
        }
        chains.push(AxisChain::start(k, Sign::Plus, p, rng));
        chains.push(AxisChain::start(k, Sign::Minus, p, rng));
    }
    let mut chain = ZeroCellChain {
        cursor: vec![0; chains.len()],
        weights,
        chains,
        log_times: Vec::new(),
        labels: Vec::new(),
        boxes: Vec::new(),
    };
    chain.grow(depth, rng)?;
    Ok(chain)
}
