//! Exclusion process via the graphical construction, with the corner-growth height function.
//!
//! Arrows live on bonds `(x, x+1)`: a left arrow moves a particle `x+1 → x` (a valley of the height
//! at `x` fills, rate `q`), a right arrow moves it `x → x+1` (a hill erodes, rate `p`). Arrow times
//! are a deterministic function of `(seed, replica, site, time block)`, so an environment never
//! depends on the window it is observed through.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::asep_exact::AsepParams;
use crate::error::{invalid, Error, Result};

/// Length of the time blocks that key the arrow streams.
const BLOCK: f64 = 8.0;
const SITE_OFFSET: i64 = 1 << 31;
const MAX_BLOCKS: u64 = 1 << 20;

/// Inclusive site interval `[x_lo, x_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x_lo: i64,
    pub x_hi: i64,
}

impl Window {
    pub fn new(x_lo: i64, x_hi: i64) -> Result<Self> {
        if x_hi <= x_lo {
            return Err(invalid("window must contain at least two sites"));
        }
        if x_lo < -SITE_OFFSET + 1 || x_hi >= SITE_OFFSET {
            return Err(Error::Resource("window exceeds 2^31 sites".into()));
        }
        Ok(Window { x_lo, x_hi })
    }

    /// `[−h, h]`.
    pub fn symmetric(half: i64) -> Result<Self> {
        Window::new(-half, half)
    }

    /// Window insulating observations at `|x| ≤ reach` up to time `t_max`.
    pub fn for_observation(reach: i64, t_max: f64) -> Result<Self> {
        let half = reach.abs() as f64 + 4.0 * t_max + 50.0;
        if half > 1e8 {
            return Err(Error::Resource(format!("window half-width {half}")));
        }
        Window::symmetric(half.ceil() as i64)
    }

    pub fn sites(&self) -> usize {
        (self.x_hi - self.x_lo + 1) as usize
    }

    pub fn contains(&self, x: i64) -> bool {
        (self.x_lo..=self.x_hi).contains(&x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrow {
    pub time: f64,
    pub direction: Direction,
}

/// Keyed generator of the per-bond arrow streams and initial Bernoulli data.
struct StreamKey {
    arrows: ChaCha8Rng,
    coins: ChaCha8Rng,
}

impl StreamKey {
    fn new(seed: u64, replica: u64) -> Self {
        let mut arrows = ChaCha8Rng::seed_from_u64(seed);
        let mut coins = arrows.clone();
        arrows.set_stream(2 * replica);
        coins.set_stream(2 * replica + 1);
        StreamKey { arrows, coins }
    }

    /// Appends the arrows of bond `(x, x+1)` in `[k·B, (k+1)·B)`, in time order.
    fn block(&mut self, x: i64, k: u64, q: f64, out: &mut impl Extend<Arrow>) {
        let site = (x + SITE_OFFSET) as u128;
        let rng = &mut self.arrows;
        rng.set_word_pos((site << 20 | k as u128) << 10);
        let start = k as f64 * BLOCK;
        let mut t = start;
        loop {
            let e: f64 = rng.sample(Exp1);
            t += e;
            if t >= start + BLOCK {
                break;
            }
            let direction = if q >= 1.0 {
                Direction::Left
            } else if q <= 0.0 {
                Direction::Right
            } else if rng.random::<f64>() < q {
                Direction::Left
            } else {
                Direction::Right
            };
            out.extend(std::iter::once(Arrow { time: t, direction }));
        }
    }

    /// Fair coins for the sites of `window`, one 32-bit word per site.
    fn coins(&mut self, window: Window) -> Vec<bool> {
        self.coins.set_word_pos((window.x_lo + SITE_OFFSET) as u128);
        (0..window.sites()).map(|_| self.coins.next_u32() >> 31 == 1).collect()
    }
}

fn check_rates(env_t: f64, p: f64, q: f64) -> Result<()> {
    if !(p >= 0.0 && q >= 0.0 && ((p + q) - 1.0).abs() < 1e-12) {
        return Err(invalid("rates need p, q >= 0 and p + q = 1"));
    }
    if !(env_t > 0.0 && env_t.is_finite()) {
        return Err(invalid("t_max must be positive"));
    }
    if env_t / BLOCK >= MAX_BLOCKS as f64 {
        return Err(Error::Resource(format!("t_max = {env_t} exceeds the stream layout")));
    }
    Ok(())
}

/// Frozen Poisson arrows on every bond of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct AsepEnvironment {
    pub window: Window,
    pub t_max: f64,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    pub replica: u64,
    /// `arrows[b]` belongs to bond `(x_lo + b, x_lo + b + 1)`, sorted by time.
    pub arrows: Vec<Vec<Arrow>>,
}

pub fn build_environment(window: Window, t_max: f64, p: f64, q: f64, seed: u64) -> Result<AsepEnvironment> {
    build_environment_replica(window, t_max, p, q, seed, 0)
}

pub fn build_environment_replica(window: Window, t_max: f64, p: f64, q: f64, seed: u64, replica: u64) -> Result<AsepEnvironment> {
    check_rates(t_max, p, q)?;
    let mut key = StreamKey::new(seed, replica);
    let blocks = (t_max / BLOCK).floor() as u64 + 1;
    let arrows = (window.x_lo..window.x_hi)
        .map(|x| {
            let mut v = Vec::new();
            for k in 0..blocks {
                key.block(x, k, q, &mut v);
            }
            v.retain(|a| a.time <= t_max);
            v
        })
        .collect();
    Ok(AsepEnvironment { window, t_max, p, q, seed, replica, arrows })
}

/// The six initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Wedge,
    Brownian,
    Flat,
    WedgeBrownian,
    WedgeFlat,
    FlatBrownian,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 6] = [
        GeometryKind::Wedge,
        GeometryKind::Brownian,
        GeometryKind::Flat,
        GeometryKind::WedgeBrownian,
        GeometryKind::WedgeFlat,
        GeometryKind::FlatBrownian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GeometryKind::Wedge => "wedge",
            GeometryKind::Brownian => "brownian",
            GeometryKind::Flat => "flat",
            GeometryKind::WedgeBrownian => "wedge_brownian",
            GeometryKind::WedgeFlat => "wedge_flat",
            GeometryKind::FlatBrownian => "flat_brownian",
        }
    }

    fn occupied(&self, x: i64, coin: bool) -> bool {
        let flat = x.rem_euclid(2) == 1;
        match self {
            GeometryKind::Wedge => x > 0,
            GeometryKind::Brownian => coin,
            GeometryKind::Flat => flat,
            GeometryKind::WedgeBrownian => x > 0 && coin,
            GeometryKind::WedgeFlat => x > 0 && flat,
            GeometryKind::FlatBrownian => {
                if x <= 0 {
                    flat
                } else {
                    coin
                }
            }
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        GeometryKind::ALL
            .into_iter()
            .find(|g| g.name() == key)
            .ok_or_else(|| invalid(format!("unknown geometry '{s}'")))
    }
}

/// Occupations, the flux across bond `(0, 1)` and the ordered particle positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub window: Window,
    pub occupation: Vec<bool>,
    /// Net number of particles that crossed from site 1 to site 0.
    pub flux: i64,
    pub time: f64,
    /// Positions of the particles, left to right; the k-th entry is the k-th particle initially.
    pub tagged: Vec<i64>,
}

pub fn init_geometry(kind: GeometryKind, window: Window, seed: u64) -> SimState {
    init_geometry_replica(kind, window, seed, 0)
}

pub fn init_geometry_replica(kind: GeometryKind, window: Window, seed: u64, replica: u64) -> SimState {
    let coins = match kind {
        GeometryKind::Brownian | GeometryKind::WedgeBrownian | GeometryKind::FlatBrownian => {
            StreamKey::new(seed, replica).coins(window)
        }
        _ => vec![false; window.sites()],
    };
    let occupation: Vec<bool> =
        (0..window.sites()).map(|i| kind.occupied(window.x_lo + i as i64, coins[i])).collect();
    let tagged = occupation.iter().enumerate().filter(|(_, &o)| o).map(|(i, _)| window.x_lo + i as i64).collect();
    SimState { window, occupation, flux: 0, time: 0.0, tagged }
}

impl SimState {
    fn bonds(&self) -> usize {
        self.occupation.len() - 1
    }

    /// Direction of the only arrow that acts on bond `b`, if any.
    fn useful(&self, b: usize) -> Option<Direction> {
        match (self.occupation[b], self.occupation[b + 1]) {
            (false, true) => Some(Direction::Left),
            (true, false) => Some(Direction::Right),
            _ => None,
        }
    }

    /// Applies one arrow on bond `b` (window index); returns whether a particle moved.
    pub fn apply_arrow(&mut self, b: usize, direction: Direction) -> bool {
        if b >= self.bonds() || self.useful(b) != Some(direction) {
            return false;
        }
        let x = self.window.x_lo + b as i64;
        let (from, to) = match direction {
            Direction::Left => (x + 1, x),
            Direction::Right => (x, x + 1),
        };
        self.occupation.swap(b, b + 1);
        let k = self.tagged.partition_point(|&y| y < from);
        debug_assert_eq!(self.tagged[k], from);
        self.tagged[k] = to;
        debug_assert!(k == 0 || self.tagged[k - 1] < to);
        debug_assert!(k + 1 == self.tagged.len() || self.tagged[k + 1] > to);
        if x == 0 {
            self.flux += if direction == Direction::Left { 1 } else { -1 };
        }
        true
    }

    fn spin(&self, y: i64) -> i64 {
        if self.occupation[(y - self.window.x_lo) as usize] { 1 } else { -1 }
    }

    /// `h(x) = 2N + Σ_{0<y≤x} η̂(y)` for `x > 0`, `2N − Σ_{x<y≤0} η̂(y)` for `x < 0`.
    pub fn height(&self, x: i64) -> Result<i64> {
        if !self.window.contains(x) || !self.window.contains(0) {
            return Err(invalid(format!("site {x} (or the origin) outside the window")));
        }
        let base = 2 * self.flux;
        Ok(match x.cmp(&0) {
            std::cmp::Ordering::Greater => base + (1..=x).map(|y| self.spin(y)).sum::<i64>(),
            std::cmp::Ordering::Equal => base,
            std::cmp::Ordering::Less => base - (x + 1..=0).map(|y| self.spin(y)).sum::<i64>(),
        })
    }

    /// Heights at every window site.
    pub fn height_profile(&self) -> Result<Vec<i64>> {
        let w = self.window;
        if !(w.x_lo <= 0 && w.x_hi >= 1) {
            return Err(invalid("window must contain sites 0 and 1"));
        }
        let n = w.sites();
        let zero = (-w.x_lo) as usize;
        let mut h = vec![0i64; n];
        h[zero] = 2 * self.flux;
        for i in zero + 1..n {
            h[i] = h[i - 1] + if self.occupation[i] { 1 } else { -1 };
        }
        for i in (0..zero).rev() {
            h[i] = h[i + 1] - if self.occupation[i + 1] { 1 } else { -1 };
        }
        Ok(h)
    }
}

/// Processes the environment's arrows in `(state.time, t_target]` in global time order.
pub fn evolve(state: &SimState, env: &AsepEnvironment, t_target: f64) -> Result<SimState> {
    if env.window != state.window {
        return Err(invalid("state and environment windows differ"));
    }
    if t_target > env.t_max {
        return Err(Error::Resource(format!("environment ends at {} before {t_target}", env.t_max)));
    }
    if t_target < state.time {
        return Err(invalid("cannot evolve backwards in time"));
    }
    let mut events: Vec<(f64, usize, Direction)> = env
        .arrows
        .iter()
        .enumerate()
        .flat_map(|(b, v)| {
            v.iter().filter(|a| a.time > state.time && a.time <= t_target).map(move |a| (a.time, b, a.direction))
        })
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut next = state.clone();
    for (_, b, d) in events {
        next.apply_arrow(b, d);
    }
    next.time = t_target;
    Ok(next)
}

/// Generated but not yet passed arrows of one bond, covering blocks `[.., next_block)`.
#[derive(Default)]
struct BondCache {
    next_block: u64,
    arrows: VecDeque<Arrow>,
}

/// Event-driven replica: only bonds whose arrow can act are scheduled, and their next useful arrow is
/// read from the same keyed streams as [`build_environment_replica`].
pub struct Simulation {
    state: SimState,
    p: f64,
    q: f64,
    horizon: f64,
    key: StreamKey,
    caches: Vec<BondCache>,
    version: Vec<u32>,
    heap: BinaryHeap<Reverse<(u64, u32, u32)>>,
}

impl Simulation {
    pub fn new(kind: GeometryKind, params: &AsepParams, window: Window, horizon: f64, seed: u64, replica: u64) -> Result<Self> {
        Simulation::from_state(init_geometry_replica(kind, window, seed, replica), params.p, params.q, horizon, seed, replica)
    }

    pub fn from_state(state: SimState, p: f64, q: f64, horizon: f64, seed: u64, replica: u64) -> Result<Self> {
        check_rates(horizon, p, q)?;
        let bonds = state.bonds();
        let mut sim = Simulation {
            p,
            q,
            horizon,
            key: StreamKey::new(seed, replica),
            caches: (0..bonds).map(|_| BondCache::default()).collect(),
            version: vec![0; bonds],
            heap: BinaryHeap::new(),
            state,
        };
        for b in 0..bonds {
            sim.schedule(b);
        }
        Ok(sim)
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    /// First arrow of `direction` after `after`; queries per bond never go back in time.
    fn next_arrow(&mut self, b: usize, after: f64, direction: Direction) -> Option<f64> {
        let x = self.state.window.x_lo + b as i64;
        let cache = &mut self.caches[b];
        let k0 = (after / BLOCK).floor() as u64;
        if k0 >= cache.next_block {
            cache.arrows.clear();
            cache.next_block = k0;
        }
        while cache.arrows.front().is_some_and(|a| a.time <= after) {
            cache.arrows.pop_front();
        }
        let mut from = 0;
        loop {
            if let Some(a) = cache.arrows.iter().skip(from).find(|a| a.time > after && a.direction == direction) {
                return (a.time <= self.horizon).then_some(a.time);
            }
            if cache.next_block as f64 * BLOCK > self.horizon {
                return None;
            }
            from = cache.arrows.len();
            self.key.block(x, cache.next_block, self.q, &mut cache.arrows);
            cache.next_block += 1;
        }
    }

    fn schedule(&mut self, b: usize) {
        self.version[b] = self.version[b].wrapping_add(1);
        if let Some(d) = self.state.useful(b) {
            let rate = if d == Direction::Left { self.q } else { self.p };
            if rate <= 0.0 {
                return;
            }
            if let Some(t) = self.next_arrow(b, self.state.time, d) {
                self.heap.push(Reverse((t.to_bits(), b as u32, self.version[b])));
            }
        }
    }

    /// Runs every arrow up to `t_target` (which must not exceed the horizon).
    pub fn advance(&mut self, t_target: f64) -> Result<()> {
        if t_target > self.horizon {
            return Err(Error::Resource(format!("horizon {} is before {t_target}", self.horizon)));
        }
        if t_target < self.state.time {
            return Err(invalid("cannot evolve backwards in time"));
        }
        while let Some(&Reverse((bits, b, v))) = self.heap.peek() {
            let t = f64::from_bits(bits);
            if t > t_target {
                break;
            }
            self.heap.pop();
            let b = b as usize;
            if v != self.version[b] {
                continue;
            }
            let d = self.state.useful(b).expect("scheduled bond must be active");
            self.state.time = t;
            self.state.apply_arrow(b, d);
            for c in b.saturating_sub(1)..(b + 2).min(self.caches.len()) {
                self.schedule(c);
            }
        }
        self.state.time = t_target;
        Ok(())
    }
}

/// Heights `h(t, x)` for each `x` of `sites`, one row per replica, replicas `0..n`.
pub fn sample_heights(kind: GeometryKind, params: &AsepParams, t: f64, sites: &[i64], n: usize, seed: u64) -> Result<Vec<Vec<i64>>> {
    if n == 0 {
        return Err(invalid("need at least one replica"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("time must be nonnegative"));
    }
    let reach = sites.iter().map(|x| x.abs()).max().unwrap_or(0);
    let window = Window::for_observation(reach, t)?;
    let horizon = t.max(1.0);
    let rows: Result<Vec<Vec<i64>>> = crate::par::map_indexed(n, |r| {
        let mut sim = Simulation::new(kind, params, window, horizon, seed, r as u64)?;
        sim.advance(t)?;
        sites.iter().map(|&x| sim.state().height(x)).collect()
    })
    .into_iter()
    .collect();
    rows
}

/// `(h(t/γ, x) − t/2)/(2^{−1/3} t^{1/3})` across replicas, sorted; at `t = 0` the scale is taken as 1.
pub fn empirical_onepoint(kind: GeometryKind, gamma: f64, t: f64, x: i64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let params = AsepParams::from_gamma(gamma)?;
    let rows = sample_heights(kind, &params, t / gamma, &[x], n, seed)?;
    let scale = if t > 0.0 { 2f64.powf(-1.0 / 3.0) * t.cbrt() } else { 1.0 };
    let mut v: Vec<f64> = rows.iter().map(|r| (r[0] as f64 - 0.5 * t) / scale).collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `T(1 + (X/T)²)/2` inside the light cone, `|X|` outside.
pub fn hydrodynamic_limit(t: f64, x: f64) -> f64 {
    if x.abs() <= t {
        0.5 * t * (1.0 + (x / t) * (x / t))
    } else {
        x.abs()
    }
}

/// Mean wedge height `h_γ(t/γ, x)` over replicas for each grid site.
pub fn hydrodynamic_profile(gamma: f64, t: f64, grid: &[i64], n: usize, seed: u64) -> Result<Vec<f64>> {
    if let Some(&x) = grid.iter().find(|&&x| x.abs() as f64 > 1.5 * t) {
        return Err(invalid(format!("grid point {x} is outside [-1.5t, 1.5t]")));
    }
    let params = AsepParams::from_gamma(gamma)?;
    let rows = sample_heights(GeometryKind::Wedge, &params, t / gamma, grid, n, seed)?;
    let mut mean = vec![0.0; grid.len()];
    for row in &rows {
        for (m, &h) in mean.iter_mut().zip(row) {
            *m += h as f64;
        }
    }
    Ok(mean.into_iter().map(|m| m / n as f64).collect())
}

/// Parameters linearizing the dynamics of `e^{−λh}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GartnerParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub p: f64,
    pub q: f64,
    pub lambda_eps: f64,
    pub nu_eps: f64,
    pub d_eps: f64,
}

/// `γ = ε^{1/2}`, `λ = ½log(q/p)`, `ν = p + q − 2√(pq)`, `D = (ε^{1/2}/γ)·2√(pq)`.
pub fn gartner_params(epsilon: f64) -> Result<GartnerParams> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(invalid("epsilon must lie in (0, 1/4)"));
    }
    let gamma = epsilon.sqrt();
    let (p, q) = (0.5 - 0.5 * gamma, 0.5 + 0.5 * gamma);
    let root = (p * q).sqrt();
    // ½log(q/p) = atanh(γ) and p + q − 2√(pq) = (√q − √p)², without cancellation.
    let lambda_eps = gamma.atanh();
    let nu_eps = (gamma / (q.sqrt() + p.sqrt())).powi(2);
    let d_eps = epsilon.sqrt() / gamma * 2.0 * root;
    Ok(GartnerParams { epsilon, gamma, p, q, lambda_eps, nu_eps, d_eps })
}

/// Relative mismatch of `½D_εΔ_εZ = Ω_εZ` (per unit `Z`) for spins `(η̂(x), η̂(x+1))`.
pub fn gartner_identity_check(params: &GartnerParams, spins: (i8, i8)) -> Result<f64> {
    let (a, b) = spins;
    if a.abs() != 1 || b.abs() != 1 {
        return Err(invalid("spins must be ±1"));
    }
    let GartnerParams { epsilon, gamma, p, q, lambda_eps: l, nu_eps: nu, d_eps: d } = *params;
    // e^{−λη̂(x+1)} − 2 + e^{λη̂(x)}
    let bracket = (-l * b as f64).exp_m1() + (l * a as f64).exp_m1();
    let laplace = 0.5 * d * bracket / (epsilon * epsilon);
    let (valley, hill) = (a == -1 && b == 1, a == 1 && b == -1);
    let mut omega = nu;
    if valley {
        omega += (-2.0 * l).exp_m1() * q;
    }
    if hill {
        omega += (2.0 * l).exp_m1() * p;
    }
    omega *= epsilon.powf(-1.5) / gamma;
    let scale = laplace.abs().max(omega.abs());
    Ok(if scale == 0.0 { 0.0 } else { (laplace - omega).abs() / scale })
}

/// `c_ε·exp(−λ_ε h(x) + ν_ε·time)` at `x = X/ε`, with the state's physical time in the exponent.
pub fn hopf_cole(state: &SimState, epsilon: f64, x_macro: f64, c_eps: f64) -> Result<f64> {
    let g = gartner_params(epsilon)?;
    let xf = x_macro / epsilon;
    if (xf - xf.round()).abs() > 1e-9 {
        return Err(invalid("X/epsilon is not a lattice site"));
    }
    let h = state.height(xf.round() as i64)?;
    Ok(c_eps * (-g.lambda_eps * h as f64 + g.nu_eps * state.time).exp())
}
