//! Seven-node pneumatic graph and its RK4 integrator.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::valve::ValveState;
use crate::{CHAMBERS, DT, GAS_TEMPERATURE, P_ATM, R_SPECIFIC, SOURCE_VACUUM};

pub const PLENUM: usize = 0;
pub const AMBIENT: usize = 5;
pub const SOURCE: usize = 6;
/// Nodes whose pressure evolves: plenum and the four chambers.
pub const INTERNAL: usize = 5;
pub const NODES: usize = 7;

/// Node index of chamber `k` (0-based).
pub const fn chamber_node(k: usize) -> usize {
    1 + k
}

/// Largest pressure change tolerated in one integrator step.
pub const MAX_STEP_DELTA: f64 = 5_000.0;

/// Below this pressure difference the orifice law blends into a linear
/// (laminar) characteristic so the flow stays Lipschitz at zero.
pub const LAMINAR_TRANSITION_PA: f64 = 100.0;

/// Mass flow (kg/s) through an orifice of coefficient `g` from `p_from` to
/// `p_to`: `g · sign(Δp) · sqrt(|Δp|)`.
pub fn mass_flow(g: f64, p_from: f64, p_to: f64) -> f64 {
    let dp = p_from - p_to;
    if dp == 0.0 {
        return 0.0;
    }
    g * dp.signum() * dp.abs().sqrt()
}

/// The orifice law as integrated: rounded inside a ±`laminar` band so the
/// right-hand side of the mass balance stays Lipschitz at Δp = 0. Outside the
/// band the relative deviation from [`mass_flow`] is below `(laminar/Δp)²/4`.
#[inline]
pub(crate) fn orifice_flow(g: f64, dp: f64, laminar: f64) -> f64 {
    if dp == 0.0 {
        return 0.0;
    }
    g * dp / (dp * dp + laminar * laminar).sqrt().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeLabel {
    Plenum,
    Chamber(u8),
    Ambient,
    Source,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasNode {
    pub label: NodeLabel,
    /// Absolute pressure (Pa).
    pub pressure: f64,
    /// m³; infinite for the boundary nodes.
    pub volume: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    Neck,
    WallCrosstalk,
    LipLeak,
    Tube,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conductance {
    pub from: usize,
    pub to: usize,
    /// kg·s⁻¹·Pa⁻½
    pub g: f64,
    pub kind: EdgeKind,
}

impl Conductance {
    pub fn flow(&self, pressures: &[f64; NODES]) -> f64 {
        mass_flow(self.g, pressures[self.from], pressures[self.to])
    }
}

/// Geometry and conductances of the cup. Defaults are calibration outputs
/// (see [`crate::calibrate`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CupConfig {
    /// Volume of each chamber including its sensor tubing (m³).
    pub chamber_volume: f64,
    /// Plenum volume including the vacuum hose (m³).
    pub plenum_volume: f64,
    /// Chamber↔plenum neck conductance, one per chamber.
    pub neck_g: [f64; CHAMBERS],
    /// Conductance through the wall between adjacent chambers.
    pub crosstalk_g: f64,
    /// Plenum↔ejector conductance with the valve open.
    pub tube_g: f64,
    /// Plenum↔atmosphere conductance through the idle ejector (valve shut).
    pub vent_g: f64,
    /// Ejector vacuum with the valve fully open (Pa below ambient).
    pub source_vacuum: f64,
    /// Orifice-law laminar transition (Pa).
    pub laminar_transition: f64,
}

impl Default for CupConfig {
    fn default() -> Self {
        let cal = crate::calibrate::DEFAULT_CALIBRATION;
        Self {
            chamber_volume: 6.0e-6,
            plenum_volume: 2.0e-5,
            neck_g: [cal.neck_g; CHAMBERS],
            crosstalk_g: cal.neck_g * crate::calibrate::CROSSTALK_TO_NECK,
            tube_g: crate::calibrate::TUBE_G,
            vent_g: cal.vent_g,
            source_vacuum: SOURCE_VACUUM,
            laminar_transition: LAMINAR_TRANSITION_PA,
        }
    }
}

/// Lumped pneumatic graph with its current node pressures.
#[derive(Clone, Debug)]
pub struct CupNetwork {
    pub nodes: [GasNode; NODES],
    pub edges: Vec<Conductance>,
    config: CupConfig,
    rt: f64,
    time: f64,
    /// Idle-ejector vent conductance at the current valve opening.
    vent: f64,
}

/// Edge positions inside [`CupNetwork::edges`].
mod layout {
    use super::CHAMBERS;
    pub const NECK: usize = 0;
    pub const LIP: usize = NECK + CHAMBERS;
    pub const CROSSTALK: usize = LIP + CHAMBERS;
    pub const TUBE: usize = CROSSTALK + CHAMBERS;
    pub const COUNT: usize = TUBE + 1;
}

fn check_finite_nonneg(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(SimError::Config(format!("{name} must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(SimError::Config(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

/// Build the seven-node network: 4 neck edges, 4 lip-leak edges (initially
/// closed), 4 crosstalk edges between adjacent chambers and 1 valve-gated
/// tube edge. Every chamber must reach the plenum through necks or walls.
pub fn build_network(config: &CupConfig) -> Result<CupNetwork> {
    check_positive("chamber_volume", config.chamber_volume)?;
    check_positive("plenum_volume", config.plenum_volume)?;
    check_positive("tube_g", config.tube_g)?;
    check_positive("source_vacuum", config.source_vacuum)?;
    check_positive("laminar_transition", config.laminar_transition)?;
    if config.source_vacuum >= P_ATM {
        return Err(SimError::Config("source vacuum exceeds ambient pressure".into()));
    }
    for (k, g) in config.neck_g.iter().enumerate() {
        check_finite_nonneg(&format!("neck_g[{k}]"), *g)?;
    }
    check_finite_nonneg("crosstalk_g", config.crosstalk_g)?;
    check_finite_nonneg("vent_g", config.vent_g)?;

    let mut nodes = [GasNode { label: NodeLabel::Plenum, pressure: P_ATM, volume: config.plenum_volume }; NODES];
    for k in 0..CHAMBERS {
        nodes[chamber_node(k)] =
            GasNode { label: NodeLabel::Chamber(k as u8 + 1), pressure: P_ATM, volume: config.chamber_volume };
    }
    nodes[AMBIENT] = GasNode { label: NodeLabel::Ambient, pressure: P_ATM, volume: f64::INFINITY };
    nodes[SOURCE] = GasNode { label: NodeLabel::Source, pressure: P_ATM, volume: f64::INFINITY };

    let mut edges = Vec::with_capacity(layout::COUNT);
    for k in 0..CHAMBERS {
        edges.push(Conductance { from: chamber_node(k), to: PLENUM, g: config.neck_g[k], kind: EdgeKind::Neck });
    }
    for k in 0..CHAMBERS {
        edges.push(Conductance { from: AMBIENT, to: chamber_node(k), g: 0.0, kind: EdgeKind::LipLeak });
    }
    for k in 0..CHAMBERS {
        let next = (k + 1) % CHAMBERS;
        edges.push(Conductance {
            from: chamber_node(k),
            to: chamber_node(next),
            g: config.crosstalk_g,
            kind: EdgeKind::WallCrosstalk,
        });
    }
    edges.push(Conductance { from: PLENUM, to: SOURCE, g: config.tube_g, kind: EdgeKind::Tube });

    // Each chamber must be evacuable through necks or walls.
    let mut reached = [false; INTERNAL];
    reached[PLENUM] = true;
    loop {
        let mut grew = false;
        for e in &edges {
            if e.g <= 0.0 || !matches!(e.kind, EdgeKind::Neck | EdgeKind::WallCrosstalk) {
                continue;
            }
            let (a, b) = (e.from, e.to);
            if reached[a] != reached[b] {
                reached[a] = true;
                reached[b] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    if let Some(k) = (0..CHAMBERS).find(|&k| !reached[chamber_node(k)]) {
        return Err(SimError::Disconnected(format!("chamber {} cannot reach the plenum", k + 1)));
    }

    Ok(CupNetwork { nodes, edges, config: config.clone(), rt: R_SPECIFIC * GAS_TEMPERATURE, time: 0.0, vent: config.vent_g })
}

/// Result of [`CupNetwork::steady_state`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    /// Chamber vacuum pressures `P_atm − P_chamber` (Pa).
    pub chamber_vac: [f64; CHAMBERS],
    /// Plenum vacuum (Pa).
    pub plenum_vac: f64,
    /// Net mass inflow into all internal nodes (kg/s).
    pub mass_residual: f64,
    /// Simulated time needed to converge (s).
    pub time: f64,
}

impl CupNetwork {
    pub fn config(&self) -> &CupConfig {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn edge_count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn pressures(&self) -> [f64; NODES] {
        self.nodes.map(|n| n.pressure)
    }

    pub fn chamber_vacuum(&self) -> [f64; CHAMBERS] {
        std::array::from_fn(|k| P_ATM - self.nodes[chamber_node(k)].pressure)
    }

    pub fn plenum_vacuum(&self) -> f64 {
        P_ATM - self.nodes[PLENUM].pressure
    }

    /// Set every internal node to the same vacuum.
    pub fn set_uniform_vacuum(&mut self, vac: f64) {
        for n in &mut self.nodes[..INTERNAL] {
            n.pressure = P_ATM - vac;
        }
    }

    fn internal_state(&self) -> [f64; INTERNAL] {
        std::array::from_fn(|i| self.nodes[i].pressure)
    }

    /// Apply the lip leaks and valve opening to the time-varying edges and
    /// the ejector port pressure.
    fn apply_boundary(&mut self, valve_open: f64, leaks: &[f64; CHAMBERS]) {
        for (k, &g) in leaks.iter().enumerate() {
            self.edges[layout::LIP + k].g = g;
        }
        let u = valve_open.clamp(0.0, 1.0);
        self.edges[layout::TUBE].g = self.config.tube_g * u;
        self.vent = self.config.vent_g * (1.0 - u);
        self.nodes[SOURCE].pressure = P_ATM - self.config.source_vacuum * u;
    }

    /// Per-node net mass inflow (kg/s) for the given internal pressures.
    pub fn node_inflows(&self, state: &[f64; INTERNAL]) -> [f64; INTERNAL] {
        let lam = self.config.laminar_transition;
        let p_amb = self.nodes[AMBIENT].pressure;
        let p_src = self.nodes[SOURCE].pressure;
        let e = &self.edges;

        let neck: [f64; CHAMBERS] =
            std::array::from_fn(|k| orifice_flow(e[layout::NECK + k].g, state[1 + k] - state[PLENUM], lam));
        let lip: [f64; CHAMBERS] =
            std::array::from_fn(|k| orifice_flow(e[layout::LIP + k].g, p_amb - state[1 + k], lam));
        // wall[k]: flow from chamber k into chamber k+1.
        let wall: [f64; CHAMBERS] = std::array::from_fn(|k| {
            orifice_flow(e[layout::CROSSTALK + k].g, state[1 + k] - state[1 + (k + 1) % CHAMBERS], lam)
        });
        let tube = orifice_flow(e[layout::TUBE].g, state[PLENUM] - p_src, lam)
            + orifice_flow(self.vent, state[PLENUM] - p_amb, lam);

        let mut inflow = [0.0; INTERNAL];
        // Paired sums keep the left/right mirror (1↔4, 2↔3) bit-exact.
        inflow[PLENUM] = ((neck[0] + neck[3]) + (neck[1] + neck[2])) - tube;
        for k in 0..CHAMBERS {
            let prev = (k + CHAMBERS - 1) % CHAMBERS;
            inflow[1 + k] = (lip[k] - neck[k]) + (wall[prev] - wall[k]);
        }
        inflow
    }

    /// Flow through `edge` under the integrated (rounded) orifice law. The
    /// tube edge also carries the idle-ejector vent to ambient.
    pub fn edge_flow(&self, edge: &Conductance, pressures: &[f64; NODES]) -> f64 {
        let lam = self.config.laminar_transition;
        let f = orifice_flow(edge.g, pressures[edge.from] - pressures[edge.to], lam);
        if edge.kind == EdgeKind::Tube {
            f + orifice_flow(self.vent, pressures[edge.from] - pressures[AMBIENT], lam)
        } else {
            f
        }
    }

    /// dP/dt for every internal node (Pa/s).
    pub fn derivative(&self, state: &[f64; INTERNAL]) -> [f64; INTERNAL] {
        let inflow = self.node_inflows(state);
        std::array::from_fn(|i| self.rt / self.nodes[i].volume * inflow[i])
    }

    /// Advance one RK4 step of length `dt` with the valve opening and lip
    /// leaks held constant across the step.
    pub fn step(&mut self, valve: &ValveState, leaks: &[f64; CHAMBERS], dt: f64) -> Result<()> {
        self.step_with_opening(valve.open_fraction, leaks, dt)
    }

    pub fn step_with_opening(&mut self, valve_open: f64, leaks: &[f64; CHAMBERS], dt: f64) -> Result<()> {
        if leaks.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(SimError::Scenario(format!("negative or non-finite leak conductance {leaks:?}")));
        }
        self.apply_boundary(valve_open, leaks);
        let y = self.internal_state();
        let k1 = self.derivative(&y);
        let y2 = std::array::from_fn(|i| y[i] + 0.5 * dt * k1[i]);
        let k2 = self.derivative(&y2);
        let y3 = std::array::from_fn(|i| y[i] + 0.5 * dt * k2[i]);
        let k3 = self.derivative(&y3);
        let y4 = std::array::from_fn(|i| y[i] + dt * k3[i]);
        let k4 = self.derivative(&y4);
        for i in 0..INTERNAL {
            let delta = dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !delta.is_finite() || delta.abs() > MAX_STEP_DELTA {
                return Err(SimError::Unstable { time: self.time, node: i, delta });
            }
            self.nodes[i].pressure = y[i] + delta;
        }
        self.time += dt;
        Ok(())
    }

    /// Solve the algebraic flow balance directly with damped Newton
    /// iterations (finite-difference Jacobian). Leaves the network at the
    /// solution. Used where only the equilibrium matters.
    pub fn solve_equilibrium(&mut self, valve_open: f64, leaks: &[f64; CHAMBERS]) -> Result<SteadyState> {
        self.apply_boundary(valve_open, leaks);
        let mut x = self.internal_state();
        let norm = |f: &[f64; INTERNAL]| f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut f = self.node_inflows(&x);
        for _ in 0..200 {
            if norm(&f) < 1e-13 {
                break;
            }
            let mut jac = [[0.0; INTERNAL]; INTERNAL];
            for j in 0..INTERNAL {
                let h = 1e-3;
                let mut xp = x;
                xp[j] += h;
                let mut xm = x;
                xm[j] -= h;
                let fp = self.node_inflows(&xp);
                let fm = self.node_inflows(&xm);
                for i in 0..INTERNAL {
                    jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
                }
            }
            let dx = solve_dense(jac, f.map(|v| -v))
                .ok_or_else(|| SimError::NotConverged { time: 0.0, residual: norm(&f) })?;
            // Backtrack until the residual drops.
            let mut lambda = 1.0;
            loop {
                let trial: [f64; INTERNAL] = std::array::from_fn(|i| (x[i] + lambda * dx[i]).max(1.0));
                let ft = self.node_inflows(&trial);
                if norm(&ft) < norm(&f) || lambda < 1e-6 {
                    x = trial;
                    f = ft;
                    break;
                }
                lambda *= 0.5;
            }
        }
        let d = self.derivative(&x);
        let residual = norm(&d);
        if residual >= 0.1 {
            return Err(SimError::NotConverged { time: 0.0, residual });
        }
        for (i, p) in x.iter().enumerate() {
            self.nodes[i].pressure = *p;
        }
        Ok(SteadyState {
            chamber_vac: self.chamber_vacuum(),
            plenum_vac: self.plenum_vacuum(),
            mass_residual: f.iter().sum(),
            time: 0.0,
        })
    }

    /// Integrate with constant valve opening and leaks until every internal
    /// node satisfies |dP/dt| < 0.1 Pa/s, or fail after 10 s simulated.
    pub fn steady_state(&mut self, valve_open: f64, leaks: &[f64; CHAMBERS]) -> Result<SteadyState> {
        const TOL: f64 = 0.1;
        const MAX_TIME: f64 = 10.0;
        let max_steps = (MAX_TIME / DT).round() as usize;
        self.apply_boundary(valve_open, leaks);
        let mut residual = f64::INFINITY;
        for step in 0..=max_steps {
            // Checking every 10 steps keeps the convergence test cheap.
            if step % 10 == 0 {
                let d = self.derivative(&self.internal_state());
                residual = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if residual < TOL {
                    let inflow = self.node_inflows(&self.internal_state());
                    return Ok(SteadyState {
                        chamber_vac: self.chamber_vacuum(),
                        plenum_vac: self.plenum_vacuum(),
                        mass_residual: inflow.iter().sum(),
                        time: step as f64 * DT,
                    });
                }
            }
            if step < max_steps {
                self.step_with_opening(valve_open, leaks, DT)?;
            }
        }
        Err(SimError::NotConverged { time: MAX_TIME, residual })
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: [[f64; INTERNAL]; INTERNAL], mut b: [f64; INTERNAL]) -> Option<[f64; INTERNAL]> {
    for c in 0..INTERNAL {
        let p = (c..INTERNAL).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..INTERNAL {
            let f = a[r][c] / a[c][c];
            for k in c..INTERNAL {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; INTERNAL];
    for r in (0..INTERNAL).rev() {
        let s: f64 = (r + 1..INTERNAL).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn net() -> CupNetwork {
        build_network(&CupConfig::default()).unwrap()
    }

    #[test]
    fn default_topology() {
        let n = net();
        assert_eq!(n.nodes.len(), 7);
        assert_eq!(n.edge_count(EdgeKind::Neck), 4);
        assert_eq!(n.edge_count(EdgeKind::LipLeak), 4);
        assert_eq!(n.edge_count(EdgeKind::WallCrosstalk), 4);
        assert_eq!(n.edge_count(EdgeKind::Tube), 1);
    }

    #[test]
    fn rejects_zero_volume() {
        let cfg = CupConfig { chamber_volume: 0.0, ..CupConfig::default() };
        assert!(matches!(build_network(&cfg), Err(SimError::Config(_))));
        let cfg = CupConfig { plenum_volume: -1.0, ..CupConfig::default() };
        assert!(build_network(&cfg).is_err());
    }

    #[test]
    fn rejects_negative_conductance() {
        let cfg = CupConfig { crosstalk_g: -1e-9, ..CupConfig::default() };
        assert!(build_network(&cfg).is_err());
        let cfg = CupConfig { tube_g: 0.0, ..CupConfig::default() };
        assert!(build_network(&cfg).is_err());
    }

    #[test]
    fn zero_crosstalk_is_valid() {
        let cfg = CupConfig { crosstalk_g: 0.0, ..CupConfig::default() };
        let n = build_network(&cfg).unwrap();
        assert!(n.edges.iter().filter(|e| e.kind == EdgeKind::WallCrosstalk).all(|e| e.g == 0.0));
    }

    #[test]
    fn isolated_chamber_is_disconnected() {
        let mut cfg = CupConfig { crosstalk_g: 0.0, ..CupConfig::default() };
        cfg.neck_g[2] = 0.0;
        assert!(matches!(build_network(&cfg), Err(SimError::Disconnected(_))));
        // A blocked neck is fine while the walls still leak.
        let mut cfg = CupConfig::default();
        cfg.neck_g[2] = 0.0;
        assert!(build_network(&cfg).is_ok());
    }

    #[test]
    fn mass_flow_examples() {
        assert_eq!(mass_flow(1e-6, 101_325.0, 101_325.0), 0.0);
        let f = mass_flow(1e-6, 101_325.0, 100_325.0);
        assert!((f - 3.162e-5).abs() < 0.001e-5, "{f}");
        assert!((f - 1e-6 * 1000f64.sqrt()).abs() / f < 1e-4);
    }

    proptest! {
        #[test]
        fn mass_flow_antisymmetric(a in 1.0e3f64..2.0e5, b in 1.0e3f64..2.0e5, g in 0.0f64..1e-5) {
            prop_assert_eq!(mass_flow(g, a, b), -mass_flow(g, b, a));
        }

        #[test]
        fn mass_flow_monotone_in_dp(a in 1.0e3f64..1.0e5, d1 in -5.0e4f64..5.0e4, d2 in -5.0e4f64..5.0e4) {
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(mass_flow(1e-7, a + lo, a) <= mass_flow(1e-7, a + hi, a));
        }
    }

    #[test]
    fn mass_flow_thousand_random_pairs_antisymmetric() {
        use rand::Rng;
        let mut rng = crate::rng::rng_for(11, 0);
        for _ in 0..1000 {
            let a: f64 = rng.random_range(1.0e4..1.2e5);
            let b: f64 = rng.random_range(1.0e4..1.2e5);
            assert_eq!(mass_flow(1e-6, a, b), -mass_flow(1e-6, b, a));
        }
    }

    #[test]
    fn mass_conservation_per_node() {
        let mut n = net();
        n.set_uniform_vacuum(40_000.0);
        n.nodes[chamber_node(1)].pressure += 900.0;
        n.apply_boundary(0.7, &[1e-8, 3e-8, 0.0, 2e-7]);
        let state = n.internal_state();
        let p = {
            let mut p = n.pressures();
            p[..INTERNAL].copy_from_slice(&state);
            p
        };
        let d = n.derivative(&state);
        for i in 0..INTERNAL {
            let mut inflow = 0.0;
            for e in &n.edges {
                let f = n.edge_flow(e, &p);
                if e.to == i {
                    inflow += f;
                }
                if e.from == i {
                    inflow -= f;
                }
            }
            let from_derivative = d[i] * n.nodes[i].volume / n.rt;
            assert!((inflow - from_derivative).abs() < 1e-12, "node {i}: {inflow} vs {from_derivative}");
        }
    }

    #[test]
    fn equilibrium_matches_integration() {
        let leaks = [2e-8, 1e-8, 0.0, 5e-8];
        let mut a = net();
        a.set_uniform_vacuum(70_000.0);
        let sa = a.steady_state(1.0, &leaks).unwrap();
        let mut b = net();
        b.set_uniform_vacuum(70_000.0);
        let sb = b.solve_equilibrium(1.0, &leaks).unwrap();
        for k in 0..CHAMBERS {
            assert!((sa.chamber_vac[k] - sb.chamber_vac[k]).abs() < 1.0, "{sa:?} {sb:?}");
        }
    }

    #[test]
    fn sealed_cup_reaches_source_vacuum() {
        let mut n = net();
        let s = n.steady_state(1.0, &[0.0; 4]).unwrap();
        for v in s.chamber_vac {
            assert!((v - SOURCE_VACUUM).abs() < 1.0, "{v}");
        }
        assert!(s.mass_residual.abs() < 1e-9);
    }

    #[test]
    fn closed_valve_with_leaks_returns_to_ambient() {
        let mut n = net();
        n.set_uniform_vacuum(60_000.0);
        let s = n.steady_state(0.0, &[5e-7; 4]).unwrap();
        for v in s.chamber_vac {
            assert!(v.abs() < 1.0, "{v}");
        }
    }

    #[test]
    fn symmetric_leaks_equal_pressures() {
        let mut n = net();
        let s = n.steady_state(1.0, &[4e-8; 4]).unwrap();
        let max = s.chamber_vac.iter().cloned().fold(f64::MIN, f64::max);
        let min = s.chamber_vac.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max - min < 0.01, "{:?}", s.chamber_vac);
        assert!(s.mass_residual.abs() < 1e-9);
    }

    #[test]
    fn oversized_step_is_flagged() {
        let mut n = net();
        let err = n.step_with_opening(1.0, &[0.0; 4], 0.05).unwrap_err();
        assert!(matches!(err, SimError::Unstable { .. }));
    }

    #[test]
    fn boundary_pressures_untouched_by_step() {
        let mut n = net();
        for _ in 0..100 {
            n.step_with_opening(1.0, &[1e-8; 4], DT).unwrap();
        }
        assert_eq!(n.nodes[AMBIENT].pressure, P_ATM);
        assert!(n.nodes[SOURCE].pressure >= P_ATM - SOURCE_VACUUM);
        assert!(n.nodes.iter().all(|x| x.pressure > 0.0));
    }
}
