//! Selfish routing on small networks with affine link latencies, where
//! adding a link can slow everyone down.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::linalg;

/// Most origin-destination routes the path enumerator accepts.
pub const MAX_ROUTES: usize = 5;

/// Slack for KKT feasibility checks on flows and latencies.
const KKT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: String,
    pub to: String,
    /// Latency is `constant + slope · flow`.
    pub constant: f64,
    pub slope: f64,
    #[serde(default)]
    pub shortcut: bool,
}

impl Link {
    pub fn new(from: &str, to: &str, constant: f64, slope: f64) -> Self {
        Link {
            from: from.into(),
            to: to.into(),
            constant,
            slope,
            shortcut: false,
        }
    }

    pub fn latency(&self, flow: f64) -> f64 {
        self.constant + self.slope * flow
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingNetwork {
    pub nodes: Vec<String>,
    pub links: Vec<Link>,
    pub origin: String,
    pub destination: String,
    pub demand: f64,
}

impl RoutingNetwork {
    /// Four nodes, two congestible and two fixed links, and a free shortcut
    /// between the middle nodes.
    pub fn classic(demand: f64) -> Self {
        let mut shortcut = Link::new("a", "b", 0.0, 0.0);
        shortcut.shortcut = true;
        RoutingNetwork {
            nodes: ["s", "a", "b", "t"].iter().map(|s| s.to_string()).collect(),
            links: vec![
                Link::new("s", "a", 0.0, 0.01),
                Link::new("a", "t", 45.0, 0.0),
                Link::new("s", "b", 45.0, 0.0),
                Link::new("b", "t", 0.0, 0.01),
                shortcut,
            ],
            origin: "s".into(),
            destination: "t".into(),
            demand,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let known = |n: &String| self.nodes.contains(n);
        if !(self.demand > 0.0 && self.demand.is_finite()) {
            return Err(Error::InvalidNetwork("demand must be positive".into()));
        }
        if !known(&self.origin) || !known(&self.destination) || self.origin == self.destination {
            return Err(Error::InvalidNetwork("origin and destination must be distinct nodes".into()));
        }
        for l in &self.links {
            if !known(&l.from) || !known(&l.to) {
                return Err(Error::InvalidNetwork(format!("link {}->{} names an unknown node", l.from, l.to)));
            }
            if !(l.constant >= 0.0 && l.slope >= 0.0 && l.constant.is_finite() && l.slope.is_finite()) {
                return Err(Error::InvalidNetwork(format!(
                    "link {}->{} needs finite nonnegative latency coefficients",
                    l.from, l.to
                )));
            }
        }
        Ok(())
    }

    /// The same network with every shortcut link removed.
    pub fn without_shortcuts(&self) -> Self {
        RoutingNetwork {
            links: self.links.iter().filter(|l| !l.shortcut).cloned().collect(),
            ..self.clone()
        }
    }

    /// Simple origin-destination paths as link index lists.
    pub fn routes(&self) -> Result<Vec<Vec<usize>>> {
        self.validate()?;
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut visited = vec![self.origin.clone()];
        self.extend(&self.origin, &mut path, &mut visited, &mut out)?;
        if out.is_empty() {
            return Err(Error::InvalidNetwork("destination is unreachable".into()));
        }
        Ok(out)
    }

    fn extend(
        &self,
        at: &str,
        path: &mut Vec<usize>,
        visited: &mut Vec<String>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if at == self.destination {
            if out.len() == MAX_ROUTES {
                return Err(Error::EnumerationCapExceeded {
                    count: MAX_ROUTES + 1,
                    cap: MAX_ROUTES,
                });
            }
            out.push(path.clone());
            return Ok(());
        }
        for (i, l) in self.links.iter().enumerate() {
            if l.from == at && !visited.contains(&l.to) {
                path.push(i);
                visited.push(l.to.clone());
                self.extend(&l.to, path, visited, out)?;
                visited.pop();
                path.pop();
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteFlow {
    /// Node sequence from origin to destination.
    pub nodes: Vec<String>,
    pub links: Vec<usize>,
    pub flow: f64,
    pub latency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WardropEquilibrium {
    pub routes: Vec<RouteFlow>,
    /// Common latency of the used routes.
    pub time: f64,
}

fn link_flows(net: &RoutingNetwork, routes: &[Vec<usize>], flows: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; net.links.len()];
    for (r, f) in routes.iter().zip(flows) {
        for &l in r {
            x[l] += f;
        }
    }
    x
}

fn route_latencies(net: &RoutingNetwork, routes: &[Vec<usize>], flows: &[f64]) -> Vec<f64> {
    let x = link_flows(net, routes, flows);
    routes
        .iter()
        .map(|r| r.iter().map(|&l| net.links[l].latency(x[l])).sum())
        .collect()
}

/// Solve the KKT system of the Beckmann program on one support set: equal
/// latency `t` on every used route and flows summing to the demand.
fn solve_support(net: &RoutingNetwork, routes: &[Vec<usize>], support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (i, &p) in support.iter().enumerate() {
        for (j, &q) in support.iter().enumerate() {
            a[i][j] = routes[p]
                .iter()
                .filter(|l| routes[q].contains(l))
                .map(|&l| net.links[l].slope)
                .sum();
        }
        a[i][k] = -1.0;
        b[i] = -routes[p].iter().map(|&l| net.links[l].constant).sum::<f64>();
    }
    for slot in a[k].iter_mut().take(k) {
        *slot = 1.0;
    }
    b[k] = net.demand;
    let sol = linalg::solve(a, b)?;
    let mut flows = vec![0.0; routes.len()];
    for (i, &p) in support.iter().enumerate() {
        if sol[i] < -KKT_TOL * net.demand.max(1.0) {
            return None;
        }
        flows[p] = sol[i].max(0.0);
    }
    let lat = route_latencies(net, routes, &flows);
    let t = support.iter().map(|&p| lat[p]).fold(f64::INFINITY, f64::min);
    let tol = KKT_TOL * t.abs().max(1.0);
    if lat.iter().all(|&l| l >= t - tol) && support.iter().all(|&p| lat[p] <= t + tol) {
        Some(flows)
    } else {
        None
    }
}

/// User equilibrium by trying every route support in increasing size.
pub fn wardrop_equilibrium(net: &RoutingNetwork) -> Result<WardropEquilibrium> {
    let routes = net.routes()?;
    let n = routes.len();
    let mut supports: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    supports.sort_by_key(|s| s.len());
    let flows = supports
        .iter()
        .find_map(|s| solve_support(net, &routes, s))
        .ok_or_else(|| Error::InvalidNetwork("no route support satisfies the equilibrium conditions".into()))?;
    let lat = route_latencies(net, &routes, &flows);
    let time = (0..n)
        .filter(|&i| flows[i] > 0.0)
        .map(|i| lat[i])
        .fold(f64::INFINITY, f64::min);
    let routes = routes
        .into_iter()
        .enumerate()
        .map(|(i, links)| {
            let mut nodes = vec![net.origin.clone()];
            nodes.extend(links.iter().map(|&l| net.links[l].to.clone()));
            RouteFlow {
                nodes,
                links,
                flow: flows[i],
                latency: lat[i],
            }
        })
        .collect();
    Ok(WardropEquilibrium { routes, time })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WardropCertificate {
    /// Spread of latencies across the used routes.
    pub used_gap: f64,
    /// How far the slowest used route exceeds the fastest unused one (0 if not).
    pub unused_violation: f64,
    pub conservation_error: f64,
}

impl WardropCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.used_gap <= tol && self.unused_violation <= tol && self.conservation_error <= tol
    }
}

/// Re-measure the equilibrium conditions from scratch at the returned flows.
pub fn wardrop_certificate(net: &RoutingNetwork, eq: &WardropEquilibrium) -> WardropCertificate {
    let routes: Vec<Vec<usize>> = eq.routes.iter().map(|r| r.links.clone()).collect();
    let flows: Vec<f64> = eq.routes.iter().map(|r| r.flow).collect();
    let lat = route_latencies(net, &routes, &flows);
    let (mut used_max, mut used_min, mut unused_min) = (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY);
    for (l, f) in lat.iter().zip(&flows) {
        if *f > 0.0 {
            used_max = used_max.max(*l);
            used_min = used_min.min(*l);
        } else {
            unused_min = unused_min.min(*l);
        }
    }
    WardropCertificate {
        used_gap: used_max - used_min,
        unused_violation: (used_max - unused_min).max(0.0),
        conservation_error: (flows.iter().sum::<f64>() - net.demand).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BraessOutcome {
    pub time_without: f64,
    pub time_with: f64,
    /// `time_with − time_without`; positive means the shortcut hurts.
    pub delta: f64,
}

pub fn braess_delta(net: &RoutingNetwork) -> Result<BraessOutcome> {
    if !net.links.iter().any(|l| l.shortcut) {
        return Err(Error::InvalidNetwork("no link is flagged as a shortcut".into()));
    }
    let time_with = wardrop_equilibrium(net)?.time;
    let time_without = wardrop_equilibrium(&net.without_shortcuts())?.time;
    Ok(BraessOutcome {
        time_without,
        time_with,
        delta: time_with - time_without,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_without_shortcut_splits_evenly() {
        let eq = wardrop_equilibrium(&RoutingNetwork::classic(4000.0).without_shortcuts()).unwrap();
        assert_eq!(eq.routes.len(), 2);
        for r in &eq.routes {
            assert!((r.flow - 2000.0).abs() < 1e-9);
        }
        assert!((eq.time - 65.0).abs() < 1e-9);
    }

    #[test]
    fn single_route_takes_everything() {
        let net = RoutingNetwork {
            nodes: vec!["o".into(), "d".into()],
            links: vec![Link::new("o", "d", 3.0, 0.5)],
            origin: "o".into(),
            destination: "d".into(),
            demand: 10.0,
        };
        let eq = wardrop_equilibrium(&net).unwrap();
        assert_eq!(eq.routes[0].flow, 10.0);
        assert!((eq.time - 8.0).abs() < 1e-12);
    }

    #[test]
    fn expensive_shortcut_is_unused() {
        let mut net = RoutingNetwork::classic(4000.0);
        net.links[4].constant = 1e6;
        let out = braess_delta(&net).unwrap();
        assert!(out.delta.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_networks() {
        let mut net = RoutingNetwork::classic(4000.0);
        net.demand = 0.0;
        assert!(matches!(wardrop_equilibrium(&net), Err(Error::InvalidNetwork(_))));
        let mut net = RoutingNetwork::classic(4000.0);
        net.links[0].slope = -1.0;
        assert!(net.validate().is_err());
        assert!(braess_delta(&RoutingNetwork::classic(1.0).without_shortcuts()).is_err());
    }

    #[test]
    fn too_many_routes() {
        let nodes: Vec<String> = ["o", "d"].iter().map(|s| s.to_string()).collect();
        let net = RoutingNetwork {
            links: (0..6).map(|_| Link::new("o", "d", 1.0, 1.0)).collect(),
            nodes,
            origin: "o".into(),
            destination: "d".into(),
            demand: 1.0,
        };
        assert!(matches!(net.routes(), Err(Error::EnumerationCapExceeded { .. })));
    }
}
