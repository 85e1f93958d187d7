//! Mixture weights, test thresholds and test-decision rules.
//!
//! GCL runs component algorithm `A_0` with probability `alpha` and each of
//! `A_1..A_ell` with probability `beta = (1 - alpha) / ell`. Component `A_i`
//! leaves a job untested when its ratio `r = u / t` satisfies `r <= x_i` or
//! `phi < r <= y_i`, and tests it otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The golden ratio `(sqrt(5) + 1) / 2`.
pub fn phi() -> f64 {
    (5f64.sqrt() + 1.0) / 2.0
}

/// A machine or component count, or the limit as it grows without bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Size {
    Finite(u32),
    Unbounded,
}

impl Size {
    fn reciprocal(self) -> f64 {
        match self {
            Size::Finite(n) => 1.0 / f64::from(n),
            Size::Unbounded => 0.0,
        }
    }

    fn at_least(self, min: u32) -> bool {
        match self {
            Size::Finite(n) => n >= min,
            Size::Unbounded => true,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Size::Finite(n) => Some(n),
            Size::Unbounded => None,
        }
    }
}

impl From<u32> for Size {
    fn from(n: u32) -> Self {
        Size::Finite(n)
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Finite(n) => write!(f, "{n}"),
            Size::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Size {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Size::Unbounded),
            other => other
                .parse::<u32>()
                .map(Size::Finite)
                .map_err(|_| Error::InvalidArgument(format!("not a size: {other:?}"))),
        }
    }
}

impl Serialize for Size {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Size::Finite(n) => serializer.serialize_u32(*n),
            Size::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Test,
    Skip,
}

fn check_sizes(m: Size, ell: Size) -> Result<()> {
    if !m.at_least(2) {
        return Err(Error::TooFewMachines {
            min: 2,
            got: m.finite().unwrap_or(0) as usize,
        });
    }
    if !ell.at_least(1) {
        return Err(Error::NoComponents);
    }
    Ok(())
}

/// Probability `alpha` of running `A_0` and `beta` of each other component.
pub fn mixture_weights(m: Size, ell: Size) -> Result<(f64, f64)> {
    check_sizes(m, ell)?;
    let phi2 = phi() * phi();
    let alpha = match (m, ell) {
        (_, Size::Finite(l)) => {
            let l = f64::from(l);
            let a = (1.0 - m.reciprocal()) * (l + 1.0) * phi2;
            (a / (a + 2.0 * l)).sqrt()
        }
        (_, Size::Unbounded) => {
            let a = (1.0 - m.reciprocal()) * phi2;
            (a / (a + 2.0)).sqrt()
        }
    };
    let beta = match ell {
        Size::Finite(l) => (1.0 - alpha) / f64::from(l),
        Size::Unbounded => 0.0,
    };
    Ok((alpha, beta))
}

/// Parameters of GCL for a given machine count and number of extra components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub m: u32,
    pub ell: u32,
    pub alpha: f64,
    pub beta: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Builds the full parameter set; `x_0 = y_0 = phi` exactly.
pub fn thresholds(m: u32, ell: u32) -> Result<PolicyParams> {
    let (alpha, beta) = mixture_weights(Size::Finite(m), Size::Finite(ell))?;
    let phi = phi();
    let y: Vec<f64> = (0..=ell)
        .map(|i| {
            if i == 0 {
                phi
            } else {
                phi * (alpha + f64::from(i) * beta) / alpha
            }
        })
        .collect();
    let x = y
        .iter()
        .enumerate()
        .map(|(i, &yi)| if i == 0 { phi } else { 1.0 + 1.0 / yi })
        .collect();
    Ok(PolicyParams {
        m,
        ell,
        alpha,
        beta,
        x,
        y,
    })
}

impl PolicyParams {
    pub fn new(m: u32, ell: u32) -> Result<Self> {
        thresholds(m, ell)
    }

    pub fn x_last(&self) -> f64 {
        self.x[self.ell as usize]
    }

    pub fn y_last(&self) -> f64 {
        self.y[self.ell as usize]
    }

    /// `1 < x_ell < ... < x_0 = phi = y_0 < ... < y_ell`.
    pub fn chain_holds(&self) -> bool {
        let phi = phi();
        let l = self.ell as usize;
        self.x[l] > 1.0
            && self.x[0] == phi
            && self.y[0] == phi
            && self.x.windows(2).all(|w| w[1] < w[0])
            && self.y.windows(2).all(|w| w[0] < w[1])
    }

    /// The two inequalities the upper-bound analysis leans on:
    /// `(1 - alpha) / x_ell < alpha / phi` and
    /// `(ell - i) * beta * (y_{i+1} - 1) < alpha / phi` for `i < ell`.
    pub fn analysis_inequalities_hold(&self) -> bool {
        let target = self.alpha / phi();
        let l = self.ell as usize;
        (1.0 - self.alpha) / self.x[l] < target
            && (0..l).all(|i| (l - i) as f64 * self.beta * (self.y[i + 1] - 1.0) < target)
    }
}

/// Parameters of the two-component revision used on two machines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevisedParams {
    pub alpha: f64,
    pub x1: f64,
    pub y1: f64,
}

pub fn revised_two_machine_params() -> RevisedParams {
    let phi = phi();
    let x1 = (phi + (13.0 - 7.0 * phi).sqrt()) / 2.0;
    RevisedParams {
        alpha: phi - 1.0,
        x1,
        y1: 1.0 / (x1 - 1.0),
    }
}

impl RevisedParams {
    /// `(3 phi + 3 sqrt(13 - 7 phi)) / 4`, i.e. `3 x_1 / 2` for the untampered parameters.
    pub fn bound() -> f64 {
        let phi = phi();
        (3.0 * phi + 3.0 * (13.0 - 7.0 * phi).sqrt()) / 4.0
    }
}

/// Skip iff `r <= x` or `phi < r <= y`.
fn decide_with(r: f64, x: f64, y: f64) -> Verdict {
    if r <= x || (phi() < r && r <= y) {
        Verdict::Skip
    } else {
        Verdict::Test
    }
}

/// A barely randomized algorithm: a distribution over threshold components.
pub trait Mixture {
    /// Component probabilities; index 0 is `A_0`.
    fn weights(&self) -> Vec<f64>;

    /// `(x_i, y_i)` of component `i`.
    fn threshold_pair(&self, component: usize) -> Option<(f64, f64)>;

    fn components(&self) -> usize {
        self.weights().len()
    }

    fn decide(&self, r: f64, component: usize) -> Result<Verdict> {
        let (x, y) = self
            .threshold_pair(component)
            .ok_or(Error::ComponentIndex {
                index: component,
                max: self.components().saturating_sub(1),
            })?;
        Ok(decide_with(r, x, y))
    }
}

impl Mixture for PolicyParams {
    fn weights(&self) -> Vec<f64> {
        std::iter::once(self.alpha)
            .chain(std::iter::repeat_n(self.beta, self.ell as usize))
            .collect()
    }

    fn threshold_pair(&self, component: usize) -> Option<(f64, f64)> {
        Some((*self.x.get(component)?, *self.y.get(component)?))
    }
}

impl Mixture for RevisedParams {
    fn weights(&self) -> Vec<f64> {
        vec![self.alpha, 1.0 - self.alpha]
    }

    fn threshold_pair(&self, component: usize) -> Option<(f64, f64)> {
        match component {
            0 => Some((phi(), phi())),
            1 => Some((self.x1, self.y1)),
            _ => None,
        }
    }
}

pub fn component_decision(r: f64, i: usize, params: &PolicyParams) -> Result<Verdict> {
    params.decide(r, i)
}

/// Upper bound on the expected competitive ratio of GCL for `(m, ell)`.
pub fn gcl_bound(m: Size, ell: Size) -> Result<f64> {
    check_sizes(m, ell)?;
    let a = 1.0 - m.reciprocal();
    let b = 1.0 + ell.reciprocal();
    let phi = phi();
    Ok((a * a * b * b * phi * phi + 2.0 * a * b).sqrt() + 1.0 - a * phi * ell.reciprocal())
}

/// Single-machine test probability `r(r-1) / (r(r-1) + 1)` for `r > 1`.
pub fn test_probability_single_machine(r: f64) -> f64 {
    if r <= 1.0 {
        0.0
    } else if r.is_infinite() {
        1.0
    } else {
        let q = r * (r - 1.0);
        q / (q + 1.0)
    }
}

/// `alpha(m)`, `x(m)` and `y(m)`: the `ell -> inf` limits of `alpha`, `x_ell`, `y_ell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitThresholds {
    pub alpha: f64,
    pub x: f64,
    pub y: f64,
}

pub fn limit_thresholds(m: Size) -> Result<LimitThresholds> {
    let (alpha, _) = mixture_weights(m, Size::Unbounded)?;
    let y = phi() / alpha;
    Ok(LimitThresholds {
        alpha,
        x: 1.0 + 1.0 / y,
        y,
    })
}

/// Limit (as `ell -> inf`) of the probability that GCL tests a job of ratio `r`.
pub fn test_probability_limit(r: f64, m: Size) -> Result<f64> {
    let lim = limit_thresholds(m)?;
    let phi = phi();
    Ok(if r <= lim.x {
        0.0
    } else if r <= phi {
        1.0 - lim.alpha / (phi * (r - 1.0))
    } else if r <= lim.y {
        lim.alpha * r / phi
    } else {
        1.0
    })
}
