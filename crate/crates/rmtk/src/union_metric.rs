//! A metric on the disjoint union of a family of finite-dimensional spaces.
//!
//! The union `T` of component spaces `S_0, S_1, S_2, ...` carries the metric
//!
//! ```text
//! delta(x, y) = rho_0(phi(x), phi(y)) + { eps_{s(x)} /\ rho_{s(x)}(x, y)   if s(x) = s(y)
//!                                       { eps_{s(x)} \/ eps_{s(y)}         otherwise
//! ```
//!
//! where `s(x)` is the index of the space containing `x`, `phi_n: S_n -> S_0`
//! are the coupling maps (`phi_0` the identity), and `eps_n` is a positive
//! sequence strictly decreasing to zero with `eps_0 = 0`. Under `delta`, a
//! sequence can only converge to a point of `S_k` (k > 0) by eventually
//! entering `S_k`, and can only converge to a point of `S_0` by drifting
//! through spaces of ever-larger index while its `phi`-image converges; the
//! diagnostics here make both halves of that dichotomy checkable.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ensembles::{mix_seed, Stream};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("point in space {space_index} has {got} coordinates, expected {expected}")]
    InvalidPoint {
        space_index: usize,
        got: usize,
        expected: usize,
    },
    #[error("space index {space_index} out of range (family has {count} spaces)")]
    SpaceOutOfRange { space_index: usize, count: usize },
    #[error("mapping of space {space_index} produced {got} coordinates, expected {expected} (the base dimension)")]
    BadMappingOutput {
        space_index: usize,
        got: usize,
        expected: usize,
    },
    #[error("epsilon sequence invalid at n = {index}: {reason}")]
    BadEpsilons { index: usize, reason: String },
    #[error("family must contain at least one space")]
    EmptyFamily,
    #[error("component dimensions must be positive (space {space_index})")]
    ZeroDimension { space_index: usize },
    #[error("axiom suite needs count >= 1")]
    EmptySample,
}

type MetricRule = Arc<dyn Fn(usize, &[f64], &[f64]) -> f64 + Send + Sync>;
type MappingRule = Arc<dyn Fn(usize, &[f64]) -> Vec<f64> + Send + Sync>;
type EpsilonRule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;
type DimRule = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// A point of the disjoint union: a space index plus coordinates in that
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPoint {
    pub space_index: usize,
    pub coords: Vec<f64>,
}

impl TaggedPoint {
    pub fn new(space_index: usize, coords: Vec<f64>) -> Self {
        Self {
            space_index,
            coords,
        }
    }

    /// Exact representation equality: same space, bitwise-equal coordinates.
    pub fn repr_eq(&self, other: &TaggedPoint) -> bool {
        self.space_index == other.space_index
            && self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// One entry of a convergence trace: the space the sequence element sits in,
/// its distance to the limit, and the base-space distance of the images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub space_index: usize,
    pub delta: f64,
    pub rho0: f64,
}

/// Aggregated result of the randomized metric-axiom check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomReport {
    pub triples: usize,
    pub max_triangle_violation: f64,
    pub max_symmetry_violation: f64,
    pub zero_distance_failures: usize,
}

/// The family `(S_n, rho_n, phi_n, eps_n)` with everything needed to evaluate
/// the union metric.
#[derive(Clone)]
pub struct UnionSpace {
    space_count: usize,
    dims: DimRule,
    component_metric: MetricRule,
    mapping: MappingRule,
    epsilons: EpsilonRule,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Default coupling map: truncate or zero-pad to the base dimension.
fn truncate_or_pad(coords: &[f64], base_dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; base_dim];
    let k = coords.len().min(base_dim);
    out[..k].copy_from_slice(&coords[..k]);
    out
}

impl UnionSpace {
    /// Family of Euclidean spaces with the given dimensions, default
    /// truncate-or-pad mappings onto `S_0` and `eps_n = 1/n`.
    pub fn euclidean(dims: Vec<usize>) -> Result<Self, MetricError> {
        if dims.is_empty() {
            return Err(MetricError::EmptyFamily);
        }
        if let Some(ix) = dims.iter().position(|&d| d == 0) {
            return Err(MetricError::ZeroDimension { space_index: ix });
        }
        let count = dims.len();
        let dims = Arc::new(move |n: usize| dims[n]);
        Ok(Self::from_rules(count, dims))
    }

    /// Family whose dimensions come from a rule `n -> d_n`; the rule must be
    /// positive on `0..space_count`.
    pub fn from_dim_rule<D>(space_count: usize, dims: D) -> Result<Self, MetricError>
    where
        D: Fn(usize) -> usize + Send + Sync + 'static,
    {
        if space_count == 0 {
            return Err(MetricError::EmptyFamily);
        }
        for n in 0..space_count {
            if dims(n) == 0 {
                return Err(MetricError::ZeroDimension { space_index: n });
            }
        }
        Ok(Self::from_rules(space_count, Arc::new(dims)))
    }

    fn from_rules(space_count: usize, dims: DimRule) -> Self {
        let base_dim = dims(0);
        Self {
            space_count,
            dims,
            component_metric: Arc::new(|_, a, b| euclidean(a, b)),
            mapping: Arc::new(move |_, coords| truncate_or_pad(coords, base_dim)),
            epsilons: Arc::new(|n| if n == 0 { 0.0 } else { 1.0 / n as f64 }),
        }
    }

    /// Replaces the per-space metric rule `(n, x, y) -> rho_n(x, y)`.
    pub fn with_component_metric<F>(mut self, metric: F) -> Self
    where
        F: Fn(usize, &[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        self.component_metric = Arc::new(metric);
        self
    }

    /// Replaces the coupling maps `(n, x) -> phi_n(x)` for `n >= 1`
    /// (`phi_0` stays the identity regardless).
    pub fn with_mapping<F>(mut self, mapping: F) -> Self
    where
        F: Fn(usize, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.mapping = Arc::new(mapping);
        self
    }

    /// Replaces the separation sequence `n -> eps_n` for `n >= 1` (`eps_0` is
    /// pinned to zero). Use [`UnionSpace::validate_epsilons`] to check a
    /// prefix.
    pub fn with_epsilons<F>(mut self, epsilons: F) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        self.epsilons = Arc::new(epsilons);
        self
    }

    pub fn space_count(&self) -> usize {
        self.space_count
    }

    pub fn dim(&self, space_index: usize) -> usize {
        (self.dims)(space_index)
    }

    pub fn epsilon(&self, space_index: usize) -> f64 {
        if space_index == 0 {
            0.0
        } else {
            (self.epsilons)(space_index)
        }
    }

    /// Checks `eps_0 = 0` and strict positive decrease on `1..=prefix`.
    pub fn validate_epsilons(&self, prefix: usize) -> Result<(), MetricError> {
        let mut prev = f64::INFINITY;
        for n in 1..=prefix {
            let e = self.epsilon(n);
            if !e.is_finite() || e <= 0.0 {
                return Err(MetricError::BadEpsilons {
                    index: n,
                    reason: format!("eps_{n} = {e} must be positive and finite"),
                });
            }
            if e >= prev {
                return Err(MetricError::BadEpsilons {
                    index: n,
                    reason: format!("eps_{n} = {e} must be strictly below eps_{} = {prev}", n - 1),
                });
            }
            prev = e;
        }
        Ok(())
    }

    fn validate_point(&self, p: &TaggedPoint) -> Result<(), MetricError> {
        if p.space_index >= self.space_count {
            return Err(MetricError::SpaceOutOfRange {
                space_index: p.space_index,
                count: self.space_count,
            });
        }
        let expected = self.dim(p.space_index);
        if p.coords.len() != expected {
            return Err(MetricError::InvalidPoint {
                space_index: p.space_index,
                got: p.coords.len(),
                expected,
            });
        }
        Ok(())
    }

    /// Image of a point in the base space: `phi_{s(x)}(x)`, with `phi_0` the
    /// identity. Verifies the output lands in `S_0`.
    pub fn map_to_base(&self, p: &TaggedPoint) -> Result<Vec<f64>, MetricError> {
        self.validate_point(p)?;
        if p.space_index == 0 {
            return Ok(p.coords.clone());
        }
        let image = (self.mapping)(p.space_index, &p.coords);
        let base_dim = self.dim(0);
        if image.len() != base_dim {
            return Err(MetricError::BadMappingOutput {
                space_index: p.space_index,
                got: image.len(),
                expected: base_dim,
            });
        }
        Ok(image)
    }

    /// The union metric itself.
    pub fn delta(&self, x: &TaggedPoint, y: &TaggedPoint) -> Result<f64, MetricError> {
        let ix = self.map_to_base(x)?;
        let iy = self.map_to_base(y)?;
        let base = (self.component_metric)(0, &ix, &iy);
        let separation = if x.space_index == y.space_index {
            let rho = (self.component_metric)(x.space_index, &x.coords, &y.coords);
            self.epsilon(x.space_index).min(rho)
        } else {
            self.epsilon(x.space_index).max(self.epsilon(y.space_index))
        };
        Ok(base + separation)
    }

    /// Per-element convergence diagnostics of a sequence against a limit:
    /// `(s(x_n), delta(x_n, limit), rho_0(phi(x_n), phi(limit)))`.
    pub fn convergence_trace(
        &self,
        seq: &[TaggedPoint],
        limit: &TaggedPoint,
    ) -> Result<Vec<TraceEntry>, MetricError> {
        let limit_image = self.map_to_base(limit)?;
        seq.iter()
            .map(|x| {
                let delta = self.delta(x, limit)?;
                let image = self.map_to_base(x)?;
                let rho0 = (self.component_metric)(0, &image, &limit_image);
                Ok(TraceEntry {
                    space_index: x.space_index,
                    delta,
                    rho0,
                })
            })
            .collect()
    }

    /// Draws `count` seeded random triples spanning the four space-index case
    /// patterns and reports the worst observed violation of each metric
    /// axiom. A report of zeros (up to float tolerance on the triangle
    /// inequality) is the expected outcome.
    pub fn metric_axiom_suite(
        &self,
        sampler_seed: u64,
        count: usize,
    ) -> Result<AxiomReport, MetricError> {
        if count == 0 {
            return Err(MetricError::EmptySample);
        }
        self.validate_epsilons(self.space_count.saturating_sub(1))?;
        let mut rng =
            ChaCha8Rng::seed_from_u64(mix_seed(sampler_seed, 0, Stream::MetricTriples as u64));
        let mut report = AxiomReport {
            triples: count,
            max_triangle_violation: 0.0,
            max_symmetry_violation: 0.0,
            zero_distance_failures: 0,
        };

        for trial in 0..count {
            let (sx, sy, sz) = self.triple_indices(&mut rng, trial);
            let x = self.random_point(&mut rng, sx);
            let y = self.random_point(&mut rng, sy);
            let z = self.random_point(&mut rng, sz);

            let dxy = self.delta(&x, &y)?;
            let dyx = self.delta(&y, &x)?;
            let dyz = self.delta(&y, &z)?;
            let dzy = self.delta(&z, &y)?;
            let dxz = self.delta(&x, &z)?;
            let dzx = self.delta(&z, &x)?;

            report.max_symmetry_violation = report
                .max_symmetry_violation
                .max((dxy - dyx).abs())
                .max((dyz - dzy).abs())
                .max((dxz - dzx).abs());
            report.max_triangle_violation = report
                .max_triangle_violation
                .max(dxz - dxy - dyz)
                .max(dxy - dxz - dzy)
                .max(dyz - dyx - dxz);
            for (p, q, d) in [(&x, &y, dxy), (&y, &z, dyz), (&x, &z, dxz)] {
                if d == 0.0 && !p.repr_eq(q) {
                    report.zero_distance_failures += 1;
                }
            }
        }
        Ok(report)
    }

    /// Index pattern for one triple; cycles through the four case
    /// combinations so each gets a quarter of the sample.
    fn triple_indices(&self, rng: &mut ChaCha8Rng, trial: usize) -> (usize, usize, usize) {
        let count = self.space_count;
        if count == 1 {
            return (0, 0, 0);
        }
        let pick = |rng: &mut ChaCha8Rng| rng.random_range(0..count);
        let pick_not = |rng: &mut ChaCha8Rng, avoid: &[usize]| loop {
            let k = rng.random_range(0..count);
            if !avoid.contains(&k) {
                return k;
            }
        };
        match trial % 4 {
            0 => {
                let s = pick(rng);
                (s, s, s)
            }
            1 => {
                let s = pick(rng);
                (s, s, pick_not(rng, &[s]))
            }
            2 => {
                let s = pick(rng);
                (pick_not(rng, &[s]), s, s)
            }
            _ => {
                let sx = pick(rng);
                let sy = pick_not(rng, &[sx]);
                // s(z) != s(y); may or may not equal s(x) when 3+ spaces exist.
                let sz = if count == 2 { sx } else { pick_not(rng, &[sy]) };
                (sx, sy, sz)
            }
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng, space_index: usize) -> TaggedPoint {
        let dim = self.dim(space_index);
        let coords = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        TaggedPoint::new(space_index, coords)
    }
}
