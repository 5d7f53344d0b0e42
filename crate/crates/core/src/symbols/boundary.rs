//! Sampling of the distinguished boundary faces `{|z_k| = 1}`.

use super::expr::SymbolExpr;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGrid {
    /// Equispaced unimodular samples on the face coordinate.
    pub xi_count: usize,
    /// Radii of the polar grid on the remaining coordinates.
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for BoundaryGrid {
    fn default() -> Self {
        BoundaryGrid { xi_count: 64, radii: vec![0.0, 0.25, 0.5, 0.75, 0.95], angles: 32 }
    }
}

impl BoundaryGrid {
    pub fn circle_points(&self) -> Vec<Complex64> {
        unit_circle(self.xi_count)
    }

    pub fn disc_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.radii.len() * self.angles);
        for &r in &self.radii {
            if r == 0.0 {
                pts.push(Complex64::new(0.0, 0.0));
                continue;
            }
            for j in 0..self.angles {
                pts.push(Complex64::from_polar(r, TAU * j as f64 / self.angles as f64));
            }
        }
        pts
    }
}

pub fn unit_circle(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / count as f64))
        .collect()
}

/// Max of `|s|` over the sampled face `{|z_k| = 1}`, `k` 1-based.
pub fn boundary_face_max(s: &SymbolExpr, k: usize, grid: &BoundaryGrid) -> f64 {
    let n = s.dim();
    assert!(k >= 1 && k <= n, "face index out of range");
    let circle = grid.circle_points();
    let disc = grid.disc_points();
    let total: usize = disc.len().pow((n - 1) as u32);
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut best = 0.0f64;
    for &xi in &circle {
        for mut idx in 0..total {
            for (j, zj) in z.iter_mut().enumerate() {
                if j == k - 1 {
                    *zj = xi;
                } else {
                    *zj = disc[idx % disc.len()];
                    idx /= disc.len();
                }
            }
            best = best.max(s.eval(&z).norm());
        }
    }
    best
}

/// Max of `|s|` over a polar grid of the closed disc (one-variable symbols),
/// radii `i / radial_steps`, including the boundary circle.
pub fn closed_disc_max(s: &SymbolExpr, radial_steps: usize, angles: usize) -> f64 {
    assert_eq!(s.dim(), 1);
    let mut best = 0.0f64;
    for i in 0..=radial_steps {
        let r = i as f64 / radial_steps as f64;
        for j in 0..angles {
            let z = Complex64::from_polar(r, TAU * j as f64 / angles as f64);
            best = best.max(s.eval(&[z]).norm());
        }
    }
    best
}
