//! Synthetic shape samplers for experiments and tests.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use reebmap_core::error::{input_err, Result};
use reebmap_core::geometry::PointCloud;
use reebmap_core::seeds::Rng;

const TORUS_MAJOR: f64 = 2.0;
const TORUS_MINOR: f64 = 0.5;
const CRATER_ANNULUS_FRACTION: f64 = 0.9;
const CRATER_RING_HALF_WIDTH: f64 = 0.15;
const CRATER_BACKGROUND_HALF_SIDE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Unit circle in the plane.
    Circle,
    /// Lemniscate (cos t, sin t cos t).
    FigureEight,
    /// Torus of revolution in R^3, radii 2 and 0.5.
    Torus,
    /// Flat Klein bottle in R^4: torus tube with a half-twist carried by the
    /// last two coordinates.
    Klein4,
    /// Annulus of radius about 1 (80% of points) over a uniform square
    /// background (20%); the noisy test bed for DTM denoising.
    Crater,
}

impl Shape {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Self::Circle),
            "figure_eight" => Ok(Self::FigureEight),
            "torus" => Ok(Self::Torus),
            "klein4" => Ok(Self::Klein4),
            "crater" => Ok(Self::Crater),
            _ => input_err(format!("unknown shape '{s}'")),
        }
    }

    /// Residual of the shape's implicit equation at a noise-free sample
    /// point; `None` for shapes without one (crater).
    pub fn implicit_residual(&self, p: &[f64]) -> Option<f64> {
        match self {
            Self::Circle => Some(p[0] * p[0] + p[1] * p[1] - 1.0),
            Self::FigureEight => {
                // y^2 = x^2 (1 - x^2)
                Some(p[1] * p[1] - p[0] * p[0] * (1.0 - p[0] * p[0]))
            }
            Self::Torus => {
                let ring = (p[0] * p[0] + p[1] * p[1]).sqrt() - TORUS_MAJOR;
                Some(ring * ring + p[2] * p[2] - TORUS_MINOR * TORUS_MINOR)
            }
            Self::Klein4 => {
                let ring = (p[0] * p[0] + p[1] * p[1]).sqrt() - TORUS_MAJOR;
                Some(ring * ring + p[2] * p[2] + p[3] * p[3] - TORUS_MINOR * TORUS_MINOR)
            }
            Self::Crater => None,
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Circle => "circle",
            Self::FigureEight => "figure_eight",
            Self::Torus => "torus",
            Self::Klein4 => "klein4",
            Self::Crater => "crater",
        };
        write!(f, "{s}")
    }
}

fn torus_like(u: f64, v: f64, klein: bool) -> Vec<f64> {
    let ring = TORUS_MAJOR + TORUS_MINOR * v.cos();
    if klein {
        vec![
            ring * u.cos(),
            ring * u.sin(),
            TORUS_MINOR * v.sin() * (u / 2.0).cos(),
            TORUS_MINOR * v.sin() * (u / 2.0).sin(),
        ]
    } else {
        vec![ring * u.cos(), ring * u.sin(), TORUS_MINOR * v.sin()]
    }
}

/// Samples `n` points on the named shape plus isotropic Gaussian jitter of
/// standard deviation `noise_sd`.
///
/// `stratified` replaces the uniform parameter draws with an even grid
/// (equal angles on curves, a lattice on surfaces); the crater is a noise
/// model and ignores it.
pub fn synth_shape(
    shape: Shape,
    n: usize,
    noise_sd: f64,
    stratified: bool,
    rng: &mut Rng,
) -> Result<PointCloud> {
    if n < 1 {
        return input_err("need at least one point");
    }
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return input_err(format!("noise must be nonnegative, got {noise_sd}"));
    }
    let tau = std::f64::consts::TAU;
    let curve_param = |k: usize, rng: &mut Rng| -> f64 {
        if stratified {
            tau * k as f64 / n as f64
        } else {
            rng.random_range(0.0..tau)
        }
    };
    let grid = (n as f64).sqrt().ceil() as usize;
    let surface_params = |k: usize, rng: &mut Rng| -> (f64, f64) {
        if stratified {
            (
                tau * (k % grid) as f64 / grid as f64,
                tau * (k / grid) as f64 / grid as f64,
            )
        } else {
            (rng.random_range(0.0..tau), rng.random_range(0.0..tau))
        }
    };
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let p = match shape {
            Shape::Circle => {
                let t = curve_param(k, rng);
                vec![t.cos(), t.sin()]
            }
            Shape::FigureEight => {
                let t = curve_param(k, rng);
                vec![t.cos(), t.sin() * t.cos()]
            }
            Shape::Torus => {
                let (u, v) = surface_params(k, rng);
                torus_like(u, v, false)
            }
            Shape::Klein4 => {
                let (u, v) = surface_params(k, rng);
                torus_like(u, v, true)
            }
            Shape::Crater => {
                if (k as f64) < CRATER_ANNULUS_FRACTION * n as f64 {
                    let t = rng.random_range(0.0..tau);
                    let rho = 1.0
                        + rng.random_range(-CRATER_RING_HALF_WIDTH..CRATER_RING_HALF_WIDTH);
                    vec![rho * t.cos(), rho * t.sin()]
                } else {
                    let side = CRATER_BACKGROUND_HALF_SIDE;
                    vec![
                        rng.random_range(-side..side),
                        rng.random_range(-side..side),
                    ]
                }
            }
        };
        points.push(p);
    }
    if noise_sd > 0.0 {
        let normal = Normal::new(0.0, noise_sd)
            .map_err(|e| reebmap_core::Error::Input(format!("bad noise level: {e}")))?;
        for p in &mut points {
            for c in p.iter_mut() {
                *c += normal.sample(rng);
            }
        }
    }
    PointCloud::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use reebmap_core::seeds::rng_from_seed;

    #[test]
    fn stratified_circle_angles() {
        let pc = synth_shape(Shape::Circle, 4, 0.0, true, &mut rng_from_seed(0)).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, want) in pc.points().iter().zip(expect) {
            assert!((p[0] - want[0]).abs() < 1e-12);
            assert!((p[1] - want[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_free_points_satisfy_implicit_equations() {
        for shape in [Shape::Circle, Shape::FigureEight, Shape::Torus, Shape::Klein4] {
            for stratified in [false, true] {
                let pc =
                    synth_shape(shape, 50, 0.0, stratified, &mut rng_from_seed(3)).unwrap();
                for p in pc.points() {
                    let res = shape.implicit_residual(p).unwrap();
                    assert!(res.abs() < 1e-9, "{shape}: residual {res}");
                }
            }
        }
    }

    #[test]
    fn seeded_reproducibility() {
        for shape in [Shape::Circle, Shape::Crater, Shape::Klein4] {
            let a = synth_shape(shape, 30, 0.05, false, &mut rng_from_seed(9)).unwrap();
            let b = synth_shape(shape, 30, 0.05, false, &mut rng_from_seed(9)).unwrap();
            assert_eq!(a.points(), b.points());
        }
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!(Shape::parse("circle").unwrap(), Shape::Circle);
        assert_eq!(Shape::parse("klein4").unwrap(), Shape::Klein4);
        assert!(Shape::parse("sphere").is_err());
        assert!(synth_shape(Shape::Circle, 0, 0.0, false, &mut rng_from_seed(0)).is_err());
        assert!(synth_shape(Shape::Circle, 5, -1.0, false, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn crater_mixes_ring_and_background() {
        let pc = synth_shape(Shape::Crater, 200, 0.0, false, &mut rng_from_seed(4)).unwrap();
        let ring = pc
            .points()
            .iter()
            .filter(|p| {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                (0.84..=1.16).contains(&r)
            })
            .count();
        assert!(ring >= 160, "ring points: {ring}");
        assert_eq!(pc.dim(), 2);
    }
}
