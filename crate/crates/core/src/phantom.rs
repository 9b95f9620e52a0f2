//! Analytic Shepp-Logan style test images.
//!
//! A phantom is an ordered list of rotated ellipses with additive
//! intensities, rasterized without anti-aliasing: a pixel takes the sum of
//! the intensities of every ellipse whose closed interior contains the pixel
//! center. Piecewise constancy is the point, so there is deliberately no
//! smoothing anywhere.

use crate::error::{Error, Result};
use crate::grid::Image;

/// One additive ellipse in the unit square [-1,1]².
///
/// `rotation_deg` rotates the ellipse counterclockwise about its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub additive_intensity: f64,
    pub semi_axis_a: f64,
    pub semi_axis_b: f64,
    pub center_x: f64,
    pub center_y: f64,
    pub rotation_deg: f64,
}

impl Ellipse {
    /// Closed-interior containment test (boundary points count as inside).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (s, c) = self.rotation_deg.to_radians().sin_cos();
        let dx = x - self.center_x;
        let dy = y - self.center_y;
        let xr = dx * c + dy * s;
        let yr = -dx * s + dy * c;
        let u = xr / self.semi_axis_a;
        let v = yr / self.semi_axis_b;
        u * u + v * v <= 1.0
    }
}

/// Ordered, nonempty ellipse list.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    ellipses: Vec<Ellipse>,
}

impl PhantomSpec {
    pub fn new(ellipses: Vec<Ellipse>) -> Result<Self> {
        if ellipses.is_empty() {
            return Err(Error::param("ellipses", "phantom needs at least one ellipse"));
        }
        for (i, e) in ellipses.iter().enumerate() {
            if !(e.semi_axis_a > 0.0) || !(e.semi_axis_b > 0.0) {
                return Err(Error::param(
                    "semi_axis",
                    format!("ellipse {i} has a non-positive semi-axis"),
                ));
            }
        }
        Ok(Self { ellipses })
    }

    pub fn ellipses(&self) -> &[Ellipse] {
        &self.ellipses
    }

    /// Sum of intensities of all ellipses containing (x, y).
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        let mut v = 0.0;
        for e in &self.ellipses {
            if e.contains(x, y) {
                v += e.additive_intensity;
            }
        }
        v
    }
}

/// The canonical 10-ellipse modified Shepp-Logan parameter table
/// (intensity, a, b, x0, y0, rotation in degrees).
const MODIFIED_SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
];

/// Modified Shepp-Logan phantom (the high-contrast intensity variant).
pub fn modified_shepp_logan_spec() -> PhantomSpec {
    let ellipses = MODIFIED_SHEPP_LOGAN
        .iter()
        .map(|&(additive_intensity, a, b, x0, y0, rot)| Ellipse {
            additive_intensity,
            semi_axis_a: a,
            semi_axis_b: b,
            center_x: x0,
            center_y: y0,
            rotation_deg: rot,
        })
        .collect();
    PhantomSpec::new(ellipses).expect("builtin table is valid")
}

/// Rasterizes at pixel centers: pixel (i,j) samples the phantom at
/// x = (2j+1)/n − 1, y = 1 − (2i+1)/n (y axis pointing up).
pub fn rasterize(spec: &PhantomSpec, n: usize) -> Result<Image> {
    if n < 2 {
        return Err(Error::GridTooSmall { n, min: 2 });
    }
    let mut samples = Vec::with_capacity(n * n);
    for i in 0..n {
        let y = 1.0 - (2 * i + 1) as f64 / n as f64;
        for j in 0..n {
            let x = (2 * j + 1) as f64 / n as f64 - 1.0;
            samples.push(spec.value_at(x, y));
        }
    }
    Ok(Image::from_raw(n, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle() -> PhantomSpec {
        PhantomSpec::new(vec![Ellipse {
            additive_intensity: 1.0,
            semi_axis_a: 1.0,
            semi_axis_b: 1.0,
            center_x: 0.0,
            center_y: 0.0,
            rotation_deg: 0.0,
        }])
        .unwrap()
    }

    /// Independent oracle: evaluate the table directly at a pixel center,
    /// summing intensities of containing ellipses in table order.
    fn oracle_pixel(table: &[(f64, f64, f64, f64, f64, f64)], n: usize, i: usize, j: usize) -> f64 {
        let y = 1.0 - (2 * i + 1) as f64 / n as f64;
        let x = (2 * j + 1) as f64 / n as f64 - 1.0;
        let mut acc = 0.0;
        for &(intensity, a, b, x0, y0, rot) in table {
            let phi = rot.to_radians();
            let (s, c) = phi.sin_cos();
            let dx = x - x0;
            let dy = y - y0;
            let xr = dx * c + dy * s;
            let yr = -dx * s + dy * c;
            let u = xr / a;
            let v = yr / b;
            if u * u + v * v <= 1.0 {
                acc += intensity;
            }
        }
        acc
    }

    #[test]
    fn modified_table_has_ten_ellipses_with_head_first() {
        let spec = modified_shepp_logan_spec();
        assert_eq!(spec.ellipses().len(), 10);
        let head = &spec.ellipses()[0];
        assert_eq!(head.additive_intensity, 1.0);
        // Largest by both semi-axes.
        for e in &spec.ellipses()[1..] {
            assert!(e.semi_axis_a < head.semi_axis_a);
            assert!(e.semi_axis_b < head.semi_axis_b);
        }
        let intensities: Vec<f64> = spec.ellipses().iter().map(|e| e.additive_intensity).collect();
        assert_eq!(
            intensities,
            vec![1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]
        );
    }

    #[test]
    fn center_value_matches_analytic_evaluation() {
        let spec = modified_shepp_logan_spec();
        // At the exact center only the two skull ellipses contain the point.
        let center = spec.value_at(0.0, 0.0);
        assert!((center - 0.2).abs() < 1e-15);
        // The rasterized center pixel agrees with the per-pixel oracle.
        let n = 256;
        let img = rasterize(&spec, n).unwrap();
        let mid = n / 2;
        assert_eq!(img.get(mid, mid), oracle_pixel(&MODIFIED_SHEPP_LOGAN, n, mid, mid));
    }

    #[test]
    fn unit_circle_covers_all_four_pixels_at_n2() {
        let img = rasterize(&unit_circle(), 2).unwrap();
        // Centers (±1/2, ±1/2) all satisfy x²+y² = 1/2 ≤ 1.
        assert_eq!(img.samples(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn corner_pixel_is_empty_at_256() {
        let img = rasterize(&modified_shepp_logan_spec(), 256).unwrap();
        assert_eq!(img.get(0, 0), 0.0);
    }

    #[test]
    fn full_raster_matches_oracle_bit_exactly() {
        let n = 128;
        let img = rasterize(&modified_shepp_logan_spec(), n).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(
                    img.get(i, j),
                    oracle_pixel(&MODIFIED_SHEPP_LOGAN, n, i, j),
                    "pixel ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn values_lie_in_the_subset_sum_set() {
        // Every pixel value is the in-order sum of the intensities of some
        // subset of the table; enumerate all 2^10 such sums and check
        // bit-exact membership. The mathematical range is [0,1]; floating
        // point puts the "empty interior" value 1.0−0.8−0.2 at −5.6e-17.
        use std::collections::HashSet;
        let spec = modified_shepp_logan_spec();
        let intensities: Vec<f64> = spec.ellipses().iter().map(|e| e.additive_intensity).collect();
        let mut sums: HashSet<u64> = HashSet::new();
        for bits in 0u32..(1 << intensities.len()) {
            let mut acc = 0.0;
            for (pos, &a) in intensities.iter().enumerate() {
                if bits & (1 << pos) != 0 {
                    acc += a;
                }
            }
            sums.insert(acc.to_bits());
        }
        let img = rasterize(&spec, 128).unwrap();
        for &v in img.samples() {
            assert!(sums.contains(&v.to_bits()), "value {v} not a subset sum");
            assert!((-1e-15..=1.0 + 1e-15).contains(&v), "value {v} out of range");
        }
    }

    #[test]
    fn odd_factor_decimation_is_consistent() {
        // Centers coincide between the n and 3n grids at (3i+1, 3j+1).
        let n = 32;
        let coarse = rasterize(&modified_shepp_logan_spec(), n).unwrap();
        let fine = rasterize(&modified_shepp_logan_spec(), 3 * n).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(coarse.get(i, j), fine.get(3 * i + 1, 3 * j + 1));
            }
        }
    }

    #[test]
    fn rasterization_is_deterministic() {
        let a = rasterize(&modified_shepp_logan_spec(), 64).unwrap();
        let b = rasterize(&modified_shepp_logan_spec(), 64).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(rasterize(&unit_circle(), 1).is_err());
        assert!(PhantomSpec::new(vec![]).is_err());
        assert!(PhantomSpec::new(vec![Ellipse {
            additive_intensity: 1.0,
            semi_axis_a: 0.0,
            semi_axis_b: 1.0,
            center_x: 0.0,
            center_y: 0.0,
            rotation_deg: 0.0,
        }])
        .is_err());
    }
}
