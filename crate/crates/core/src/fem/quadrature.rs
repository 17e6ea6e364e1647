//! Symmetric quadrature on the reference triangle `(0,0), (1,0), (0,1)`.

use crate::error::{Error, Result};

/// Highest polynomial degree available.
pub const MAX_DEGREE: u32 = 6;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub degree: u32,
    /// Reference coordinates.
    pub points: Vec<[f64; 2]>,
    /// Weights summing to the reference area 1/2.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

struct Builder {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl Builder {
    fn new() -> Self {
        Builder { points: Vec::new(), weights: Vec::new() }
    }

    /// Weight `w` is relative to unit area.
    fn centroid(&mut self, w: f64) {
        self.points.push([1.0 / 3.0, 1.0 / 3.0]);
        self.weights.push(0.5 * w);
    }

    /// Orbit of barycentric `(a, a, 1 - 2a)`.
    fn orbit3(&mut self, a: f64, w: f64) {
        let b = 1.0 - 2.0 * a;
        for p in [[a, a], [b, a], [a, b]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
    }

    /// Orbit of barycentric `(a, b, 1 - a - b)`.
    fn orbit6(&mut self, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        for p in [[a, b], [b, a], [a, c], [c, a], [b, c], [c, b]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
    }

    fn build(self, degree: u32) -> QuadratureRule {
        QuadratureRule { degree, points: self.points, weights: self.weights }
    }
}

/// Returns a rule exact for polynomials of total degree `min_degree`.
pub fn quadrature(min_degree: u32) -> Result<QuadratureRule> {
    let mut b = Builder::new();
    let rule = match min_degree {
        0 | 1 => {
            b.centroid(1.0);
            b.build(1)
        }
        2 => {
            b.orbit3(1.0 / 6.0, 1.0 / 3.0);
            b.build(2)
        }
        3 | 4 => {
            // Dunavant, 6 points.
            b.orbit3(0.445_948_490_915_964_886_318_329_253_883, 0.223_381_589_678_011_465_944_827_303_060);
            b.orbit3(0.091_576_213_509_770_743_459_571_463_402, 0.109_951_743_655_321_867_388_506_030_272);
            b.build(4)
        }
        5 => {
            // Radon's 7-point rule, closed form.
            let s15 = 15f64.sqrt();
            b.centroid(9.0 / 40.0);
            b.orbit3((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
            b.orbit3((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
            b.build(5)
        }
        6 => {
            // Dunavant, 12 points.
            b.orbit3(0.063_089_014_491_502_228_340_331_602_870, 0.050_844_906_370_206_816_920_936_809_106);
            b.orbit3(0.249_286_745_170_910_421_291_638_553_107, 0.116_786_275_726_379_366_030_690_538_687);
            b.orbit6(
                0.053_145_049_844_816_947_353_249_671_631,
                0.310_352_451_033_784_405_416_607_733_956,
                0.082_851_075_618_373_575_193_553_456_421,
            );
            b.build(6)
        }
        d => {
            return Err(Error::Unsupported(format!(
                "quadrature degree {d} (maximum {MAX_DEGREE})"
            )))
        }
    };
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Exact integral of x^a y^b over the reference triangle.
    fn monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn weights_sum_to_reference_area() {
        for d in 1..=MAX_DEGREE {
            let q = quadrature(d).unwrap();
            let s: f64 = q.weights.iter().sum();
            assert!((s - 0.5).abs() < 1e-15, "degree {d}: {s}");
            assert!(q.weights.iter().all(|&w| w > 0.0));
            for p in &q.points {
                assert!(p[0] >= 0.0 && p[1] >= 0.0 && p[0] + p[1] <= 1.0);
            }
        }
    }

    #[test]
    fn centroid_rule() {
        let q = quadrature(1).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.weights[0], 0.5);
        assert!((q.points[0][0] - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn exact_for_declared_degree() {
        for d in 1..=MAX_DEGREE {
            let q = quadrature(d).unwrap();
            for a in 0..=d {
                for bb in 0..=(d - a) {
                    let approx: f64 = q.iter().map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(bb as i32)).sum();
                    let exact = monomial(a, bb);
                    assert!((approx - exact).abs() < 2e-16 * 8.0, "deg {d} x^{a} y^{bb}: {approx} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn x2y2_with_degree_four() {
        let q = quadrature(4).unwrap();
        let v: f64 = q.iter().map(|(p, w)| w * p[0] * p[0] * p[1] * p[1]).sum();
        assert!((v - 1.0 / 180.0).abs() < 1e-15);
    }

    #[test]
    fn too_high_degree_is_rejected() {
        assert!(quadrature(7).is_err());
    }
}
