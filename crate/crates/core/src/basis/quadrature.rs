//! Symmetric quadrature rules on triangles (barycentric points) and
//! Gauss-Legendre rules on edges (parameter in [0, 1]).
//!
//! Weights are normalised to sum to one; multiply by the measure of the
//! cell or edge.
#![allow(clippy::excessive_precision)]


use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

enum Orbit {
    Centroid(f64),
    /// (a, a, 1 - 2a) and its three permutations.
    A(f64, f64),
    /// (a, b, 1 - a - b) and its six permutations.
    Ab(f64, f64, f64),
}

fn expand(orbits: &[Orbit], degree: usize) -> TriangleRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for o in orbits {
        match *o {
            Orbit::Centroid(w) => {
                points.push([1.0 / 3.0; 3]);
                weights.push(w);
            }
            Orbit::A(a, w) => {
                let c = 1.0 - 2.0 * a;
                for p in [[a, a, c], [a, c, a], [c, a, a]] {
                    points.push(p);
                    weights.push(w);
                }
            }
            Orbit::Ab(a, b, w) => {
                let c = 1.0 - a - b;
                for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    points.push(p);
                    weights.push(w);
                }
            }
        }
    }
    TriangleRule { points, weights, degree }
}

impl TriangleRule {
    /// Smallest stored rule exact for polynomials of total degree `degree`.
    pub fn new(degree: usize) -> Result<Self> {
        use Orbit::*;
        let rule = match degree {
            0..=2 => expand(&[A(1.0 / 6.0, 1.0 / 3.0)], 2),
            3..=4 => expand(
                &[
                    A(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_7),
                    A(0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64),
                ],
                4,
            ),
            5 => expand(
                &[
                    Centroid(0.225),
                    A(0.470_142_064_105_115_089_77, 0.132_394_152_788_506_180_74),
                    A(0.101_286_507_323_456_338_8, 0.125_939_180_544_827_152_6),
                ],
                5,
            ),
            6 => expand(
                &[
                    A(0.249_286_745_170_910_421_29, 0.116_786_275_726_379_366_03),
                    A(0.063_089_014_491_502_228_34, 0.050_844_906_370_206_816_921),
                    Ab(
                        0.053_145_049_844_816_947_353,
                        0.310_352_451_033_784_405_42,
                        0.082_851_075_618_373_575_194,
                    ),
                ],
                6,
            ),
            7..=8 => expand(
                &[
                    Centroid(0.144_315_607_677_787_168_25),
                    A(0.459_292_588_292_723_156_03, 0.095_091_634_267_284_624_794),
                    A(0.170_569_307_751_760_206_62, 0.103_217_370_534_718_250_28),
                    A(0.050_547_228_317_030_975_458, 0.032_458_497_623_198_080_311),
                    Ab(
                        0.008_394_777_409_957_605_337_2,
                        0.263_112_829_634_638_113_42,
                        0.027_230_314_174_434_994_265,
                    ),
                ],
                8,
            ),
            d => return Err(Error::UnsupportedDegree(d)),
        };
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl EdgeRule {
    /// Gauss-Legendre rule on [0, 1] exact up to `degree`.
    pub fn new(degree: usize) -> Result<Self> {
        let n = degree / 2 + 1;
        let (x, w): (Vec<f64>, Vec<f64>) = match n {
            1 => (vec![0.0], vec![2.0]),
            2 => {
                let a = (1.0f64 / 3.0).sqrt();
                (vec![-a, a], vec![1.0, 1.0])
            }
            3 => {
                let a = (0.6f64).sqrt();
                (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
            }
            4 => {
                let s = (6.0f64 / 5.0).sqrt();
                let a = (3.0 / 7.0 - 2.0 / 7.0 * s).sqrt();
                let b = (3.0 / 7.0 + 2.0 / 7.0 * s).sqrt();
                let r = 30.0f64.sqrt();
                let wa = (18.0 + r) / 36.0;
                let wb = (18.0 - r) / 36.0;
                (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
            }
            5 => {
                let s = 2.0 * (10.0f64 / 7.0).sqrt();
                let a = (5.0 - s).sqrt() / 3.0;
                let b = (5.0 + s).sqrt() / 3.0;
                let r = 13.0 * 70.0f64.sqrt();
                let wa = (322.0 + r) / 900.0;
                let wb = (322.0 - r) / 900.0;
                (vec![-b, -a, 0.0, a, b], vec![wb, wa, 128.0 / 225.0, wa, wb])
            }
            _ => return Err(Error::UnsupportedDegree(degree)),
        };
        Ok(EdgeRule {
            points: x.iter().map(|&x| 0.5 * (x + 1.0)).collect(),
            weights: w.iter().map(|&w| 0.5 * w).collect(),
            degree: 2 * n - 1,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Exact value of `∫_K λ1^a λ2^b λ3^c / |K|`.
pub fn moment(a: u32, b: u32, c: u32) -> f64 {
    let f = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
    2.0 * f(a) * f(b) * f(c) / f(a + b + c + 2)
}
