//! Hemisphere hidden-variable model for a qubit.
//!
//! Ontic states are unit vectors on the Bloch sphere. Preparing `psi` samples
//! `lambda` with density `max(0, psi . lambda) / pi`; measuring along `a`
//! answers `+` exactly when `a . lambda >= 0`.
//!
//! Integrals are taken in a frame whose pole is the preparation vector, so
//! `mu_psi` depends only on `z = psi . lambda`. The azimuthal integral of
//! every integrand is closed-form, leaving a one-dimensional integral over
//! `z` evaluated by midpoint bands.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Execution};

pub const UNIT_TOL: f64 = 1e-12;
pub const MIN_RESOLUTION: usize = 64;
/// Bands used by the reported quadratures; errors are below 1e-7.
pub const DEFAULT_RESOLUTION: usize = 16384;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = BlochVector { x, y, z };
        v.check()?;
        Ok(v)
    }

    /// Rescales any nonzero finite vector to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(BlochVector {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    /// Polar angle `theta` from +z, azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        BlochVector {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn neg(&self) -> Self {
        BlochVector {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.dot(self);
        if (n - 1.0).abs() > UNIT_TOL || !n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Bloch vector has squared norm {n}, expected 1"
            )));
        }
        Ok(())
    }
}

/// `max(0, psi . lambda) / pi` per unit solid angle.
pub fn mu_density(psi: &BlochVector, lambda: &BlochVector) -> Result<f64> {
    psi.check()?;
    lambda.check()?;
    Ok(psi.dot(lambda).max(0.0) / PI)
}

/// 1 when `a . lambda >= 0`, else 0; ties go to `+`.
pub fn response(a: &BlochVector, lambda: &BlochVector) -> u8 {
    u8::from(a.dot(lambda) >= 0.0)
}

fn check_resolution(n: usize) -> Result<()> {
    if n < MIN_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "quadrature resolution {n} is below {MIN_RESOLUTION}"
        )));
    }
    Ok(())
}

/// Half-width of the azimuth set where `A + B cos(phi) >= t`.
fn half_arc(a: f64, b: f64, t: f64) -> f64 {
    if b <= 0.0 {
        return if a >= t { PI } else { 0.0 };
    }
    ((t - a) / b).clamp(-1.0, 1.0).acos()
}

/// Components of `v` along `pole` and orthogonal to it.
fn split(v: &BlochVector, pole: &BlochVector) -> (f64, f64) {
    let along = v.dot(pole).clamp(-1.0, 1.0);
    (along, (1.0 - along * along).max(0.0).sqrt())
}

/// Probability of outcome `+` along `a` for preparation `psi`.
pub fn born_quadrature(a: &BlochVector, psi: &BlochVector, n: usize) -> Result<f64> {
    born_quadrature_with(a, psi, n, Execution::default())
}

/// The integrand `z * arc(z) / pi` is smooth except for a square-root kink
/// at `z* = sin(angle(a, psi))`, beyond which the arc is full or empty. The
/// bands on `[0, z*]` are graded as `z = z*(1 - (1 - u)^2)` with `u` uniform,
/// which removes the kink; `[z*, 1]` integrates exactly.
pub fn born_quadrature_with(
    a: &BlochVector,
    psi: &BlochVector,
    n: usize,
    exec: Execution,
) -> Result<f64> {
    a.check()?;
    psi.check()?;
    check_resolution(n)?;
    let (az, a_s) = split(a, psi);
    let zs = a_s;
    let h = 1.0 / n as f64;
    let terms = exec.map_indexed(n, |k| {
        let u = (k as f64 + 0.5) * h;
        let z = zs * (1.0 - (1.0 - u) * (1.0 - u));
        let w = 2.0 * zs * (1.0 - u) * h;
        let b = a_s * (1.0 - z * z).max(0.0).sqrt();
        w * z * 2.0 * half_arc(az * z, b, 0.0)
    });
    let outer = if az >= 0.0 { PI * (1.0 - zs * zs) } else { 0.0 };
    Ok(((pairwise_sum(&terms) + outer) / PI).clamp(0.0, 1.0))
}

/// `int min(mu_psi, mu_phi) dOmega`.
pub fn classical_overlap_ks(psi: &BlochVector, phi: &BlochVector, n: usize) -> Result<f64> {
    classical_overlap_ks_with(psi, phi, n, Execution::default())
}

/// With `A = cos(theta) z`, `B = sin(theta) sqrt(1 - z^2)`, the azimuthal
/// integral of `min(z, max(0, A + B cos phi))` is
/// `2[A a0 + B sin a0] - 2[A az + B sin az] + 2 z az`, where `a0` and `az`
/// are the half-arcs on which `A + B cos phi` exceeds 0 and `z`.
pub fn classical_overlap_ks_with(
    psi: &BlochVector,
    phi: &BlochVector,
    n: usize,
    exec: Execution,
) -> Result<f64> {
    psi.check()?;
    phi.check()?;
    check_resolution(n)?;
    let (c, s) = split(phi, psi);
    let h = 1.0 / n as f64;
    let terms = exec.map_indexed(n, |k| {
        let z = (k as f64 + 0.5) * h;
        let a = c * z;
        let b = s * (1.0 - z * z).max(0.0).sqrt();
        let a0 = half_arc(a, b, 0.0);
        let az = half_arc(a, b, z);
        let inner = 2.0 * (a * a0 + b * a0.sin()) - 2.0 * (a * az + b * az.sin()) + 2.0 * z * az;
        inner * h
    });
    Ok((pairwise_sum(&terms) / PI).clamp(0.0, 1.0))
}

/// Qubit quantum overlap for Bloch angle `theta`: `1 - sin(theta / 2)`.
pub fn quantum_overlap_angle(theta: f64) -> f64 {
    1.0 - (theta / 2.0).sin()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapRow {
    pub theta: f64,
    pub classical: f64,
    pub quantum: f64,
    /// `classical / quantum`; `None` at `theta = pi`.
    pub ratio: Option<f64>,
}

/// Overlaps between `+z` and a state at Bloch angle `theta` for `points`
/// evenly spaced angles in `[0, pi]`.
pub fn overlap_grid(points: usize, n: usize, exec: Execution) -> Result<Vec<OverlapRow>> {
    if points < 2 {
        return Err(Error::InvalidParameter(
            "grid needs at least 2 points".into(),
        ));
    }
    check_resolution(n)?;
    let pole = BlochVector::from_angles(0.0, 0.0);
    (0..points)
        .map(|k| {
            let theta = PI * k as f64 / (points - 1) as f64;
            let classical =
                classical_overlap_ks_with(&pole, &BlochVector::from_angles(theta, 0.0), n, exec)?;
            let quantum = quantum_overlap_angle(theta);
            Ok(OverlapRow {
                theta,
                classical,
                quantum,
                ratio: (k + 1 < points).then(|| classical / quantum),
            })
        })
        .collect()
}

pub fn write_grid_csv<W: std::io::Write>(rows: &[OverlapRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "l_c", "l_q", "k"])?;
    for r in rows {
        w.write_record([
            r.theta.to_string(),
            r.classical.to_string(),
            r.quantum.to_string(),
            r.ratio.map(|k| k.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Equal-area grid over the whole sphere evaluating the model's
    /// densities and responses pointwise.
    fn brute_force<F: Fn(&BlochVector) -> f64>(f: F, bands: usize, sectors: usize) -> f64 {
        let mut total = 0.0;
        let cell = (2.0 / bands as f64) * (2.0 * PI / sectors as f64);
        for i in 0..bands {
            let z = -1.0 + (i as f64 + 0.5) * 2.0 / bands as f64;
            let r = (1.0 - z * z).sqrt();
            let mut row = 0.0;
            for j in 0..sectors {
                let p = (j as f64 + 0.5) * 2.0 * PI / sectors as f64;
                row += f(&BlochVector {
                    x: r * p.cos(),
                    y: r * p.sin(),
                    z,
                });
            }
            total += row * cell;
        }
        total
    }

    fn random_unit(rng: &mut ChaCha8Rng) -> BlochVector {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let p: f64 = rng.gen_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).sqrt();
        BlochVector::normalized(r * p.cos(), r * p.sin(), z).unwrap()
    }

    #[test]
    fn density_examples() {
        let psi = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(mu_density(&psi, &psi).unwrap(), 1.0 / PI);
        assert_eq!(mu_density(&psi, &psi.neg()).unwrap(), 0.0);
        let half = BlochVector::from_angles(PI / 3.0, 0.4);
        assert!((mu_density(&psi, &half).unwrap() - 0.5 / PI).abs() < 1e-15);
        assert!(mu_density(
            &psi,
            &BlochVector {
                x: 1.0,
                y: 1.0,
                z: 0.0
            }
        )
        .is_err());
        assert!(BlochVector::new(0.0, 0.0, 1.1).is_err());
    }

    #[test]
    fn density_is_normalized() {
        let psi = BlochVector::from_angles(0.7, 1.9);
        let mass = brute_force(|l| mu_density(&psi, l).unwrap(), 800, 800);
        assert!((mass - 1.0).abs() < 1e-4, "{mass}");
    }

    #[test]
    fn response_examples() {
        let a = BlochVector::from_angles(1.0, 2.0);
        assert_eq!(response(&a, &a), 1);
        assert_eq!(response(&a, &a.neg()), 0);
        let e = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        let ez = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(response(&e, &ez), 1);
        assert_eq!(response(&e.neg(), &ez), 1);
    }

    #[test]
    fn born_examples() {
        let psi = BlochVector::from_angles(0.3, -1.2);
        let n = DEFAULT_RESOLUTION;
        assert!((born_quadrature(&psi, &psi, n).unwrap() - 1.0).abs() < 1e-6);
        assert!(born_quadrature(&psi.neg(), &psi, n).unwrap().abs() < 1e-6);
        let ortho = BlochVector::from_angles(0.3 + PI / 2.0, -1.2);
        assert!((born_quadrature(&ortho, &psi, n).unwrap() - 0.5).abs() < 1e-6);
        assert!(born_quadrature(&psi, &psi, 63).is_err());
    }

    #[test]
    fn born_reproduction_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (a, psi) = (random_unit(&mut rng), random_unit(&mut rng));
            let got = born_quadrature(&a, &psi, DEFAULT_RESOLUTION).unwrap();
            assert!((got - (1.0 + a.dot(&psi)) / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn born_matches_brute_force() {
        let a = BlochVector::from_angles(2.1, 0.3);
        let psi = BlochVector::from_angles(0.4, -2.0);
        let oracle = brute_force(
            |l| f64::from(response(&a, l)) * mu_density(&psi, l).unwrap(),
            1500,
            1500,
        );
        let got = born_quadrature(&a, &psi, DEFAULT_RESOLUTION).unwrap();
        assert!((got - oracle).abs() < 1e-3, "{got} vs {oracle}");
    }

    #[test]
    fn overlap_examples() {
        let psi = BlochVector::from_angles(1.1, 0.5);
        let n = DEFAULT_RESOLUTION;
        assert!((classical_overlap_ks(&psi, &psi, n).unwrap() - 1.0).abs() < 1e-6);
        assert!(classical_overlap_ks(&psi, &psi.neg(), n).unwrap() < 1e-6);
    }

    #[test]
    fn overlap_at_right_angle_matches_brute_force() {
        let psi = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let phi = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        let got = classical_overlap_ks(&psi, &phi, DEFAULT_RESOLUTION).unwrap();
        let oracle = brute_force(
            |l| {
                mu_density(&psi, l)
                    .unwrap()
                    .min(mu_density(&phi, l).unwrap())
            },
            2000,
            2000,
        );
        assert!((got - oracle).abs() < 1e-4, "{got} vs {oracle}");
        // Frozen from a 2^20-band run; two resolutions agree to 1e-12.
        assert!((got - 0.292_893_22).abs() < 1e-7, "{got}");
        let fine = classical_overlap_ks(&psi, &phi, 1 << 20).unwrap();
        assert!((fine - 0.292_893_22).abs() < 1e-8, "{fine}");
    }

    #[test]
    fn grid_properties() {
        let rows = overlap_grid(50, DEFAULT_RESOLUTION, Execution::default()).unwrap();
        assert!((rows[0].classical - 1.0).abs() < 1e-6);
        assert!(rows[49].classical.abs() < 1e-6);
        assert_eq!(rows[49].ratio, None);
        for w in rows.windows(2) {
            assert!(w[1].classical < w[0].classical);
        }
        for r in &rows {
            assert!(r.classical <= r.quantum + 1e-6);
            if let Some(k) = r.ratio {
                assert!(k > 0.0 && k.is_finite());
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = BlochVector::from_angles(0.9, 0.1);
        let b = BlochVector::from_angles(2.0, 1.0);
        assert_eq!(
            born_quadrature_with(&a, &b, 1000, Execution::Sequential).unwrap(),
            born_quadrature_with(&a, &b, 1000, Execution::Parallel).unwrap()
        );
        assert_eq!(
            classical_overlap_ks_with(&a, &b, 1000, Execution::Sequential).unwrap(),
            classical_overlap_ks_with(&a, &b, 1000, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn grid_csv_header() {
        let rows = overlap_grid(3, 64, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta,l_c,l_q,k\n"));
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().last().unwrap().ends_with(','));
    }
}
