//! Independent numerical machinery for the acceptance suite: a general Jacobi
//! eigensolver, Gauss-Hermite quadrature derived from it, golden-section
//! minimization, finite-difference Hessians, and a seeded sampler of
//! admissible two-ion systems. Everything here is deliberately built from
//! first principles so it shares no formulas with the library under test.

use csltrap::constants::{COULOMB, HBAR};
use csltrap::csl::{CslParams, REFERENCE_MASS_KG};
use csltrap::modes::{mode_spectrum, Axis, ModeSpectrum, TwoIonSystem};
use csltrap::species::make_point_ion;
use csltrap::trap::TrapConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REL_FREQ: f64 = 1e-10;
pub const REL_HESSIAN: f64 = 1e-6;
pub const REL_QUADRATURE: f64 = 1e-6;

pub fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------------
// reference hardware

pub fn reference_trap() -> TrapConfig {
    TrapConfig::new(0.248, 5.2e6, 2.03, 2.63, 4.68, 720.4)
}

pub fn reference_system() -> TwoIonSystem {
    TwoIonSystem::new(
        reference_trap(),
        make_point_ion(138.0, 1.0).unwrap(),
        make_point_ion(8676.0, 24.0).unwrap(),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver (cyclic sweeps, full symmetric storage)

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns (`vecs[row][col]`).
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let fro: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();

    for _sweep in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * fro.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                // zero a[p][q]: tan of the rotation from the stable quadratic root
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n)
        .map(|r| order.iter().map(|&cidx| v[r][cidx]).collect())
        .collect();
    (vals, vecs)
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature (Golub-Welsch on the recurrence tridiagonal)

/// Nodes and weights for integrals of the form `int e^{-x^2} f(x) dx`.
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        // Hermite three-term recurrence: diagonal 0, off-diagonal sqrt(k/2);
        // eigenvalues are the nodes, weights are sqrt(pi) * v0^2.
        let mut j = vec![vec![0.0; n]; n];
        for k in 1..n {
            let b = (k as f64 / 2.0).sqrt();
            j[k - 1][k] = b;
            j[k][k - 1] = b;
        }
        let (nodes, vecs) = jacobi_eigen(j);
        let weights = (0..n)
            .map(|c| std::f64::consts::PI.sqrt() * vecs[0][c] * vecs[0][c])
            .collect();
        GaussHermite { nodes, weights }
    }

    pub fn sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Point-like collapse heating computed from the pre-integration k-space form
///
/// `P = lambda hbar^2 rc^3 / (2 pi^{3/2} m0^2)
///      * sum_ij sqrt(m_i m_j) w_i w_j int d^3k e^{-k^2 rc^2} k_u^2 cos(k_z dz_ij)`
///
/// with `u` the mode axis. After substituting `x = k rc` the triple integral
/// factors into 1D Gauss-Hermite sums. Pairs separated by more than 12 rc are
/// dropped: their Gaussian overlap is below e^{-36}, far under the comparison
/// tolerance.
pub fn gh_pointlike_power(
    gh: &GaussHermite,
    masses_kg: [f64; 2],
    mode_weights: [f64; 2],
    z_m: [f64; 2],
    axis: Axis,
    params: &CslParams,
) -> f64 {
    let rc = params.rc_m;
    let a0 = gh.sum(|_| 1.0);
    let a2 = gh.sum(|x| x * x);
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let c = (z_m[i] - z_m[j]) / rc;
            if c.abs() > 12.0 {
                continue;
            }
            let t = match axis {
                Axis::Axial => a0 * a0 * gh.sum(|x| x * x * (c * x).cos()),
                Axis::Radial => a2 * a0 * gh.sum(|x| (c * x).cos()),
            };
            s += (masses_kg[i] * masses_kg[j]).sqrt() * mode_weights[i] * mode_weights[j] * t;
        }
    }
    params.lambda_per_s * HBAR * HBAR * rc * rc * rc
        / (2.0 * std::f64::consts::PI.powf(1.5) * REFERENCE_MASS_KG * REFERENCE_MASS_KG)
        * s
        / rc.powi(5)
}

// ---------------------------------------------------------------------------
// golden-section minimization

/// Minimum of a unimodal function on `[a, b]` by golden-section search.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

// ---------------------------------------------------------------------------
// full crystal potential and finite-difference Hessian

/// Total potential energy in the pseudopotential picture as a function of
/// `(z1, z2, x1, x2)`: per-ion harmonic wells plus the Coulomb pair term.
pub fn full_potential(sys: &TwoIonSystem) -> impl Fn(&[f64; 4]) -> f64 {
    let (m1, m2) = (sys.ion1().mass_kg(), sys.ion2().mass_kg());
    let (w1z, w1r) = (sys.freqs1().omega_z, sys.freqs1().omega_r);
    let (w2z, w2r) = (sys.freqs2().omega_z, sys.freqs2().omega_r);
    let coulomb = COULOMB * sys.ion1().charge_c() * sys.ion2().charge_c();
    move |x: &[f64; 4]| {
        let (z1, z2, x1, x2) = (x[0], x[1], x[2], x[3]);
        0.5 * m1 * w1z * w1z * z1 * z1
            + 0.5 * m2 * w2z * w2z * z2 * z2
            + 0.5 * m1 * w1r * w1r * x1 * x1
            + 0.5 * m2 * w2r * w2r * x2 * x2
            + coulomb / ((z1 - z2).powi(2) + (x1 - x2).powi(2)).sqrt()
    }
}

/// Central-difference Hessian with per-coordinate steps `h`.
pub fn fd_hessian(f: impl Fn(&[f64; 4]) -> f64, x0: [f64; 4], h: [f64; 4]) -> [[f64; 4]; 4] {
    let f0 = f(&x0);
    let at = |steps: &[(usize, f64)]| {
        let mut x = x0;
        for &(i, dx) in steps {
            x[i] += dx;
        }
        f(&x)
    };
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        out[i][i] = (at(&[(i, h[i])]) - 2.0 * f0 + at(&[(i, -h[i])])) / (h[i] * h[i]);
        for j in (i + 1)..4 {
            let mixed = (at(&[(i, h[i]), (j, h[j])])
                - at(&[(i, h[i]), (j, -h[j])])
                - at(&[(i, -h[i]), (j, h[j])])
                + at(&[(i, -h[i]), (j, -h[j])]))
                / (4.0 * h[i] * h[j]);
            out[i][j] = mixed;
            out[j][i] = mixed;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// seeded sampler of admissible systems

pub struct Sampled {
    pub system: TwoIonSystem,
    pub spectrum: ModeSpectrum,
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Rejection-samples systems over mass ratio [0.1, 100], charge ratio
/// [0.5, 50], endcap voltage [1, 15] V and drive voltage [300, 1200] V until
/// `n` of them are fully admissible (both ions confined, crystal axially
/// aligned, no soft or degenerate modes).
pub fn sample_admissible(seed: u64, n: usize) -> Vec<Sampled> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        assert!(
            attempts <= 200 * n,
            "admissible-system sampler kept only {} of {attempts} draws",
            out.len()
        );
        let m_ratio = log_uniform(&mut rng, 0.1, 100.0);
        let q_ratio = log_uniform(&mut rng, 0.5, 50.0);
        let v_end = log_uniform(&mut rng, 1.0, 15.0);
        let v_rf = log_uniform(&mut rng, 300.0, 1200.0);
        let trap = TrapConfig::new(0.248, 5.2e6, 2.03, 2.63, v_end, v_rf);
        let ion1 = make_point_ion(138.0, 1.0).unwrap();
        let ion2 = make_point_ion(138.0 * m_ratio, q_ratio).unwrap();
        let Ok(system) = TwoIonSystem::new(trap, ion1, ion2) else {
            continue;
        };
        let Ok(spectrum) = mode_spectrum(&system) else {
            continue;
        };
        out.push(Sampled { system, spectrum });
    }
    out
}
