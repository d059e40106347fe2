#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use bellscope::linalg::ComplexMatrix;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn normal_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(G + G†)/2` for a complex Gaussian `G`.
pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| normal_complex(rng));
    g.hermitian_part()
}

/// Haar-random SU(2) element `[[a, -b*], [b, a*]]`.
pub fn random_su2<R: Rng>(rng: &mut R) -> ComplexMatrix {
    let (a, b) = (normal_complex(rng), normal_complex(rng));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    ComplexMatrix::from_vec(2, 2, vec![a, -b.conj(), b, a.conj()]).unwrap()
}

/// Uniform random unit vector in R³.
pub fn random_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    let v: [f64; 3] = [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / n)
}
