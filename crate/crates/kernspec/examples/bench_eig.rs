use kernspec::linalg::{sym_eig, SymMatrix, DEFAULT_RANK_TOL};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

fn main() {
    for &n in &[400usize, 1000] {
        let mut rng = Pcg64::seed_from_u64(1);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let d = xs[i] - xs[j];
                a[[i, j]] = (-d * d / 2.0).exp();
            }
        }
        let sym = SymMatrix::new(a).unwrap();
        let t = std::time::Instant::now();
        let eig = sym_eig(&sym, DEFAULT_RANK_TOL).unwrap();
        println!("n={} took {:?} d1={:.4} dn={:.3e}", n, t.elapsed(), eig.values[0], eig.values[n-1]);
    }
}
