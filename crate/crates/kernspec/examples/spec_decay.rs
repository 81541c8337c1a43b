use kernspec::data::synth_binary_images;
use kernspec::kernels::{gram, KernelSpec, KernelFamily};
use kernspec::linalg::{sym_eig, DEFAULT_RANK_TOL};

fn main() {
    let ds = synth_binary_images(200, 28, 4.0, 9.0, 5);
    let spec = KernelSpec::new(KernelFamily::ScaledSquare).with_scale(784.0_f64.sqrt());
    let km = gram(ds.features.view(), &spec).unwrap();
    let eig = sym_eig(&km.gram, DEFAULT_RANK_TOL).unwrap();
    for r in [1usize, 5, 10, 20, 40, 60, 80, 100, 120, 150, 180, 200] {
        println!("d_{:<3} = {:.3e}  (rel {:.1e})", r, eig.values[r-1], eig.values[r-1] / eig.values[0]);
    }
}
