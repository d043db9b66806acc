use num_complex::Complex64;
use rgw_core::algebra::Algebra;
use rgw_core::covariance::MapCovariance;
use rgw_core::flow::{FlowEnv, MapFamily, SeriesEnv};
use rgw_core::lattice::TorusLattice;
use rgw_core::localpoly::{Couplings, ObservablePoints};

#[test]
fn probe_order1() {
    let d = 2;
    let lat = TorusLattice::new(2, 2, 3).unwrap();
    let mut kernels = Vec::new();
    for j in 1..=3usize {
        let mut k = MapCovariance::<Complex64>::new(d, 1 + j as i64);
        k.insert(&vec![0; d], Complex64::new(0.4 / j as f64, 0.0));
        let mut e = vec![0i64; d];
        e[0] = 1;
        k.insert(&e, Complex64::new(0.12 / j as f64, 0.0));
        kernels.push(k);
    }
    let fam = MapFamily::new(3, kernels, None, d);
    let obs = ObservablePoints { a: lat.site(&[0,0]), b: lat.site(&[5,2]) };
    let env = FlowEnv { lat: &lat, fam: &fam, obs, j_ab: 10, alg: Algebra::with_cap(12) };
    let c = Couplings {
        g: Complex64::new(0.31, 0.0),
        nu: Complex64::new(-0.17, 0.0),
        z: Complex64::new(0.09, 0.0),
        y: Complex64::new(0.06, 0.0),
        lambda_a: Complex64::new(0.0, 0.0),
        lambda_b: Complex64::new(0.0, 0.0),
        q_a: Complex64::new(0.0, 0.0),
        q_b: Complex64::new(0.0, 0.0),
    };
    let senv = SeriesEnv::new(&env, 1, 2, c);
    let block = lat.block_of(lat.site(&[1,1]), 1);
    let sites = lat.block_sites(block, 1);
    let di = senv.delta_i_block(&sites).unwrap();
    let edi = senv.expect(&di).unwrap();
    println!("E dI order1 sup = {}", edi.sup_at(1));
    println!("order1 terms:\n{}", edi.coeffs[1].canonical_text());
}
