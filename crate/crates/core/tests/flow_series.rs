//! Series-mode checks of the coupling step: the remainders R1 and R2
//! must vanish identically at orders one and two in the coupling.

use num_complex::Complex64;
use rgw_core::algebra::Algebra;
use rgw_core::covariance::MapCovariance;
use rgw_core::flow::{r1_series, r2_series, FlowEnv, MapFamily, SeriesEnv};
use rgw_core::lattice::TorusLattice;
use rgw_core::localpoly::{Couplings, ObservablePoints};

fn synthetic_family(d: usize, n_scales: usize) -> MapFamily<Complex64> {
    let mut kernels = Vec::new();
    for j in 1..=n_scales {
        let mut k = MapCovariance::<Complex64>::new(d, 1 + j as i64);
        k.insert(&vec![0; d], Complex64::new(0.4 / j as f64, 0.0));
        let mut e = vec![0i64; d];
        e[0] = 1;
        k.insert(&e, Complex64::new(0.12 / j as f64, 0.0));
        if j >= 2 {
            let mut e2 = vec![0i64; d];
            e2[0] = 1;
            if d > 1 {
                e2[1] = 1;
            }
            k.insert(&e2, Complex64::new(0.05, 0.0));
            let mut e3 = vec![0i64; d];
            e3[0] = 2;
            k.insert(&e3, Complex64::new(0.03, 0.0));
        }
        kernels.push(k);
    }
    MapFamily::new(n_scales, kernels, None, d)
}

fn sample_couplings() -> Couplings<Complex64> {
    Couplings {
        g: Complex64::new(0.31, 0.02),
        nu: Complex64::new(-0.17, 0.01),
        z: Complex64::new(0.09, 0.0),
        y: Complex64::new(0.06, 0.0),
        lambda_a: Complex64::new(0.8, 0.05),
        lambda_b: Complex64::new(0.7, 0.0),
        q_a: Complex64::new(0.0, 0.0),
        q_b: Complex64::new(0.0, 0.0),
    }
}

#[test]
fn r1_vanishes_through_second_order() {
    let lat = TorusLattice::new(2, 2, 3).unwrap();
    let fam = synthetic_family(2, 3);
    let obs = ObservablePoints {
        a: lat.site(&[0, 0]),
        b: lat.site(&[5, 2]),
    };
    let env = FlowEnv {
        lat: &lat,
        fam: &fam,
        obs,
        j_ab: 10,
        alg: Algebra::with_cap(12),
    };
    let j = 1usize;
    let c = sample_couplings();
    let senv = SeriesEnv::new(&env, j, 2, c);
    // b: a scale-1 block inside B, a scale-2 block
    let big_block = lat.block_of(lat.site(&[1, 1]), j + 1);
    let big_sites = lat.block_sites(big_block, j + 1);
    let small_block = lat.block_of(lat.site(&[1, 1]), j);
    let small_sites = lat.block_sites(small_block, j);
    let r1 = r1_series(&senv, &small_sites, &big_sites).unwrap();
    assert!(r1.sup_at(0) < 1e-12, "order 0: {}", r1.sup_at(0));
    assert!(r1.sup_at(1) < 1e-10, "order 1: {}", r1.sup_at(1));
    assert!(r1.sup_at(2) < 1e-9, "order 2: {}", r1.sup_at(2));
}

#[test]
fn r2_vanishes_through_second_order() {
    let lat = TorusLattice::new(2, 2, 3).unwrap();
    let fam = synthetic_family(2, 3);
    let obs = ObservablePoints {
        a: lat.site(&[0, 0]),
        b: lat.site(&[5, 2]),
    };
    let env = FlowEnv {
        lat: &lat,
        fam: &fam,
        obs,
        j_ab: 10,
        alg: Algebra::with_cap(12),
    };
    let j = 1usize;
    let c = sample_couplings();
    let senv = SeriesEnv::new(&env, j, 2, c);
    let u_block = lat.block_of(lat.site(&[1, 1]), j + 1);
    let u_sites = lat.block_sites(u_block, j + 1);
    // two distinct scale-1 blocks inside U
    let b1 = lat.block_of(lat.site(&[0, 0]), j);
    let b2 = lat.block_of(lat.site(&[2, 2]), j);
    assert_ne!(b1, b2);
    let s1 = lat.block_sites(b1, j);
    let s2 = lat.block_sites(b2, j);
    let blocks_u: Vec<Vec<usize>> = lat
        .block_sites(u_block, j + 1)
        .chunks(1)
        .map(|_| Vec::new())
        .take(0)
        .collect();
    // group U's sites into its scale-j blocks
    let mut by_block = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for &x in &u_sites {
        by_block.entry(lat.block_of(x, j)).or_default().push(x);
    }
    let blocks_u: Vec<Vec<usize>> = {
        let _ = blocks_u;
        by_block.into_values().collect()
    };
    let r2 = r2_series(&senv, &s1, &s2, &blocks_u).unwrap();
    assert!(r2.sup_at(0) < 1e-12, "order 0: {}", r2.sup_at(0));
    assert!(r2.sup_at(1) < 1e-10, "order 1: {}", r2.sup_at(1));
    assert!(r2.sup_at(2) < 1e-9, "order 2: {}", r2.sup_at(2));
}
