//! Automorphism pools, symmetry certificates, and what a certificate predicts
//! for the computed spectrum.

use anderson_lab::symmetry::{
    automorphism_pool, find_certificate, group_order, observe_certificate, CertificateSearch, DEFAULT_POOL_CAP,
};
use anderson_lab::{Potential, TorusGrid};

fn main() -> anderson_lab::Result<()> {
    for dims in [vec![5usize], vec![3, 3], vec![3, 4], vec![4, 4]] {
        let grid = TorusGrid::new(&dims)?;
        let pool = automorphism_pool(&grid, DEFAULT_POOL_CAP)?;
        println!("{dims:?}: group order {}, pool size {}", group_order(&grid), pool.len());
    }
    println!();

    let cases = [
        (vec![7usize], vec![1.0, -1.0, 1.0, 1.0, 1.0, 1.0, -1.0]),
        (vec![4], vec![1.0, -1.0, 1.0, -1.0]),
        (vec![3, 3], vec![1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0]),
        (vec![7], vec![1.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0]),
    ];
    for (dims, values) in cases {
        let grid = TorusGrid::new(&dims)?;
        let v = Potential::explicit(values);
        match find_certificate(&grid, &v, DEFAULT_POOL_CAP)? {
            CertificateSearch::Found(cert) => {
                println!("{dims:?} {:?}", v.values());
                println!("    {:?}", cert.descriptor);
                println!(
                    "    order {} fixed points {:?} reason {:?}",
                    cert.order, cert.fixed_points, cert.reason
                );
                for t in [0.7, 1.3] {
                    let obs = observe_certificate(&grid, &v, &cert, t, 1e-6)?;
                    println!(
                        "    t={t}: min gap {:.2e}, fixed-point entry {:?}, visible {}",
                        obs.min_gap, obs.fixed_point_entry, obs.visible
                    );
                }
            }
            other => println!("{dims:?} {:?}: {other:?}", v.values()),
        }
    }

    // 3x3x3x3x3x3 has too many group elements for the default cap.
    let big = TorusGrid::new(&[3; 6])?;
    let search = find_certificate(&big, &Potential::constant(1.0, big.n()), 1000)?;
    println!("\n[3; 6] with cap 1000: {search:?}");
    Ok(())
}
