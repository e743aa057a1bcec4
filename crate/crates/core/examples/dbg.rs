use icd_core::complex::Triangulation;
use icd_core::label::{solve_sphere, SolveOptions};
use icd_core::layout::normalize_barycenter;

fn main() {
    // Tetrahedron
    let tet = Triangulation::build_from_faces(&[[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]]).unwrap();
    let (p, _) = solve_sphere(&tet, 3, SolveOptions::default()).unwrap();
    println!("tet raw residual {:.3e}", p.tangency_residual());
    let b = normalize_barycenter(&p).unwrap();
    let want = (-1.0f64 / 3.0).acos() / 2.0;
    for v in 0..4 {
        let c = b.sphere_cap(v).unwrap();
        println!("tet v{} rho {:.12} (want {:.12}) err {:.2e}", v, c.radius, want, (c.radius - want).abs());
    }
    println!("tet norm residual {:.3e}", b.tangency_residual());

    // Octahedron: vertices 0..5, 8 faces
    let oct = Triangulation::build_from_faces(&[
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1],
        [5, 2, 1], [5, 3, 2], [5, 4, 3], [5, 1, 4],
    ]).unwrap();
    assert!(oct.is_sphere());
    let (p, _) = solve_sphere(&oct, 0, SolveOptions::default()).unwrap();
    let b = normalize_barycenter(&p).unwrap();
    for v in 0..6 {
        let c = b.sphere_cap(v).unwrap();
        println!("oct v{} rho {:.12} want {:.12} err {:.2e}", v, c.radius, std::f64::consts::FRAC_PI_4, (c.radius - std::f64::consts::FRAC_PI_4).abs());
    }
    println!("oct norm residual {:.3e}", b.tangency_residual());
}
