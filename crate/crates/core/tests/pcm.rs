use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector3};
use solvaq::chem::{AOBasis, BasisLibrary, Geometry, LengthUnit};
use solvaq::pcm::{
    assemble_operators, build_cavity, fock_contribution, molecular_potential, solve_surface_charge, CavityConfig,
    CavitySurface, DielectricParams, PcmContext, Sphere, SurfaceChargeSolution, Tessera, SUPPORTED_GRIDS,
};

const BORN_EXACT: f64 = -0.5 * (1.0 - 1.0 / 80.0) * 0.5;

fn ion_cavity(points: usize) -> CavitySurface {
    let g = Geometry::parse_xyz("1\n\nH 0 0 0", LengthUnit::Bohr).unwrap();
    let cfg = CavityConfig { radii: [("H".to_string(), 2.0)].into(), scale: 1.0, points_per_sphere: points };
    build_cavity(&g, &cfg).unwrap()
}

fn born(points: usize, eps: f64) -> SurfaceChargeSolution {
    let surface = ion_cavity(points);
    let ops = assemble_operators(&surface).unwrap();
    let phi = DVector::from_iterator(surface.len(), surface.tesserae.iter().map(|t| 1.0 / t.position.norm()));
    solve_surface_charge(&ops, DielectricParams::new(eps).unwrap(), &phi).unwrap()
}

#[test]
fn born_ion_energy_and_grid_refinement() {
    let mut last = f64::INFINITY;
    for n in SUPPORTED_GRIDS {
        let err = ((born(n, 80.0).polarization_energy - BORN_EXACT) / BORN_EXACT).abs();
        assert!(err < last, "error did not decrease at {n}: {err} ≥ {last}");
        last = err;
    }
    assert!(last < 0.01, "590-point relative error {last}");
}

#[test]
fn born_ion_gauss_law() {
    let total: f64 = born(590, 80.0).charges.sum();
    assert!((total + 79.0 / 80.0).abs() < 0.01, "{total}");
}

#[test]
fn vacuum_limit_charges_vanish() {
    let sol = born(302, 1.0 + 1e-8);
    assert!(sol.charges.amax() <= 1e-6);
}

#[test]
fn double_layer_gauss_identity_on_sphere() {
    let surface = ion_cavity(590);
    let ops = assemble_operators(&surface).unwrap();
    for i in 0..surface.len() {
        let full: f64 = (0..surface.len()).map(|j| ops.d[(i, j)] * ops.areas[j]).sum();
        assert!(((full + 2.0 * PI) / (2.0 * PI)).abs() < 0.01);
        assert!((full + 2.0 * PI).abs() < 1e-10);
    }
    assert!((&ops.s - ops.s.transpose()).amax() == 0.0);
}

#[test]
fn conductor_limit() {
    let surface = ion_cavity(302);
    let ops = assemble_operators(&surface).unwrap();
    let phi = DVector::from_iterator(
        surface.len(),
        surface.tesserae.iter().map(|t| 1.0 / (t.position - Vector3::new(0.3, -0.2, 0.5)).norm()),
    );
    let eps = 1e6;
    let ief = solve_surface_charge(&ops, DielectricParams::new(eps).unwrap(), &phi).unwrap();
    let cond = ops.s.clone().lu().solve(&(-&phi * ((eps - 1.0) / eps))).unwrap();
    let rel = (&ief.charges - &cond).amax() / cond.amax();
    assert!(rel < 1e-3, "{rel}");
}

#[test]
fn linearity_and_reciprocity() {
    let surface = ion_cavity(194);
    let ops = assemble_operators(&surface).unwrap();
    let diel = DielectricParams::default();
    let phi = DVector::from_iterator(surface.len(), (0..surface.len()).map(|i| ((i * 37) % 11) as f64 * 0.1 - 0.4));
    let a = solve_surface_charge(&ops, diel, &phi).unwrap();
    let alpha = -2.75;
    let b = solve_surface_charge(&ops, diel, &(&phi * alpha)).unwrap();
    let scale = a.charges.amax();
    assert!((&b.charges - &a.charges * alpha).amax() <= 1e-13 * scale.max(1.0) * alpha.abs());

    let via_sigma: f64 = 0.5 * (0..surface.len()).map(|i| a.sigma[i] * ops.areas[i] * phi[i]).sum::<f64>();
    assert!((via_sigma - a.polarization_energy).abs() < 1e-12);
}

#[test]
fn point_charge_potential() {
    let g = Geometry::parse_xyz("1\n\nH 0 0 0", LengthUnit::Bohr).unwrap();
    let b = AOBasis::build(&g, &BasisLibrary::load("sto-3g").unwrap()).unwrap();
    let surface = CavitySurface {
        tesserae: vec![Tessera {
            position: Vector3::new(0.0, 0.0, 2.0),
            normal: Vector3::z(),
            area: 0.1,
            sphere: 0,
        }],
        spheres: vec![Sphere { center: Vector3::zeros(), radius: 2.0 }],
    };
    let phi = molecular_potential(&DMatrix::zeros(1, 1), &g, &b, &surface);
    assert!((phi[0] - 0.5).abs() < 1e-15);
}

#[test]
fn neutral_spherical_atom_far_field() {
    let g = Geometry::parse_xyz("1\n\nHe 0 0 0", LengthUnit::Bohr).unwrap();
    let b = AOBasis::build(&g, &BasisLibrary::load("cc-pvdz").unwrap()).unwrap();
    // doubly occupy the normalized 1s function
    let mut p = DMatrix::zeros(b.n_ao(), b.n_ao());
    p[(0, 0)] = 2.0;
    let surface = CavitySurface {
        tesserae: vec![Tessera { position: Vector3::new(0.0, 100.0, 0.0), normal: Vector3::y(), area: 1.0, sphere: 0 }],
        spheres: vec![Sphere { center: Vector3::zeros(), radius: 100.0 }],
    };
    let phi = molecular_potential(&p, &g, &b, &surface);
    assert!(phi[0].abs() <= 1e-4, "{}", phi[0]);
}

#[test]
fn unit_charge_far_from_s_function_is_monopole() {
    let g = Geometry::parse_xyz("1\n\nHe 0 0 0", LengthUnit::Bohr).unwrap();
    let b = AOBasis::build(&g, &BasisLibrary::load("sto-3g").unwrap()).unwrap();
    let r = 50.0;
    let surface = CavitySurface {
        tesserae: vec![Tessera { position: Vector3::new(r, 0.0, 0.0), normal: Vector3::x(), area: 1.0, sphere: 0 }],
        spheres: vec![Sphere { center: Vector3::zeros(), radius: r }],
    };
    let sol = SurfaceChargeSolution {
        charges: DVector::from_element(1, 1.0),
        sigma: DVector::from_element(1, 1.0),
        potentials: DVector::zeros(1),
        polarization_energy: 0.0,
    };
    let op = fock_contribution(&sol, &surface, &b, &g);
    assert!((op.v[(0, 0)] + 1.0 / r).abs() < 1e-12);
    assert!((op.nuclear - 2.0 / r).abs() < 1e-15);

    let zero = SurfaceChargeSolution { charges: DVector::zeros(1), ..sol };
    let op = fock_contribution(&zero, &surface, &b, &g);
    assert_eq!(op.v.amax(), 0.0);
    assert_eq!(op.nuclear, 0.0);
}

#[test]
fn water_cavity_matches_reference_count() {
    let g = Geometry::parse_xyz(
        "3\n\nO 0 0 0.1173\nH 0 0.7572 -0.4692\nH 0 -0.7572 -0.4692",
        LengthUnit::Angstrom,
    )
    .unwrap();
    let b = AOBasis::build(&g, &BasisLibrary::load("sto-3g").unwrap()).unwrap();
    let ctx = PcmContext::new(&g, &b, &CavityConfig::default(), DielectricParams::default()).unwrap();
    assert_eq!(ctx.surface().len(), 446);
}
