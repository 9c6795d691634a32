"""Grid-quadrature oracle for the molecular electrostatic potential on cavity tesserae.

The electronic potential at each selected tessera s is integrated directly,
phi_el(s) = -int rho(r)/|r - s| dr, on a Becke multi-center grid that also
carries a ghost center at s (so the Coulomb singularity sits at a grid center).
The nuclear part is added analytically. Density: converged gas-phase RHF/STO-3G.

Run: python3 esp_grid.py
"""
import numpy as np
from pyscf import gto, scf, dft

from reference import cavity, read_xyz

atoms = read_xyz("../../molecules/water.xyz")
mol = gto.M(atom=atoms, basis="sto-3g", unit="angstrom", verbose=0)
mf = scf.RHF(mol)
mf.conv_tol = 1e-12
mf.kernel()
dm = mf.make_rdm1()

s, n, a = cavity(mol, 302)
rng = np.random.default_rng(11)
pick = rng.choice(len(s), size=10, replace=False)

for i in pick:
    p = s[i]
    ghost = atoms + [("ghost-H", tuple(p / 1.8897259886))]
    gmol = gto.M(atom=ghost, basis="sto-3g", unit="angstrom", verbose=0)
    grids = dft.gen_grid.Grids(gmol)
    grids.atom_grid = (200, 974)
    grids.build()
    ao = dft.numint.eval_ao(mol, grids.coords)
    rho = dft.numint.eval_rho(mol, ao, dm)
    r = np.linalg.norm(grids.coords - p, axis=1)
    el = -np.sum(grids.weights * rho / r)
    nuc = sum(z / np.linalg.norm(p - c) for z, c in zip(mol.atom_charges(), mol.atom_coords()))
    print(f"    ([{p[0]:.15e}, {p[1]:.15e}, {p[2]:.15e}], {nuc + el:.12e}),")
