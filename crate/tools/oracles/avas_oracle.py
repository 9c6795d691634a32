"""Dense-linear-algebra oracle for AVAS projector eigenvalues (water/STO-3G, O 2p + H 1s)."""
import numpy as np
from pyscf import gto, scf
from reference import read_xyz

mol = gto.M(atom=read_xyz("../../molecules/water.xyz"), basis="sto-3g", verbose=0)
mf = scf.RHF(mol); mf.conv_tol = 1e-12; mf.kernel()
S = mol.intor("int1e_ovlp")
labels = mol.ao_labels()
T = [i for i, l in enumerate(labels) if ("O 2p" in l) or ("H 1s" in l)]
P = S[:, T] @ np.linalg.inv(S[np.ix_(T, T)]) @ S[T, :]
nocc = mol.nelectron // 2
C = mf.mo_coeff
for name, blk in (("occ", C[:, :nocc]), ("vir", C[:, nocc:])):
    w = np.linalg.eigvalsh(blk.T @ P @ blk)[::-1]
    print(name, ", ".join(f"{x:.12f}" for x in w))
