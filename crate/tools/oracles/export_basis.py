"""Export STO-3G and cc-pVDZ shell data into the plain-text basis format.

Generally contracted shells are split into one shell per contraction column;
primitives whose coefficient is exactly zero in a column are dropped.
"""
import sys
from pyscf import gto

ELEMENTS = ["H", "He", "C", "N", "O", "F"]


def shells(name, el):
    out = []
    for entry in gto.basis.load(name, el):
        l = entry[0]
        rows = entry[1:]
        ncol = len(rows[0]) - 1
        for c in range(ncol):
            prims = [(r[0], r[1 + c]) for r in rows if r[1 + c] != 0.0]
            out.append((l, prims))
    return out


def main(name, path):
    with open(path, "w") as fh:
        fh.write(f"# {name} basis, spherical shells; coefficients refer to normalized primitives\n")
        for el in ELEMENTS:
            fh.write(f"{el}\n")
            for l, prims in shells(name, el):
                fh.write(f"{l} {len(prims)}\n")
                for e, c in prims:
                    fh.write(f"  {e!r} {c!r}\n")
            fh.write("****\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
