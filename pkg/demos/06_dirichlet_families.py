"""
Dirichlet L-functions and other families
========================================

Characters come from CRT-lifted generators. L is a finite sum plus an
Euler-Maclaurin tail per residue class; zeros come from the real function
Z_chi on the line.
"""
import io

from zetagaps.cli import lgaps
from zetagaps.lfunc import (FamilyKind, LFamily, characters, dirichlet_count, dirichlet_scan,
                            ingest_zeros, normalized_gap)

for q in (3, 4, 5, 8):
    for chi in characters(q):
        print(chi.label, "parity", chi.parity, "complex" if chi.is_complex else "real")

chi = characters(5)[0]
zs = dirichlet_scan(chi, 0, 40)
print("zeros of", chi.label, [round(z.t, 6) for z in zs])
print("count to 40:", dirichlet_count(chi, 40.0))

# cusp-form gaps carry an extra factor of two relative to zeta
zeta, cusp = LFamily(FamilyKind.ZETA), LFamily(FamilyKind.CUSP, k=12)
print(normalized_gap(cusp, 100.0, 101.0) / normalized_gap(zeta, 100.0, 101.0))

# externally computed ordinates can be ingested; these are the first cusp zeros for Delta
text = "# weight 12 level 1\n9.22237939992110252\n13.9075498613491\n17.4427769782309\n19.6565131419\n"
# the normalization is only positive above 2 pi e, so just one gap survives here
rows, summary = lgaps(cusp, ingest_zeros(io.StringIO(text), cusp))
print(summary)
