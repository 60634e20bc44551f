"""Built-in N = 2 benchmark: published reference solution of the nested
Bethe equations for the kind-I boundary at

    N = 2, eta = 0.3, theta = 0,
    zeta = 0.1,  c = 1.0,  c1 = -0.5   (left boundary)
    zeta' = -0.1, c' = -0.5, c1' = -0.7 (right boundary).

Roots are quoted to four decimals and energies to six, which is the
precision they were published at; refinement in the solver recovers the
full double-precision states.  Sector M is the charge of the state and
fixes the first-level root count N + M + 6.
"""

from __future__ import annotations

from .boundary import BoundaryPair, BoundaryParams
from .spectrum import BetheState
from .transfer import ChainSpec

BENCHMARK_N = 2
BENCHMARK_ETA = 0.3
BENCHMARK_BOUNDARY = {
    "kind": "I",
    "zeta": 0.1, "c": 1.0, "c1": -0.5,
    "zeta_dual": -0.1, "c_dual": -0.5, "c1_dual": -0.7,
}

# (sector, first-level roots, second-level roots, energy)
BENCHMARK_ROWS = (
    (0,
     (0.4091 + 0.1448j, 0.4091 - 0.1448j, 0.4942 + 1.3424j, 0.4942 - 1.3424j,
      0.2366 + 0.0j, -0.1500 - 0.1466j, -0.7730 + 0.0j, 0.5592 - 1.5708j),
     (),
     -4.932732),
    (1,
     (0.3823 + 0.1863j, 0.3823 - 0.1863j, 0.4842 + 1.3499j, 0.4842 - 1.3499j,
      0.1292 + 0.0j, -0.1500 + 0.3054j, 0.3917 + 0.0j, 0.4614 + 0.0j,
      0.5501 - 1.5708j),
     (-0.3000 + 0.2629j,),
     0.044922),
    (1,
     (-0.7839 - 1.3503j, -0.7839 + 1.3503j, -0.6860 + 0.1856j, -0.6860 - 0.1856j,
      0.0983 + 0.0j, -0.1500 - 0.2984j, 0.3884 + 0.0j, -0.7641 + 0.0j,
      -0.8497 + 1.5708j),
     (-0.3000 - 0.2664j,),
     1.356985),
    (0,
     (0.3461 + 0.1125j, 0.3461 - 0.1125j, 0.4989 + 1.3364j, 0.4989 - 1.3364j,
      0.3242 + 0.0j, 0.1351 + 0.0j, 0.4436 + 0.0j, 0.5651 - 1.5708j),
     (),
     2.206441),
    (0,
     (0.4981 - 1.3375j, 0.4981 + 1.3375j, 0.3679 + 0.1168j, 0.3679 - 0.1168j,
      0.2843 + 0.0j, 0.5641 - 1.5708j, 0.4502 + 0.0j, 0.1007 + 0.0j),
     (),
     3.696554),
    (0,
     (0.0946 + 0.0271j, 0.0946 - 0.0271j, 0.4139 + 0.1390j, 0.4139 - 0.1390j,
      0.4947 + 1.3419j, 0.4947 - 1.3419j, 0.4722 + 0.0j, 0.5597 + 1.5708j),
     (),
     6.612138),
    (1,
     (0.1029 + 0.0175j, 0.1029 - 0.0175j, 0.4165 + 0.1626j, 0.4165 - 0.1626j,
      0.4870 + 1.3478j, 0.4870 - 1.3478j, 0.4822 + 0.0j, 0.3507 + 0.0j,
      -0.8526 - 1.5708j),
     (0.0104 + 0.0j,),
     6.923080),
    (1,
     (0.4211 + 0.1625j, 0.4211 - 0.1625j, 0.0997 + 0.0211j, 0.0997 - 0.0211j,
      0.4868 + 1.3482j, 0.4868 - 1.3482j, 0.4855 + 0.0j, 0.3483 + 0.0j,
      -0.8522 + 1.5708j),
     (0.0235 + 0.0j,),
     7.079096),
    (2,
     (-0.3852 - 0.0302j, -0.3852 + 0.0302j, 0.4432 + 0.1924j, 0.4432 - 0.1924j,
      0.5110 + 0.0377j, 0.5110 - 0.0377j, 0.4786 + 1.3557j, 0.4786 - 1.3557j,
      0.2226 + 0.0j, -0.8440 - 1.5708j),
     (-0.0527 + 0.0j, 0.1841 + 0.0j),
     8.942457),
)

BENCHMARK_ENERGIES = tuple(row[3] for row in BENCHMARK_ROWS)

ROOT_PRECISION = 5e-5      # roots are printed to 4 decimals
ENERGY_PRECISION = 1e-5    # energies are printed to 6 decimals


def benchmark_spec():
    return ChainSpec.homogeneous(BENCHMARK_N, BENCHMARK_ETA)


def benchmark_pair():
    b = BENCHMARK_BOUNDARY
    return BoundaryPair(
        BoundaryParams.from_free(b["kind"], b["zeta"], b["c"], b["c1"]),
        BoundaryParams.from_free(b["kind"], b["zeta_dual"], b["c_dual"], b["c1_dual"]),
    )


def benchmark_states():
    return tuple(BetheState(sector, l1, l2)
                 for sector, l1, l2, _ in BENCHMARK_ROWS)
