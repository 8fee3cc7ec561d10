#pragma once

// Angular-momentum algebra for integer momenta.

namespace shellcir {

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3), Racah formula. Zero when selection rules fail.
double wigner_3j(int j1, int j2, int j3, int m1, int m2, int m3);

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}, Racah formula.
double wigner_6j(int j1, int j2, int j3, int j4, int j5, int j6);

/// Clebsch-Gordan <j1 m1 j2 m2 | J M>.
double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M);

/// Reduced matrix element <l'||C^k||l> of the renormalized spherical harmonic.
double reduced_ck(int l_bra, int k, int l_ket);

/// <(l2 L2) J M | P_k(rhat . Rhat) | (l L) J M>, independent of M.
/// Returns 0 for triangle-violating input.
double angular_coupling(int l, int L, int l2, int L2, int J, int k);

/// Legendre polynomial P_k(x).
double legendre(int k, double x);

}  // namespace shellcir
