#pragma once

#include <cstddef>

// Hot loops over the packed antisymmetric cot matrix. Compiled with relaxed
// floating-point association so the row reductions vectorize.
namespace wwsim::kernel {

// Fills the strict upper triangle of C_ab = i(E_a + E_b)/(E_a - E_b) and
// returns the minimum squared chord-arc ratio over all pairs.
double build_cot_rows(int n, const double* er, const double* ei, const double* emod,
                      const double* inv_flat, const std::size_t* row, double* cre, double* cim);

// out_j[a] += sum_{b != a} C_ab v_j[b] for m vectors, using C_ba = -C_ab.
void antisymmetric_sum(int n, int m, const std::size_t* row, const double* cre, const double* cim,
                       const double* const* vr, const double* const* vi, double* const* orr,
                       double* const* oi);

}  // namespace wwsim::kernel
