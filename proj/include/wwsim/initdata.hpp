#pragma once

#include "wwsim/nls.hpp"
#include "wwsim/stokes.hpp"
#include "wwsim/waterwave.hpp"

namespace wwsim {

struct OrthogonalityViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeedSpec {
    NlsState B0;       // envelope at T = 0 on the slow torus q1 T
    double eps;
    StokesWave stokes;
    int n;             // nodes of the fast grid, whose period factor is q1/eps
    double tol = 1e-12;
    int max_iter = 60;
};

struct InitialData {
    WaterState state;
    int iterations;
    RVec diffs;          // L2 norms of successive iterate differences
    double contraction;  // max ratio of consecutive diffs
    cplx c_gamma;
    cplx d_v0;
};

// (1/2q pi) int B0(eps alpha) e^{i alpha} d alpha on the fast grid.
cplx orthogonality_defect(const SeedSpec& spec);

InitialData build_initial_data(const SeedSpec& spec);

struct Admissibility {
    double zeta_residual;  // ||(I - H)(conj(zeta) - alpha)||
    double v_residual;     // ||(I - H) conj(v)||
    double threshold;      // 1e-10 sqrt(q)
    bool pass;
};
// Residuals without removing the Cauchy constant.
Admissibility verify_admissibility(const WaterState& s);

struct Closeness {
    double zeta_const;  // ||zeta0 - zeta_ST - eps(B0 - i)e^{i alpha}||_{H^{s+1}} / (eps^{3/2} ||B0 - i||_{H^s'})
    double v_const;     // same with v0 - D_t zeta_ST - i omega eps (B0 - i) e^{i alpha}
    double perturbation;  // ||(zeta0, v0) - (zeta_ST, D_t zeta_ST)||_{L2}
};
Closeness closeness(const InitialData& d, const SeedSpec& spec, double s = 4.0, double s_prime = 11.0);

// Slow-torus Sobolev norm of B0 - i.
double seed_size(const NlsState& B0, double s_prime = 11.0);

}  // namespace wwsim
