#pragma once

#include <array>
#include <functional>

#include "wwsim/spectral.hpp"

namespace wwsim {

struct NoUnstableMode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// i v_t + disp v_xx + nonlin |v|^2 v + linear v = 0.
struct CubicNls {
    double disp;
    double nonlin;
    double linear;
    // i B_T + B_XX/8 + |B|^2 B/2 - B/2 = 0
    static CubicNls envelope() { return {0.125, 0.5, -0.5}; }
    // i u_t + u_xx + |u|^2 u = 0
    static CubicNls standard() { return {1.0, 1.0, 0.0}; }
};

using NlsObserver = std::function<void(double t, const CVec& v)>;

// Strang splitting: exact linear half steps in Fourier space around the exact
// pointwise phase rotation. Observer runs at t = 0 and every `stride` steps.
CVec nls_evolve(const Grid& g, CVec v, const CubicNls& eq, double dt, double t_end,
                const NlsObserver& obs = {}, long stride = 1);

// Envelope B(X, T) on the slow torus q1 T.
struct NlsState {
    Grid grid;
    double T = 0.0;
    CVec B;
};

// Requires dt <= 0.1 / (1 + max|B|^2).
NlsState split_step_evolve(const NlsState& s, double dt, double T_end);

// u(x, t) = e^{it} B(x/2, 2t) on the torus of period factor 2 q1.
struct StandardState {
    Grid grid;
    double t = 0.0;
    CVec u;
};
StandardState to_standard_form(const NlsState& s);
NlsState from_standard_form(const StandardState& s);

// Evolution matrix of the linearization about i e^{it}, acting on (phi_k, psi_k)
// where w = phi + i psi and u = i e^{it}(1 + w).
struct LinFlow {
    int k;
    double q;
    double t;
    std::array<double, 4> m;  // row-major 2x2
    double det() const { return m[0] * m[3] - m[1] * m[2]; }
};
LinFlow linear_flow(int k, double q, double t);

struct GrowthRate {
    double tau;
    int k0;  // 0 when no integer mode is unstable
};
GrowthRate growth_rate(double q);

// w0 = (1/sqrt q)(d e^{i k0 x/q} + d e^{-i k0 x/q} + e e^{ix/q} + e e^{-ix/q}),
// d = delta/(2 s'), e = delta/200 unless given.
CVec unstable_seed(const Grid& g, double delta, int k0, double s_prime = 11.0, double eta = -1.0);
// B = i (1 + w0).
NlsState lift_to_B(const Grid& g, const CVec& w0);

// Perturbation w = u e^{-it}/i - 1 of a standard-form state at time t.
CVec perturbation(const CVec& u, double t);

struct InstabilityReport {
    double tau;
    int k0;
    double T0;
    double initial_norm;
    double max_ratio;   // sup ||w||_{H^s'} / (delta e^{tau t})
    double final_norm;  // ||w(T0)||_{H^s'}
    double final_l2;
};
InstabilityReport instability_run(double q, double delta, double mu, int n = 128, double dt = 1e-3,
                                  double s_prime = 11.0);

struct RateFit {
    double tau;
    int k0;
    double fitted;
    double rel_err;
};
// Least-squares slope of log|sqrt(2 - kappa^2) phi_k0 + kappa psi_k0| for a small seed.
RateFit linear_rate_fit(double q, double seed = 1e-6, double t_end = 5.0, int n = 128,
                        double dt = 1e-3);

struct Conserved {
    double mass;
    double hamiltonian;
};
// Mass (1/2 q1 pi) int |B|^2 and H = (1/2 q1 pi) int |B_X|^2/8 - |B|^4/4 + |B|^2/2.
Conserved conserved(const NlsState& s);

}  // namespace wwsim
