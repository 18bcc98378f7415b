#pragma once

#include <iosfwd>

#include "wwsim/waterwave.hpp"

namespace wwsim {

struct AmplitudeOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NewtonDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonMonotoneParametrization : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Traveling profile zeta = alpha + F(alpha + omega t), D_t zeta = G(alpha + omega t).
// F and G are 2pi-periodic and stored as coefficients of e^{ik Gamma}, k = -kmax..kmax.
// F has imaginary coefficients and G real ones.
struct StokesWave {
    double eps = 0.0;
    double omega = 1.0;
    int kmax = 0;
    CVec F;
    CVec G;
    // Final residual of the Newton solve, or NaN for the closed-form expansion.
    double residual = 0.0;

    cplx f_coeff(int k) const { return std::abs(k) <= kmax ? F[k + kmax] : cplx(0.0); }
    cplx g_coeff(int k) const { return std::abs(k) <= kmax ? G[k + kmax] : cplx(0.0); }
    cplx F_at(double x) const;
    cplx G_at(double x) const;
};

StokesWave stokes_expansion(double eps);

struct NewtonOptions {
    int n_modes = 21;       // kmax; the profile grid has 3 * kmax + 1 rounded up to even nodes
    double tol = 1e-11;
    int max_iter = 30;
    double fd_step = 1e-6;
};

// Gauss-Newton on the traveling-wave condition, restricted to the symmetric subspace.
StokesWave stokes_newton(double eps, const NewtonOptions& opt = {});
StokesWave stokes_newton(double eps, const StokesWave& guess, const NewtonOptions& opt = {});

// Residual norm of the traveling-wave condition and the holomorphicity constraints.
double stokes_residual(const StokesWave& w, int n_profile = 64);

WaterState stokes_state(const StokesWave& w, double t, const Grid& g, double phase = 0.0);

struct StokesFamily {
    RVec gamma;
    std::vector<StokesWave> waves;
    // Cubic Lagrange interpolation of the coefficients in gamma.
    StokesWave at(double gamma) const;
};
StokesFamily build_stokes_family(double gamma_max, int points = 41, const NewtonOptions& opt = {});

struct FamilyDistance {
    double dist;
    double gamma;
    double phase;
};
// Minimum over the family of the L2 distance between zeta and alpha + F_gamma(alpha + phase).
FamilyDistance family_distance(const WaterState& s, const StokesFamily& fam);
// Distance to a single member, minimized over phase only.
FamilyDistance member_distance(const WaterState& s, const StokesWave& w);

struct Elevation {
    RVec x;
    RVec eta;
};
// eta(x) = Im zeta at the label where Re zeta = x, on the grid nodes.
Elevation eulerian_elevation(const WaterState& s);
// (2/n) sum eta_j e^{-i k x_j} for profile mode k (grid frequency k q); k = 0 gives twice the mean.
cplx eulerian_harmonic(const Elevation& e, int k);

// Text table: header lines starting with '#', then "k Im_F Re_G" per mode.
// Rows with both coefficients exactly zero are omitted.
void write_coefficient_table(std::ostream& os, const StokesWave& w);

}  // namespace wwsim
