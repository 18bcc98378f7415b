#pragma once

#include "wwsim/nls.hpp"
#include "wwsim/stokes.hpp"
#include "wwsim/waterwave.hpp"

namespace wwsim {

// Value and first two time derivatives of a field on the fast grid.
struct Jet {
    CVec v, vt, vtt;
};

struct EnvelopeFields {
    Jet z1, z2, z3;
};

// Multi-scale fields at fast time t for an envelope B(X, T) on the slow torus,
// with X = eps (alpha + t/(2 omega)) and T = eps^2 t. B is advanced from its own
// time B.T to eps^2 t before sampling. Time derivatives follow the chain rule
// d/dt B = (eps/2 omega) B_X + eps^2 B_T with B_T from the envelope equation.
//   z1 = B e^{i phi}
//   z2 = (i/2)(I + H0)|B|^2 + (i/2) M(|B|^2)
//   z3 = -(1/2) conj(B)|B|^2 e^{-i phi} + (1/2)(I + H0)(conj(B) B_X)
// with phi = alpha + omega t.
EnvelopeFields envelope_fields(const NlsState& B, double eps, double omega, double t,
                               const Grid& fast);

// B(eps (alpha_j + shift)) on the fast grid by exact mode embedding. Requires
// fast.q() * eps == B.grid.q() with integer fast.q().
CVec embed_slow(const NlsState& B, const Grid& fast, double eps, double shift);

struct EnvelopeBundle {
    double eps;
    double omega;
    double t;
    Grid grid;
    EnvelopeFields f;
    // Offsets (minus alpha) and their time jets.
    Jet tilde;     // eps z1 + eps^2 z2 + eps^3 z3
    Jet tilde_st;  // same with B = i
    Jet b_tilde;   // -eps^2 omega |B|^2 (real, stored complex)
    WaterState stokes;   // exact Stokes state at t
    RVec stokes_A;
    CVec app_offset;     // zeta_app - alpha
    CVec app_velocity;   // D_t^ST zeta_ST + (D~_t zeta~ - D~_t^ST zeta~_ST)
    CVec app_accel;      // same pattern for the second material derivative
};

EnvelopeBundle make_bundle(const NlsState& B, const StokesWave& w, double t, const Grid& fast);

// D~_t zeta~ = zeta~_t + b~ zeta~_alpha, and its second material derivative.
CVec tilde_velocity(const Grid& g, const Jet& offset, const Jet& b);
CVec tilde_acceleration(const Grid& g, const Jet& offset, const Jet& b);

struct Remainder {
    CVec r;
    CVec dt_r;
    CVec dt2_r;
    double Es;  // (||D_t r||_{H^{s+1/2}} + ||r_alpha||_{H^s} + ||D_t^2 r||_{H^s})^2
};
Remainder remainder(const WaterState& s, const EnvelopeBundle& bundle, double sob = 4.0);

// (I - H_zeta)[theta - theta_ST - (theta~ - theta~_ST)].
CVec cubic_remainder_rho(const WaterState& s, const EnvelopeBundle& bundle);

// ||(I + sgn(lambda) H0) f(eps alpha) e^{i lambda alpha}||_{H^s(qT)} computed exactly
// from the slow Fourier coefficients of f.
double packet_holo_check(const Grid& slow, const CVec& f, int lambda, double eps, double s);

}  // namespace wwsim
