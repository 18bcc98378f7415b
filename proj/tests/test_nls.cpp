#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "wwsim/nls.hpp"

using namespace wwsim;
using oracle::max_diff;

namespace {

const cplx I(0.0, 1.0);

std::array<double, 4> matmul(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

// Fourier coefficient of mode k of a real field, in slot order.
cplx mode(const Grid& g, const RVec& f, int k) {
    return to_spectrum(Field(g, to_complex(f)))[k >= 0 ? k : g.n() + k];
}

}  // namespace

TEST_CASE("growth rate by enumeration") {
    const GrowthRate a = growth_rate(4.0);
    CHECK(a.tau == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.k0 == 4);
    const GrowthRate b = growth_rate(0.8);
    CHECK(b.tau == doctest::Approx(1.25 * std::sqrt(2.0 - 1.5625)).epsilon(1e-14));
    CHECK(b.tau == doctest::Approx(0.826797).epsilon(1e-6));
    CHECK(b.k0 == 1);
    const GrowthRate c = growth_rate(0.5);
    CHECK(c.tau == 0.0);
    CHECK(c.k0 == 0);
    CHECK(growth_rate(1.0).k0 == 1);
    CHECK(growth_rate(1.0).tau == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("linear flow") {
    const LinFlow z = linear_flow(0, 1.0, 0.7);
    CHECK(z.m[0] == doctest::Approx(1.0));
    CHECK(z.m[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(z.m[2] == doctest::Approx(1.4));
    CHECK(z.m[3] == doctest::Approx(1.0));

    const LinFlow h = linear_flow(3, 3.0, 1.0);
    CHECK(h.m[0] == doctest::Approx(std::cosh(1.0)).epsilon(1e-14));
    CHECK(h.m[1] == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
    CHECK(h.m[2] == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
    CHECK(h.m[3] == doctest::Approx(std::cosh(1.0)).epsilon(1e-14));

    // Oscillatory branch: eigenvalues on the unit circle.
    for (double t : {0.3, 2.0, 11.0}) {
        const LinFlow o = linear_flow(2, 1.0, t);
        const double tr = o.m[0] + o.m[3];
        CHECK(std::abs(tr) <= 2.0 + 1e-12);
        CHECK(o.det() == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Symplectic and a one-parameter group, including the branch point |k/q| = sqrt 2.
    for (double q : {0.7, 1.0, std::sqrt(2.0), 2.5, 4.0})
        for (int k = 0; k <= 8; ++k)
            for (double t : {0.1, 1.3, 3.7}) {
                const LinFlow a = linear_flow(k, q, t), b = linear_flow(k, q, 0.9), ab = linear_flow(k, q, t + 0.9);
                CHECK(a.det() == doctest::Approx(1.0).epsilon(1e-12));
                const auto m = matmul(a.m, b.m);
                for (int i = 0; i < 4; ++i) CHECK(std::abs(m[i] - ab.m[i]) <= 1e-10 * std::max(1.0, std::abs(ab.m[i])));
            }
}

TEST_CASE("envelope equation: exact solutions and conservation") {
    const Grid g(2.0, 64);
    NlsState s{g, 0.0, CVec(g.n(), I)};
    const NlsState e = split_step_evolve(s, 1e-3, 5.0);
    CHECK(max_diff(e.B, s.B) <= 1e-12);
    CHECK(e.T == doctest::Approx(5.0));

    // Plane wave c e^{ikX/q1} e^{i nu T}, nu = -(k/q1)^2/8 + |c|^2/2 - 1/2.
    const cplx c(0.3, 0.8);
    const int k = 3;
    NlsState p{g, 0.0, CVec(g.n())};
    for (int j = 0; j < g.n(); ++j) p.B[j] = c * std::exp(I * (k * g.alpha(j) / g.q()));
    const NlsState pe = split_step_evolve(p, 1e-3, 1.0);
    const double kap = k / g.q(), nu = -kap * kap / 8.0 + std::norm(c) / 2.0 - 0.5;
    CVec exact(g.n());
    for (int j = 0; j < g.n(); ++j) exact[j] = p.B[j] * std::exp(I * nu);
    CHECK(max_diff(pe.B, exact) <= 1e-8);

    const Conserved ci = conserved(s);
    CHECK(ci.mass == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ci.hamiltonian == doctest::Approx(0.25).epsilon(1e-15));

    NlsState r{g, 0.0, CVec(g.n())};
    const CVec w = oracle::random_band_limited(g, 6, 9);
    for (int j = 0; j < g.n(); ++j) r.B[j] = I + 0.2 * w[j];
    const Conserved c0 = conserved(r);
    NlsState rot = r;
    for (auto& z : rot.B) z *= std::exp(I * 0.77);
    CHECK(conserved(rot).mass == doctest::Approx(c0.mass).epsilon(1e-14));
    CHECK(conserved(rot).hamiltonian == doctest::Approx(c0.hamiltonian).epsilon(1e-14));
    // Mass is conserved by each substep. The Hamiltonian drifts at O(dt^2); over
    // longer times the modulational growth outruns n = 64 and the drift stops
    // depending on dt.
    const Conserved c1 = conserved(split_step_evolve(r, 1e-3, 1.0));
    const Conserved c2 = conserved(split_step_evolve(r, 5e-4, 1.0));
    CHECK(std::abs(c1.mass - c0.mass) <= 1e-12);
    CHECK(std::abs(c1.hamiltonian - c0.hamiltonian) <= 1e-7 * std::abs(c0.hamiltonian));
    CHECK(std::abs(c1.hamiltonian - c0.hamiltonian) / std::abs(c2.hamiltonian - c0.hamiltonian) ==
          doctest::Approx(4.0).epsilon(0.1));
    CHECK(std::abs(conserved(split_step_evolve(r, 1e-3, 10.0)).mass - c0.mass) <= 1e-10);
}

TEST_CASE("Strang splitting is second order") {
    const Grid g(1.0, 64);
    NlsState r{g, 0.0, CVec(g.n())};
    const CVec w = oracle::random_band_limited(g, 5, 13);
    for (int j = 0; j < g.n(); ++j) r.B[j] = I + 0.3 * w[j];
    const CVec ref = split_step_evolve(r, 1e-4, 1.0).B;
    const double e1 = max_diff(split_step_evolve(r, 0.02, 1.0).B, ref);
    const double e2 = max_diff(split_step_evolve(r, 0.01, 1.0).B, ref);
    INFO(e1 << " " << e2);
    CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("standard form") {
    const Grid g(1.0, 32);
    const NlsState s{g, 0.0, CVec(g.n(), I)};
    const StandardState u = to_standard_form(s);
    CHECK(u.grid.q() == doctest::Approx(2.0));
    for (const auto& z : u.u) CHECK(std::abs(z - I) < 1e-15);

    NlsState r{g, 0.35, oracle::random_band_limited(g, 10, 17)};
    const StandardState ur = to_standard_form(r);
    CHECK(ur.t == doctest::Approx(0.175));
    const NlsState back = from_standard_form(ur);
    CHECK(back.T == doctest::Approx(0.35));
    CHECK(max_diff(back.B, r.B) <= 1e-13);

    // B = i at time T maps to u = i e^{it} at t = T/2.
    const NlsState later = split_step_evolve(s, 1e-3, 0.5);
    for (const auto& z : to_standard_form(later).u) CHECK(std::abs(z - I * std::exp(I * 0.25)) < 1e-12);
}

TEST_CASE("unstable seed") {
    const Grid g(1.0, 64);
    const CVec w0 = unstable_seed(g, 1e-3, 1, 11.0);
    const cplx c1 = to_spectrum(Field(g, w0))[1] / (2.0 * kPi);
    CHECK(std::abs(c1) == doctest::Approx(1.0 / 22000.0 + 1e-3 / 200.0).epsilon(1e-12));
    CHECK(std::abs(mean(g, w0)) < 1e-16);
    // Closed form: modes +-1 with weight 2^{11}, coefficient (delta/22 + delta/200).
    const double closed = std::sqrt(4.0 * kPi) * std::pow(2.0, 11) * (1e-3 / 22.0 + 1e-3 / 200.0);
    // Weights up to 33^22 turn round-off in empty modes into O(1e-7) noise; drop it.
    CHECK(sobolev_norm(g, w0, 11.0, 1e-12) == doctest::Approx(closed).epsilon(1e-10));

    const Grid g4(4.0, 128);
    const CVec w4 = unstable_seed(g4, 1e-3, 4, 11.0);
    const CVec s4 = to_spectrum(Field(g4, w4));
    CHECK(std::abs(s4[4]) * std::sqrt(4.0) / (2.0 * kPi * 4.0) == doctest::Approx(1e-3 / 22.0).epsilon(1e-12));
    CHECK(std::abs(s4[1]) * std::sqrt(4.0) / (2.0 * kPi * 4.0) == doctest::Approx(1e-3 / 200.0).epsilon(1e-12));

    const NlsState B = lift_to_B(g, w0);
    for (int j = 0; j < g.n(); ++j) CHECK(std::abs(B.B[j] - I * (1.0 + w0[j])) < 1e-16);
    CHECK_THROWS_AS(unstable_seed(Grid(0.5, 32), 1e-3, 1), NoUnstableMode);
}

TEST_CASE("linear regime follows the linear flow") {
    for (double q : {1.0, 4.0}) {
        const Grid g(q, 128);
        const GrowthRate gr = growth_rate(q);
        const CVec w0 = unstable_seed(g, 1e-6, gr.k0);
        CVec u(g.n());
        for (int j = 0; j < g.n(); ++j) u[j] = I * (1.0 + w0[j]);
        const double T = 5.0;
        const CVec uT = nls_evolve(g, u, CubicNls::standard(), 1e-3, T);
        const CVec w = perturbation(uT, T);
        for (int k : {gr.k0, 1}) {
            const cplx p0 = mode(g, real_part(w0), k), s0 = mode(g, imag_part(w0), k);
            const LinFlow m = linear_flow(k, q, T);
            const cplx p = m.m[0] * p0 + m.m[1] * s0, s = m.m[2] * p0 + m.m[3] * s0;
            const cplx pn = mode(g, real_part(w), k), sn = mode(g, imag_part(w), k);
            const double rel = std::hypot(std::abs(pn - p), std::abs(sn - s)) / std::hypot(std::abs(p), std::abs(s));
            INFO("q " << q << " k " << k << " rel " << rel);
            CHECK(rel <= 1e-3);
        }
        const RateFit fit = linear_rate_fit(q);
        CHECK(fit.rel_err <= 0.01);
    }
}

TEST_CASE("modes outside the band do not grow") {
    const Grid g(0.5, 64);
    CVec w0(g.n());
    for (int j = 0; j < g.n(); ++j) w0[j] = 1e-4 * 2.0 * std::cos(g.alpha(j) / 0.5);
    CVec u(g.n());
    for (int j = 0; j < g.n(); ++j) u[j] = I * (1.0 + w0[j]);
    const double n0 = sobolev_norm(g, w0, 0.0);
    double worst = 0.0;
    nls_evolve(g, u, CubicNls::standard(), 1e-3, 20.0,
               [&](double t, const CVec& v) { worst = std::max(worst, sobolev_norm(g, perturbation(v, t), 0.0)); },
               100);
    CHECK(worst <= 2.0 * n0);
}

TEST_CASE("nonlinear instability") {
    const InstabilityReport r = instability_run(1.0, 1e-3, 0.1);
    CHECK(r.T0 == doctest::Approx(std::log(100.0)).epsilon(1e-12));
    CHECK(r.final_norm >= 0.025);
    CHECK(r.initial_norm == doctest::Approx(std::sqrt(4.0 * kPi) * 2048.0 * (1e-3 / 22.0 + 1e-3 / 200.0)).epsilon(1e-6));
    const InstabilityReport r5 = instability_run(1.0, 1e-5, 0.1);
    CHECK(r5.T0 == doctest::Approx(std::log(1e4)).epsilon(1e-12));
    CHECK(r5.final_norm >= 0.025);
}
