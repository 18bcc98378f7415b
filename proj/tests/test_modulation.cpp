#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "wwsim/experiment.hpp"
#include "wwsim/initdata.hpp"
#include "wwsim/modulation.hpp"

using namespace wwsim;
using oracle::max_diff;

namespace {

const cplx I(0.0, 1.0);

const StokesWave& wave(double eps) {
    static const StokesWave w05 = stokes_newton(0.05), w10 = stokes_newton(0.1);
    return eps < 0.075 ? w05 : w10;
}

NlsState carrier(const Grid& slow) { return NlsState{slow, 0.0, CVec(slow.n(), I)}; }

// B0 = i(1 + w0) with the unstable-mode seed of size delta on q1 = 1.
NlsState seeded(double delta) {
    const Grid slow(1.0, 64);
    return lift_to_B(slow, unstable_seed(slow, delta, growth_rate(1.0).k0, 11.0));
}

SeedSpec spec_for(const NlsState& B0, double eps) {
    return SeedSpec{B0, eps, wave(eps), eps < 0.075 ? 2048 : 1024};
}

}  // namespace

TEST_CASE("envelope fields of the carrier are the Stokes terms") {
    const double eps = 0.1, om = wave(eps).omega, t = 0.7;
    const Grid fast(10.0, 1024);
    const EnvelopeFields f = envelope_fields(carrier(Grid(1.0, 64)), eps, om, t, fast);
    for (int j = 0; j < fast.n(); ++j) {
        const double phi = fast.alpha(j) + om * t;
        CHECK(std::abs(f.z1.v[j] - I * std::exp(I * phi)) < 1e-13);
        CHECK(std::abs(f.z2.v[j] - I) < 1e-13);
        CHECK(std::abs(f.z3.v[j] - 0.5 * I * std::exp(-I * phi)) < 1e-13);
    }
}

TEST_CASE("mean of the second-order field") {
    // |1 + h e^{ikX}|^2 = 1 + 2h cos kX + h^2, so M|B|^2 = 1 + h^2.
    const double eps = 0.1, h = 0.03;
    const Grid slow(1.0, 64), fast(10.0, 1024);
    NlsState B = carrier(slow);
    for (int j = 0; j < slow.n(); ++j) B.B[j] = I * (1.0 + h * std::exp(I * 3.0 * slow.alpha(j)));
    const EnvelopeFields f = envelope_fields(B, eps, wave(eps).omega, 0.0, fast);
    CHECK(std::abs(mean(fast, f.z2.v) - I * (1.0 + h * h)) < 1e-12);
    CHECK_THROWS_AS(envelope_fields(B, eps, 1.0, 0.0, Grid(7.5, 1024)), IncompatiblePeriod);
}

TEST_CASE("carrier bundle reduces to the Stokes wave") {
    const double eps = 0.1;
    const StokesWave& w = wave(eps);
    const Grid fast(10.0, 1024);
    const double t = 0.4;
    const EnvelopeBundle bd = make_bundle(carrier(Grid(1.0, 64)), w, t, fast);
    CHECK(max_diff(bd.tilde.v, bd.tilde_st.v) < 1e-13);
    CHECK(max_diff(bd.tilde.vt, bd.tilde_st.vt) < 1e-13);
    CHECK(max_diff(bd.tilde.vtt, bd.tilde_st.vtt) < 1e-13);
    CHECK(max_diff(bd.app_offset, bd.stokes.offset) < 1e-13);
    for (const auto& b : bd.b_tilde.v) CHECK(std::abs(b + eps * eps * w.omega) < 1e-15);

    // D~_t zeta~_ST = zeta~_t + b~ (1 + zeta~_alpha) with b~ = -eps^2 omega.
    const CVec vel = tilde_velocity(fast, bd.tilde, bd.b_tilde);
    for (int j = 0; j < fast.n(); ++j) {
        const double phi = fast.alpha(j) + w.omega * t;
        const cplx da = -eps * std::exp(I * phi) + 0.5 * eps * eps * eps * std::exp(-I * phi);
        const cplx exact = w.omega * da - eps * eps * w.omega * (1.0 + da);
        CHECK(std::abs(vel[j] - exact) < 1e-13);
    }

    const Remainder r = remainder(bd.stokes, bd);
    INFO("Es " << r.Es);
    CHECK(r.Es <= 1e-18);
    const CVec rho = cubic_remainder_rho(bd.stokes, bd);
    INFO("rho " << max_abs(rho));
    CHECK(max_abs(rho) <= 1e-10);
}

TEST_CASE("leading tilde velocity matches a time difference") {
    const double eps = 0.1, h = 1e-4;
    const StokesWave& w = wave(eps);
    const Grid fast(10.0, 1024);
    const NlsState B0 = seeded(0.01);
    const EnvelopeBundle p = make_bundle(B0, w, 2.0 + h, fast), m = make_bundle(B0, w, 2.0 - h, fast),
                         c = make_bundle(B0, w, 2.0, fast);
    CVec fd(fast.n());
    for (int j = 0; j < fast.n(); ++j) fd[j] = (p.tilde.v[j] - m.tilde.v[j]) / (2.0 * h);
    INFO("fd " << max_diff(fd, c.tilde.vt));
    CHECK(max_diff(fd, c.tilde.vt) <= 1e-8);
    // Leading term -omega eps e^{i phi} B / i.
    const CVec Bf = embed_slow(B0, fast, eps, 2.0 / (2.0 * w.omega));
    double lead = 0.0;
    for (int j = 0; j < fast.n(); ++j) {
        const double phi = fast.alpha(j) + 2.0 * w.omega;
        lead = std::max(lead, std::abs(c.tilde.vt[j] + w.omega * eps * std::exp(I * phi) * Bf[j] / I));
    }
    CHECK(lead <= 2.0 * eps * eps);
}

TEST_CASE("one-sided packets") {
    // Zero up to FFT round-off in the empty modes.
    const Grid small(1.0, 64);
    CVec mode(small.n()), one(small.n(), 1.0);
    for (int j = 0; j < small.n(); ++j) mode[j] = std::exp(I * 3.0 * small.alpha(j));
    CHECK(packet_holo_check(small, mode, -1, 0.1, 4.0) <= 1e-12);
    CHECK(packet_holo_check(small, one, -1, 0.1, 4.0) <= 1e-12);
    CHECK(packet_holo_check(small, one, 1, 0.1, 4.0) <= 1e-12);
    CHECK_THROWS_AS(packet_holo_check(small, one, 0, 0.1, 4.0), std::invalid_argument);

    const Grid slow(1.0, 4096);

    // A profile with coefficients ~ |k|^{-5/2}, just outside H^2: the leak past
    // the carrier scales like eps^{3/2}.
    CVec c(slow.n());
    for (int i = 0; i < slow.n(); ++i) c[i] = std::pow(1.0 + std::abs(slow.freq(i)), -2.5);
    const CVec f = to_samples(slow, c).samples;
    const double r = packet_holo_check(slow, f, -1, 0.1, 0.0) / packet_holo_check(slow, f, -1, 0.05, 0.0);
    INFO("ratio " << r);
    CHECK(r >= std::pow(2.0, 1.2));
    CHECK(r <= std::pow(2.0, 1.8));
}

TEST_CASE("orthogonality precondition") {
    CHECK(std::abs(orthogonality_defect(spec_for(seeded(0.01), 0.1))) <= 1e-12);
    // Slow mode -q1/eps lands on e^{-i alpha} and leaves a nonzero defect.
    const Grid slow(1.0, 64);
    NlsState B = carrier(slow);
    for (int j = 0; j < slow.n(); ++j) B.B[j] += 1e-3 * std::exp(-I * 10.0 * slow.alpha(j));
    CHECK(std::abs(orthogonality_defect(spec_for(B, 0.1))) == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK_THROWS_AS(build_initial_data(spec_for(B, 0.1)), OrthogonalityViolated);
}

TEST_CASE("initial data for the carrier is the Stokes wave") {
    const SeedSpec sp = spec_for(carrier(Grid(1.0, 64)), 0.1);
    const InitialData d = build_initial_data(sp);
    const WaterState st = stokes_state(sp.stokes, 0.0, d.state.grid);
    CHECK(max_diff(d.state.offset, st.offset) <= 1e-12);
    CHECK(max_diff(d.state.u, st.u) <= 1e-12);
    CHECK(verify_admissibility(st).pass);
}

TEST_CASE("initial data for a seeded envelope") {
    const double delta = 0.01;
    const NlsState B0 = seeded(delta);
    for (double eps : {0.05, 0.1}) {
        const SeedSpec sp = spec_for(B0, eps);
        const InitialData d = build_initial_data(sp);
        const Admissibility a = verify_admissibility(d.state);
        INFO("eps " << eps << " residuals " << a.zeta_residual << " " << a.v_residual);
        CHECK(a.pass);
        CHECK(a.threshold == doctest::Approx(1e-10 * std::sqrt(d.state.grid.q())));
        INFO("contraction " << d.contraction);
        CHECK(d.contraction <= 3.0 * eps);
        const Closeness c = closeness(d, sp);
        INFO("closeness " << c.zeta_const << " " << c.v_const << " perturbation " << c.perturbation);
        CHECK(c.zeta_const <= 5.0);
        CHECK(c.v_const <= 5.0);
        CHECK(c.perturbation <= std::sqrt(eps) * 1.5 * delta);

        const EnvelopeBundle bd = make_bundle(B0, sp.stokes, 0.0, d.state.grid);
        const double es = std::sqrt(remainder(d.state, bd).Es);
        INFO("Es^1/2 " << es);
        CHECK(es <= 5.0 * std::pow(eps, 1.5) * delta);
    }

    // The uncorrected ansatz misses the constraint at second order.
    const double eps = 0.1;
    const SeedSpec sp = spec_for(B0, eps);
    const InitialData d = build_initial_data(sp);
    WaterState naive = stokes_state(sp.stokes, 0.0, d.state.grid);
    const CVec Bf = embed_slow(B0, naive.grid, eps, 0.0);
    for (int j = 0; j < naive.grid.n(); ++j) {
        const cplx p = eps * (Bf[j] - I) * std::exp(I * naive.grid.alpha(j));
        naive.offset[j] += p;
        naive.u[j] += I * sp.stokes.omega * p;
    }
    const Admissibility a = verify_admissibility(naive);
    INFO("naive residuals " << a.zeta_residual << " " << a.v_residual);
    CHECK_FALSE(a.pass);
    CHECK(std::max(a.zeta_residual, a.v_residual) >= 1e3 * a.threshold);

    const InitialData again = build_initial_data(sp);
    CHECK(again.state.offset == d.state.offset);
    CHECK(again.state.u == d.state.u);
}

TEST_CASE("remainder energy does not depend on the fast grid") {
    // Default run seed at two resolutions; only round-off differs above |k/q| = 50.
    double es[2];
    int i = 0;
    for (int n : {1024, 2048}) {
        ExperimentConfig c;
        c.n = n;
        const PreparedRun p = prepare_run(c);
        const EnvelopeBundle bd = make_bundle(p.B0, p.stokes, 0.0, p.data.state.grid);
        es[i++] = remainder(p.data.state, bd).Es;
    }
    INFO("Es " << es[0] << " " << es[1]);
    CHECK(es[1] == doctest::Approx(es[0]).epsilon(1e-6));
}
