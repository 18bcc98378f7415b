#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "states.hpp"
#include "wwsim/stokes.hpp"
#include "wwsim/waterwave.hpp"

using namespace wwsim;
using oracle::max_diff;

namespace {

const cplx I(0.0, 1.0);

}  // namespace

using states::every;
using states::generic_state;
using states::state_diff;

TEST_CASE("rest state is an equilibrium") {
    const Grid g(2.0, 64);
    const WaterState s = WaterState::rest(g);
    CHECK(max_abs(compute_b(s)) == 0.0);
    for (double a : compute_A(s)) CHECK(a == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(max_abs(compute_at_over_a(s)) < 1e-15);
    const auto d = time_derivative(s);
    CHECK(max_abs(d.dzeta) < 1e-15);
    CHECK(max_abs(d.du) < 1e-15);
    const WaterState s1 = step_rk4(s, 0.05);
    CHECK(max_abs(s1.offset) < 1e-13);
    CHECK(max_abs(s1.u) < 1e-13);
    const auto h = holo_residuals(s);
    CHECK(h.r1 == 0.0);
    CHECK(h.r2 == 0.0);
    const auto G = cubic_forcing(s);
    CHECK(max_abs(G.G1) < 1e-15);
    CHECK(max_abs(G.G2) < 1e-15);
    CHECK(basic_energy(g, RVec(g.n(), 1.0), CVec(g.n(), 0.0), CVec(g.n(), 0.0)) == 0.0);
}

TEST_CASE("auxiliary quantities of Stokes waves") {
    const Grid g(1.0, 64);
    for (double e : {0.05, 0.1}) {
        const StokesWave w = stokes_newton(e);
        const WaterState s = stokes_state(w, 0.0, g);
        const RVec b = compute_b(s), A = compute_A(s);
        double bd = 0.0, ad = 0.0;
        for (int j = 0; j < g.n(); ++j) {
            bd = std::max(bd, std::abs(b[j] + w.omega * e * e));
            ad = std::max(ad, std::abs(A[j] - 1.0));
        }
        CHECK(bd <= 5.0 * e * e * e);
        CHECK(ad <= 10.0 * e * e * e * e);
        CHECK(max_abs(compute_at_over_a(s)) <= 10.0 * e * e);
    }
    // b ~ eps^2. On a traveling wave a_t/a = D_t A / A - b_alpha with A - 1 = O(eps^4)
    // and b + omega eps^2 = O(eps^3), so a_t/a is O(eps^3), inside its O(eps^2) bound.
    const WaterState s1 = stokes_state(stokes_newton(0.05), 0.0, g);
    const WaterState s2 = stokes_state(stokes_newton(0.025), 0.0, g);
    const double rb = max_abs(compute_b(s1)) / max_abs(compute_b(s2));
    CHECK(rb == doctest::Approx(4.0).epsilon(0.1));
    const double ra = max_abs(compute_at_over_a(s1)) / max_abs(compute_at_over_a(s2));
    CHECK(ra == doctest::Approx(8.0).epsilon(0.15));
}

TEST_CASE("a_t/a matches D_t A / A - b_alpha along the flow") {
    // A = (a kappa_alpha) o kappa^{-1} and b = kappa_t o kappa^{-1}.
    const Grid g(1.0, 128);
    const WaterState s = generic_state(g);
    const double h = 1e-3;
    StepOptions opt;
    opt.krasny = 0.0;
    RhsEngine rhs(g);
    const RVec Ap = compute_A(step_rk4(s, h, rhs, opt)), Am = compute_A(step_rk4(s, -h, rhs, opt));
    const RVec A = compute_A(s), b = compute_b(s), ata = compute_at_over_a(s);
    const CVec Aa = derivative(g, to_complex(A)), ba = derivative(g, to_complex(b));
    double err = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        const double DtA = (Ap[j] - Am[j]) / (2.0 * h) + b[j] * Aa[j].real();
        err = std::max(err, std::abs(DtA / A[j] - ba[j].real() - ata[j]));
    }
    INFO("max |a_t/a| " << max_abs(ata) << " mismatch " << err);
    CHECK(err <= 1e-3 * max_abs(ata));
}

TEST_CASE("A is real and bounded below on a generic admissible state") {
    const Grid g(1.0, 128);
    const WaterState s = generic_state(g);
    const auto h = holo_residuals(s);
    CHECK(h.r1 < 1e-12);
    CHECK(h.r2 < 1e-12);
    const AuxFields aux = compute_aux(s);
    CHECK(a_equation_imag_residual(s, aux) <= 1e-10);
    CHECK(*std::min_element(aux.A.begin(), aux.A.end()) >= 0.5);
    SolveOptions nested;
    nested.a_method = AMethod::Nested;
    const RVec An = compute_A(s, nested);
    for (int j = 0; j < g.n(); ++j) CHECK(std::abs(An[j] - aux.A[j]) < 1e-10);
}

TEST_CASE("Stokes waves are traveling solutions") {
    const Grid g(1.0, 64);
    const StokesWave w = stokes_newton(0.1);
    const WaterState s = stokes_state(w, 0.4, g);
    const auto d = time_derivative(s);
    const CVec zt = derivative(g, s.offset), ut = derivative(g, s.u);
    for (int j = 0; j < g.n(); ++j) {
        CHECK(std::abs(d.dzeta[j] - w.omega * zt[j]) < 1e-9);
        CHECK(std::abs(d.du[j] - w.omega * ut[j]) < 1e-9);
    }
    CHECK(std::abs(mean(g, d.dzeta)) < 1e-8);

    // One period returns the profile to itself.
    const double T = 2.0 * kPi / w.omega;
    const WaterState end = evolve(s, s.t + T, T / 200.0);
    CHECK(state_diff(end, stokes_state(w, s.t + T, g)) <= 1e-6);

    // The basic energy of theta is constant along the traveling motion.
    auto energy = [&](double t) {
        const WaterState st = stokes_state(w, t, g);
        return basic_energy(g, compute_A(st), theta(st), theta_dt(st));
    };
    CHECK(std::abs(energy(0.0) - energy(1.7)) <= 1e-8 * std::max(1.0, std::abs(energy(0.0))));
}

TEST_CASE("small amplitude follows the linear dispersion relation") {
    const Grid g(1.0, 32);
    const double e = 1e-6;
    WaterState s = WaterState::rest(g);
    for (int j = 0; j < g.n(); ++j) {
        s.offset[j] = e * I * std::exp(I * g.alpha(j));
        s.u[j] = -e * std::exp(I * g.alpha(j));
    }
    // zeta_tt = i zeta_alpha for zeta = alpha + i e exp(i(alpha + t)).
    const auto d = time_derivative(s);
    for (int j = 0; j < g.n(); ++j) CHECK(std::abs(d.du[j] + I * e * std::exp(I * g.alpha(j))) < 1e-5 * e);
}

TEST_CASE("time reversal") {
    const Grid g(1.0, 64);
    const WaterState s = generic_state(g);
    StepOptions opt;
    opt.krasny = 0.0;
    RhsEngine rhs(g);
    const WaterState f = step_rk4(s, 0.01, rhs, opt);
    const WaterState b = step_rk4(f, -0.01, rhs, opt);
    CHECK(state_diff(b, s) <= 1e-10);
}

TEST_CASE("convergence in dt and n") {
    const Grid g(1.0, 64);
    const WaterState s = generic_state(g);
    const double T = 1.0;
    const WaterState a = evolve(s, T, 0.1), b = evolve(s, T, 0.05), c = evolve(s, T, 0.025);
    const double e1 = state_diff(a, b), e2 = state_diff(b, c);
    INFO("dt errors " << e1 << " " << e2);
    CHECK(e1 / e2 >= 12.0);

    const WaterState s2 = states::refine(s);
    const WaterState f1 = evolve(s, T, 0.025), f2 = evolve(s2, T, 0.025);
    const double dn = std::max(max_diff(f1.offset, every(f2.offset, 2)), max_diff(f1.u, every(f2.u, 2)));
    INFO("n change " << dn);
    CHECK(dn <= 1e-9);
}

TEST_CASE("holomorphicity diagnostics") {
    const Grid g(1.0, 128);
    const WaterState st = stokes_state(stokes_newton(0.1), 0.0, g);
    const auto h = holo_residuals(st);
    CHECK(h.r1 <= 1e-10);
    CHECK(h.r2 <= 1e-10);
    // e^{-i alpha} in zeta - alpha is an antiholomorphic mode of conj(zeta) - alpha.
    WaterState bad = st;
    for (int j = 0; j < g.n(); ++j) bad.offset[j] += 0.1 * std::exp(-I * g.alpha(j));
    CHECK(holo_residuals(bad).r1 >= 0.1);
    // The projection repairs it to the nearest admissible state and fixes admissible ones.
    WaterState fixed = st;
    RhsEngine(g).project(fixed);
    CHECK(state_diff(fixed, st) < 1e-12);
}

TEST_CASE("cubic forcing of Stokes waves") {
    const Grid g(1.0, 64);
    double prev = 0.0;
    for (double e : {0.1, 0.05}) {
        const StokesWave w = stokes_newton(e);
        const WaterState s = stokes_state(w, 0.0, g);
        const auto G = cubic_forcing(s);
        CVec d(g.n());
        for (int j = 0; j < g.n(); ++j) d[j] = G.G2[j] - 2.0 * e * e * e * I * std::exp(I * g.alpha(j));
        INFO("eps " << e << " G2 residual " << max_abs(d));
        CHECK(max_abs(d) <= 10.0 * std::pow(e, 4));
        const double size = max_abs(G.G1) + max_abs(G.G2);
        if (prev > 0.0) CHECK(prev / size == doctest::Approx(8.0).epsilon(0.2));
        prev = size;
    }
}

TEST_CASE("energy identity") {
    const Grid g(1.0, 128);
    const EnergyCheck c = energy_derivative_check(generic_state(g), 1e-3);
    INFO("fd " << c.fd_rate << " formula " << c.formula_rate);
    CHECK(c.rel_error <= 1e-3);
}

TEST_CASE("blow-up guard") {
    const Grid g(1.0, 64);
    WaterState s = WaterState::rest(g);
    for (int j = 0; j < g.n(); ++j) s.offset[j] = 1.2 * I * std::exp(I * g.alpha(j));
    CHECK_THROWS_AS(step_rk4(s, 0.01), BlowupDetected);
}
