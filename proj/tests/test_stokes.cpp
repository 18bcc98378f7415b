#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "wwsim/stokes.hpp"

using namespace wwsim;
using oracle::max_diff;

namespace {

const cplx I(0.0, 1.0);

// Classical deep-water dispersion: omega^2 = 1 + a^2 + (5/4) a^4 with the
// first-harmonic surface amplitude a = eps + eps^3/8.
double classical_omega(double eps) {
    const double a = eps + eps * eps * eps / 8.0;
    return std::sqrt(1.0 + a * a + 1.25 * a * a * a * a);
}

const StokesFamily& family() {
    static const StokesFamily fam = build_stokes_family(0.15);
    return fam;
}

}  // namespace

TEST_CASE("closed-form expansion") {
    const StokesWave z = stokes_expansion(0.0);
    CHECK(z.omega == 1.0);
    for (const auto& c : z.F) CHECK(c == cplx(0.0));
    for (const auto& c : z.G) CHECK(c == cplx(0.0));

    const StokesWave w = stokes_expansion(0.1);
    CHECK(w.omega == doctest::Approx(1.005).epsilon(1e-15));
    CHECK(std::abs(w.f_coeff(1) - 0.1 * I) < 1e-16);
    CHECK(std::abs(w.f_coeff(0) - 0.01 * I) < 1e-16);
    CHECK(std::abs(w.f_coeff(-1) - 0.0005 * I) < 1e-16);
    CHECK_THROWS_AS(stokes_expansion(0.25), AmplitudeOutOfRange);
    CHECK_THROWS_AS(stokes_expansion(-0.01), AmplitudeOutOfRange);
}

TEST_CASE("Newton waves: dispersion") {
    for (double e : {0.02, 0.04, 0.08}) {
        const StokesWave w = stokes_newton(e);
        CHECK(w.residual <= 1e-11);
        CHECK(std::abs(w.omega - 1.0 - e * e / 2.0) <= 2.0 * e * e * e);
        // The remainder is the classical fourth-order term 0.625 eps^4.
        CHECK(std::abs(w.omega - classical_omega(e)) <= 5.0 * std::pow(e, 6));
    }
    CHECK_THROWS_AS(stokes_newton(0.2), AmplitudeOutOfRange);
}

TEST_CASE("Newton waves: symmetry, amplitude pin and agreement with the expansion") {
    for (double e : {0.05, 0.1}) {
        const StokesWave w = stokes_newton(e);
        double reF = 0.0, imG = 0.0, diff2 = 0.0;
        const StokesWave ex = stokes_expansion(e);
        for (int k = -w.kmax; k <= w.kmax; ++k) {
            reF = std::max(reF, std::abs(w.f_coeff(k).real()));
            imG = std::max(imG, std::abs(w.g_coeff(k).imag()));
            diff2 += std::norm(w.f_coeff(k) - ex.f_coeff(k));
        }
        CHECK(reF <= 1e-11);
        CHECK(imG <= 1e-11);
        CHECK(w.f_coeff(1).imag() == doctest::Approx(e).epsilon(1e-13));
        // L2 over one 2 pi period of the profile difference.
        CHECK(std::sqrt(2.0 * kPi * diff2) <= 5.0 * std::pow(e, 4));
        CHECK(stokes_residual(w) <= 1e-10);
    }
}

TEST_CASE("sampling onto simulation grids") {
    const StokesWave w = stokes_newton(0.1);
    const Grid g(3.0, 192);
    const WaterState s = stokes_state(w, 0.0, g, kPi);
    for (int j = 0; j < g.n(); j += 7) {
        CHECK(std::abs(s.offset[j] - w.F_at(g.alpha(j) + kPi)) < 1e-13);
        CHECK(std::abs(s.u[j] - w.G_at(g.alpha(j) + kPi)) < 1e-13);
    }
    const WaterState s0 = stokes_state(w, 0.0, g);
    for (int j = 0; j < g.n(); ++j) CHECK(std::abs(s0.offset[j] - w.F_at(g.alpha(j))) < 1e-13);
    const auto h = holo_residuals(s0);
    CHECK(h.r1 <= 1e-10);
    CHECK(h.r2 <= 1e-10);
    CHECK_THROWS_AS(stokes_state(w, 0.0, Grid(2.5, 64)), IncompatiblePeriod);
}

TEST_CASE("b and A of a Stokes wave are traveling profiles") {
    const StokesWave w = stokes_newton(0.1);
    const Grid g(1.0, 64);
    const double h = 1e-3;
    const RVec bp = compute_b(stokes_state(w, h, g)), bm = compute_b(stokes_state(w, -h, g));
    const RVec Ap = compute_A(stokes_state(w, h, g)), Am = compute_A(stokes_state(w, -h, g));
    const WaterState s = stokes_state(w, 0.0, g);
    const CVec ba = derivative(g, to_complex(compute_b(s))), Aa = derivative(g, to_complex(compute_A(s)));
    for (int j = 0; j < g.n(); ++j) {
        CHECK(std::abs((bp[j] - bm[j]) / (2 * h) - w.omega * ba[j].real()) <= 1e-6);
        CHECK(std::abs((Ap[j] - Am[j]) / (2 * h) - w.omega * Aa[j].real()) <= 1e-6);
    }
}

TEST_CASE("family distance") {
    const StokesFamily& fam = family();
    const Grid g(4.0, 256);

    SUBCASE("a member is at distance zero") {
        const double phi = 1.234;
        // A tabulated Newton wave and an interpolated member are exact members.
        for (const StokesWave& w : {stokes_newton(fam.gamma[25]), fam.at(0.0937)}) {
            const FamilyDistance d = family_distance(stokes_state(w, 0.0, g, phi), fam);
            CHECK(d.dist <= 1e-8);
            CHECK(d.gamma == doctest::Approx(w.eps).epsilon(1e-6));
            CHECK(std::remainder(d.phase - phi, 2.0 * kPi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
        }
        // Between grid points the cubic interpolation in gamma limits the match.
        CHECK(family_distance(stokes_state(stokes_newton(0.0937), 0.0, g, phi), fam).dist <= 1e-6);
    }
    SUBCASE("an orthogonal sideband of size h is at distance h") {
        const StokesWave w = stokes_newton(0.1);
        for (double h : {1e-3, 1e-2}) {
            WaterState s = stokes_state(w, 0.0, g, 0.4);
            // L2 norm of c e^{i 5 alpha / 4} on the grid is |c| sqrt(8 pi).
            for (int j = 0; j < g.n(); ++j) s.offset[j] += h / std::sqrt(8.0 * kPi) * std::exp(I * 1.25 * g.alpha(j));
            const double d = family_distance(s, fam).dist;
            CHECK(d == doctest::Approx(h).epsilon(0.05));
        }
    }
    SUBCASE("rest state is the gamma = 0 member") {
        const FamilyDistance d = family_distance(WaterState::rest(g), fam);
        CHECK(d.dist <= 1e-12);
        CHECK(d.gamma == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
    SUBCASE("invariant under a shift by one carrier wavelength") {
        const StokesWave w = stokes_newton(0.08);
        WaterState s = stokes_state(w, 0.0, g, 0.3);
        for (int j = 0; j < g.n(); ++j) s.offset[j] += 0.003 * std::exp(I * 0.75 * g.alpha(j));
        WaterState t = s;
        const int shift = g.n() / 4;  // 2 pi on a grid of length 8 pi
        for (int j = 0; j < g.n(); ++j) {
            t.offset[j] = s.offset[(j + shift) % g.n()];
            t.u[j] = s.u[(j + shift) % g.n()];
        }
        CHECK(family_distance(s, fam).dist == doctest::Approx(family_distance(t, fam).dist).epsilon(1e-10));
    }
}

TEST_CASE("Eulerian elevation") {
    const Grid g(1.0, 128);
    const Elevation flat = eulerian_elevation(WaterState::rest(g));
    CHECK(max_abs(flat.eta) == 0.0);

    const double e = 0.05;
    const StokesWave w = stokes_newton(e);
    const Elevation el = eulerian_elevation(stokes_state(w, 0.0, g));
    const double tol = 5.0 * std::pow(e, 4);
    CHECK(std::abs(eulerian_harmonic(el, 1).real() - (e + e * e * e / 8.0)) <= tol);
    CHECK(std::abs(eulerian_harmonic(el, 2).real() - e * e / 2.0) <= tol);
    CHECK(std::abs(eulerian_harmonic(el, 3).real() - 3.0 * e * e * e / 8.0) <= tol);
    // Mean level eps^2/2, the same at every time.
    const double m0 = eulerian_harmonic(el, 0).real() / 2.0;
    CHECK(std::abs(m0 - e * e / 2.0) <= tol);
    const double m1 = eulerian_harmonic(eulerian_elevation(stokes_state(w, 1.3, g)), 0).real() / 2.0;
    CHECK(std::abs(m1 - m0) <= 1e-8);

    WaterState folded = WaterState::rest(g);
    for (int j = 0; j < g.n(); ++j) folded.offset[j] = 0.5 * std::sin(2.0 * g.alpha(j)) + 0.0 * I;
    for (int j = 0; j < g.n(); ++j) folded.offset[j] *= 1.5;
    CHECK_THROWS_AS(eulerian_elevation(folded), NonMonotoneParametrization);
}

TEST_CASE("coefficient table") {
    std::ostringstream a, b, z;
    write_coefficient_table(a, stokes_newton(0.1));
    write_coefficient_table(b, stokes_newton(0.1));
    CHECK(a.str() == b.str());
    bool found = false;
    std::istringstream in(a.str());
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int k;
        double f, g;
        ls >> k >> f >> g;
        if (k == 1) {
            found = true;
            CHECK(f == doctest::Approx(0.1).epsilon(1e-12));
        }
    }
    CHECK(found);
    write_coefficient_table(z, stokes_newton(0.0));
    std::istringstream zin(z.str());
    for (std::string line; std::getline(zin, line);) CHECK((line.empty() || line[0] == '#'));
}
