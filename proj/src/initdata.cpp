#include "wwsim/initdata.hpp"

#include <cmath>
#include <string>

#include "wwsim/modulation.hpp"

namespace wwsim {

namespace {

const cplx I1(0.0, 1.0);

Grid fast_grid(const SeedSpec& spec) {
    const double q = spec.B0.grid.q() / spec.eps;
    if (std::abs(q - std::round(q)) > 1e-9) throw IncompatiblePeriod("q1/eps must be an integer");
    return Grid(std::round(q), spec.n);
}

CVec packet(const Grid& g, const CVec& Bf, double eps) {
    CVec p(g.n());
    for (int j = 0; j < g.n(); ++j) p[j] = eps * (Bf[j] - I1) * std::exp(I1 * g.alpha(j));
    return p;
}

}  // namespace

cplx orthogonality_defect(const SeedSpec& spec) {
    const Grid g = fast_grid(spec);
    const CVec Bf = embed_slow(spec.B0, g, spec.eps, 0.0);
    cplx s = 0.0;
    for (int j = 0; j < g.n(); ++j) s += Bf[j] * std::exp(I1 * g.alpha(j));
    return s / static_cast<double>(g.n());
}

InitialData build_initial_data(const SeedSpec& spec) {
    const Grid g = fast_grid(spec);
    const int n = g.n();
    if (std::abs(orthogonality_defect(spec)) > 1e-12)
        throw OrthogonalityViolated("int B0(eps alpha) e^{i alpha} must vanish");
    const CVec Bf = embed_slow(spec.B0, g, spec.eps, 0.0);
    const WaterState st = stokes_state(spec.stokes, 0.0, g);
    const CVec pk = packet(g, Bf, spec.eps);

    // W = conj(zeta_1) - alpha, the holomorphic target for conj(zeta) - alpha.
    CVec W(n), off(n);
    for (int j = 0; j < n; ++j) {
        off[j] = st.offset[j] + pk[j];
        W[j] = std::conj(off[j]);
    }
    int iterations = 0;
    RVec diffs;
    CurveKernel K(g, off);
    for (int it = 1; it <= spec.max_iter; ++it) {
        CVec h = K.hilbert(W);
        CVec next(n), d(n);
        for (int j = 0; j < n; ++j) {
            next[j] = std::conj(0.5 * (W[j] + h[j]));
            d[j] = next[j] - off[j];
        }
        const double diff = l2_norm(g, d);
        diffs.push_back(diff);
        off.swap(next);
        iterations = it;
        if (diff <= spec.tol) break;
        if (it == spec.max_iter)
            throw NoConvergence("initial-data iteration did not converge in " +
                                std::to_string(spec.max_iter) + " steps");
        K.rebuild(off);
    }
    double contraction = 0.0;
    for (size_t k = 1; k < diffs.size(); ++k)
        if (diffs[k - 1] > 1e3 * spec.tol) contraction = std::max(contraction, diffs[k] / diffs[k - 1]);

    // (I - H_gamma)(conj(gamma) - alpha) is the constant below; shifting zeta by its
    // conjugate removes it. Weighting W instead of conj(gamma) - alpha gives twice the value.
    CurveKernel Kg(g, off);
    CVec gb(n);
    for (int j = 0; j < n; ++j) gb[j] = std::conj(off[j]);
    const cplx c_gamma = cauchy_constant(Kg, gb);
    for (auto& v : off) v -= std::conj(c_gamma);

    CurveKernel K0(g, off);
    CVec Wv(n);
    for (int j = 0; j < n; ++j)
        Wv[j] = std::conj(st.u[j]) -
                I1 * spec.stokes.omega * spec.eps * (std::conj(Bf[j]) + I1) * std::exp(-I1 * g.alpha(j));
    CVec hv = K0.hilbert(Wv);
    const cplx d_v0 = -0.5 * cauchy_constant(K0, Wv);
    WaterState s = WaterState::rest(g);
    s.offset = off;
    for (int j = 0; j < n; ++j) s.u[j] = std::conj(0.5 * (Wv[j] + hv[j]) + d_v0);
    return {s, iterations, diffs, contraction, c_gamma, d_v0};
}

Admissibility verify_admissibility(const WaterState& s) {
    const Grid& g = s.grid;
    CurveKernel K(g, s.offset);
    const int n = g.n();
    CVec f1(n), f2(n), h1, h2;
    for (int j = 0; j < n; ++j) {
        f1[j] = std::conj(s.offset[j]);
        f2[j] = std::conj(s.u[j]);
    }
    K.hilbert_many({&f1, &f2}, {&h1, &h2});
    for (int j = 0; j < n; ++j) {
        f1[j] -= h1[j];
        f2[j] -= h2[j];
    }
    Admissibility a;
    a.zeta_residual = l2_norm(g, f1);
    a.v_residual = l2_norm(g, f2);
    a.threshold = 1e-10 * std::sqrt(g.q());
    a.pass = a.zeta_residual <= a.threshold && a.v_residual <= a.threshold;
    return a;
}

double seed_size(const NlsState& B0, double s_prime) {
    CVec d(B0.B.size());
    for (size_t j = 0; j < d.size(); ++j) d[j] = B0.B[j] - I1;
    return sobolev_norm(B0.grid, d, s_prime, 1e-15);
}

Closeness closeness(const InitialData& d, const SeedSpec& spec, double s, double s_prime) {
    const Grid& g = d.state.grid;
    const int n = g.n();
    const CVec Bf = embed_slow(spec.B0, g, spec.eps, 0.0);
    const WaterState st = stokes_state(spec.stokes, 0.0, g);
    const CVec pk = packet(g, Bf, spec.eps);
    CVec ez(n), ev(n), pz(n), pv(n);
    for (int j = 0; j < n; ++j) {
        pz[j] = d.state.offset[j] - st.offset[j];
        pv[j] = d.state.u[j] - st.u[j];
        ez[j] = pz[j] - pk[j];
        ev[j] = pv[j] - I1 * spec.stokes.omega * pk[j];
    }
    const double size = seed_size(spec.B0, s_prime);
    const double scale = std::pow(spec.eps, 1.5) * size;
    Closeness c;
    c.zeta_const = size > 0.0 ? sobolev_norm(g, ez, s + 1.0, 1e-16) / scale : 0.0;
    c.v_const = size > 0.0 ? sobolev_norm(g, ev, s + 1.0, 1e-16) / scale : 0.0;
    c.perturbation = std::hypot(l2_norm(g, pz), l2_norm(g, pv));
    return c;
}

}  // namespace wwsim
