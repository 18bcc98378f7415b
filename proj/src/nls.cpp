#include "wwsim/nls.hpp"

#include <cmath>

namespace wwsim {

namespace {

const cplx I1(0.0, 1.0);

CVec linear_factors(const Grid& g, const CubicNls& eq, double dt) {
    const int n = g.n();
    CVec f(n);
    for (int i = 0; i < n; ++i) {
        const double k = g.wavenumber(i);
        f[i] = std::exp(I1 * ((-eq.disp * k * k + eq.linear) * dt)) / static_cast<double>(n);
    }
    return f;
}

void apply_linear(const Grid& g, CVec& v, const CVec& fac, CVec& work) {
    g.dft(v.data(), work.data());
    for (size_t i = 0; i < v.size(); ++i) work[i] *= fac[i];
    g.idft(work.data(), v.data());
}

}  // namespace

CVec nls_evolve(const Grid& g, CVec v, const CubicNls& eq, double dt, double t_end,
                const NlsObserver& obs, long stride) {
    const long steps = std::lround(t_end / dt);
    const CVec half = linear_factors(g, eq, 0.5 * dt);
    CVec work(g.n());
    if (obs) obs(0.0, v);
    for (long s = 1; s <= steps; ++s) {
        apply_linear(g, v, half, work);
        for (auto& z : v) z *= std::exp(I1 * (eq.nonlin * std::norm(z) * dt));
        apply_linear(g, v, half, work);
        if (obs && (s % stride == 0 || s == steps)) obs(s * dt, v);
    }
    return v;
}

NlsState split_step_evolve(const NlsState& s, double dt, double T_end) {
    if (dt > 0.1 / (1.0 + std::pow(max_abs(s.B), 2)))
        throw std::invalid_argument("NLS step too large for the envelope amplitude");
    NlsState out = s;
    out.B = nls_evolve(s.grid, s.B, CubicNls::envelope(), dt, T_end - s.T);
    out.T = T_end;
    return out;
}

StandardState to_standard_form(const NlsState& s) {
    StandardState u{Grid(2.0 * s.grid.q(), s.grid.n()), 0.5 * s.T, CVec(s.B.size())};
    const cplx ph = std::exp(I1 * u.t);
    for (size_t j = 0; j < s.B.size(); ++j) u.u[j] = ph * s.B[j];
    return u;
}

NlsState from_standard_form(const StandardState& s) {
    NlsState b{Grid(0.5 * s.grid.q(), s.grid.n()), 2.0 * s.t, CVec(s.u.size())};
    const cplx ph = std::exp(-I1 * s.t);
    for (size_t j = 0; j < s.u.size(); ++j) b.B[j] = ph * s.u[j];
    return b;
}

LinFlow linear_flow(int k, double q, double t) {
    const double x2 = (k / q) * (k / q);
    const double c = 2.0 - x2;
    const double lam2 = x2 * c;
    LinFlow f{k, q, t, {1.0, 0.0, 0.0, 1.0}};
    if (k == 0) {
        f.m = {1.0, 0.0, 2.0 * t, 1.0};
    } else if (lam2 > 0.0) {
        const double lam = std::sqrt(lam2);
        const double sh = std::sinh(lam * t) / lam, ch = std::cosh(lam * t);
        f.m = {ch, sh * x2, sh * c, ch};
    } else if (lam2 < 0.0) {
        const double mu = std::sqrt(-lam2);
        const double sn = std::sin(mu * t) / mu, cs = std::cos(mu * t);
        f.m = {cs, sn * x2, sn * c, cs};
    } else {
        f.m = {1.0, x2 * t, 0.0, 1.0};
    }
    return f;
}

GrowthRate growth_rate(double q) {
    GrowthRate r{0.0, 0};
    const int kmax = static_cast<int>(std::ceil(std::sqrt(2.0) * q)) + 1;
    for (int k = 1; k <= kmax; ++k) {
        const double x = k / q;
        const double v = 2.0 - x * x;
        if (v <= 0.0) continue;
        const double rate = x * std::sqrt(v);
        if (rate > r.tau + 1e-15) r = {rate, k};
    }
    return r;
}

CVec unstable_seed(const Grid& g, double delta, int k0, double s_prime, double eta) {
    if (k0 <= 0 || (k0 / g.q()) * (k0 / g.q()) >= 2.0)
        throw NoUnstableMode("mode " + std::to_string(k0) + " is not in the unstable band");
    const double d = delta / (2.0 * s_prime);
    const double e = eta < 0.0 ? delta / 200.0 : eta;
    const double q = g.q(), s = 1.0 / std::sqrt(q);
    CVec w(g.n());
    for (int j = 0; j < g.n(); ++j) {
        const double x = g.alpha(j);
        w[j] = s * (d * 2.0 * std::cos(k0 * x / q) + e * 2.0 * std::cos(x / q));
    }
    return w;
}

NlsState lift_to_B(const Grid& g, const CVec& w0) {
    NlsState b{g, 0.0, CVec(w0.size())};
    for (size_t j = 0; j < w0.size(); ++j) b.B[j] = I1 * (1.0 + w0[j]);
    return b;
}

CVec perturbation(const CVec& u, double t) {
    CVec w(u.size());
    const cplx ph = std::exp(-I1 * t) / I1;
    for (size_t j = 0; j < u.size(); ++j) w[j] = u[j] * ph - 1.0;
    return w;
}

InstabilityReport instability_run(double q, double delta, double mu, int n, double dt,
                                  double s_prime) {
    const Grid g(q, n);
    const GrowthRate gr = growth_rate(q);
    const CVec w0 = unstable_seed(g, delta, gr.k0, s_prime);
    CVec u(n);
    for (int j = 0; j < n; ++j) u[j] = I1 * (1.0 + w0[j]);
    InstabilityReport rep{gr.tau, gr.k0, std::log(mu / delta) / gr.tau, 0.0, 0.0, 0.0, 0.0};
    // High-order norms amplify round-off; w is the deviation from a unit carrier,
    // so mode amplitudes below 1e-12 are noise.
    auto norm = [&](const CVec& w, double s) { return sobolev_norm(g, w, s, 1e-12); };
    rep.initial_norm = norm(w0, s_prime);
    nls_evolve(g, u, CubicNls::standard(), dt, rep.T0, [&](double t, const CVec& v) {
        const CVec w = perturbation(v, t);
        const double nw = norm(w, s_prime);
        rep.max_ratio = std::max(rep.max_ratio, nw / (delta * std::exp(gr.tau * t)));
        rep.final_norm = nw;
        rep.final_l2 = norm(w, 0.0);
    });
    return rep;
}

RateFit linear_rate_fit(double q, double seed, double t_end, int n, double dt) {
    const Grid g(q, n);
    const GrowthRate gr = growth_rate(q);
    if (gr.k0 == 0) throw NoUnstableMode("no unstable integer mode for this period");
    const double kap = gr.k0 / q;
    CVec u(n);
    for (int j = 0; j < n; ++j) u[j] = I1 * (1.0 + seed * std::cos(gr.k0 * g.alpha(j) / q));
    const int ip = gr.k0, im = n - gr.k0;
    double st = 0, sy = 0, stt = 0, sty = 0;
    int cnt = 0;
    CVec c(n);
    nls_evolve(g, u, CubicNls::standard(), dt, t_end, [&](double t, const CVec& v) {
        const CVec w = perturbation(v, t);
        g.dft(w.data(), c.data());
        const cplx phi = 0.5 * (c[ip] + std::conj(c[im]));
        const cplx psi = (c[ip] - std::conj(c[im])) / (2.0 * I1);
        const double y = std::log(std::abs(std::sqrt(2.0 - kap * kap) * phi + kap * psi));
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++cnt;
    }, std::max(1L, std::lround(0.05 / dt)));
    const double slope = (cnt * sty - st * sy) / (cnt * stt - st * st);
    return {gr.tau, gr.k0, slope, std::abs(slope - gr.tau) / gr.tau};
}

Conserved conserved(const NlsState& s) {
    const Grid& g = s.grid;
    const CVec bx = derivative(g, s.B, 1);
    double m = 0.0, h = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        const double a2 = std::norm(s.B[j]);
        m += a2;
        h += std::norm(bx[j]) / 8.0 - a2 * a2 / 4.0 + a2 / 2.0;
    }
    const double w = g.h() / g.length();
    return {m * w, h * w};
}

}  // namespace wwsim
