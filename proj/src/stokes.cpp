#include "wwsim/stokes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace wwsim {

namespace {

const cplx I1(0.0, 1.0);

cplx series_at(const CVec& c, int kmax, double x) {
    cplx s = 0.0;
    for (int k = -kmax; k <= kmax; ++k) s += c[k + kmax] * std::exp(I1 * (k * x));
    return s;
}

int profile_nodes(int kmax) {
    int n = 3 * kmax + 1;
    return n % 2 == 0 ? n : n + 1;
}

struct Layout {
    int K;
    int size() const { return 4 * K + 2; }
    int f(int k) const { return k < 1 ? k + K : k + K - 1; }  // k != 1
    int g(int k) const { return 2 * K + k + K; }
    int omega() const { return 4 * K + 1; }
};

RVec pack(const StokesWave& w, const Layout& L) {
    RVec x(L.size());
    for (int k = -L.K; k <= L.K; ++k) {
        if (k != 1) x[L.f(k)] = w.f_coeff(k).imag();
        x[L.g(k)] = w.g_coeff(k).real();
    }
    x[L.omega()] = w.omega;
    return x;
}

StokesWave unpack(const RVec& x, const Layout& L, double eps) {
    StokesWave w;
    w.eps = eps;
    w.kmax = L.K;
    w.F.assign(2 * L.K + 1, 0.0);
    w.G.assign(2 * L.K + 1, 0.0);
    for (int k = -L.K; k <= L.K; ++k) {
        w.F[k + L.K] = cplx(0.0, k == 1 ? eps : x[L.f(k)]);
        w.G[k + L.K] = x[L.g(k)];
    }
    w.omega = x[L.omega()];
    return w;
}

// Residual samples scaled by sqrt(h): the Euclidean norm equals the L2 norm.
RVec residual_vector(const StokesWave& w, const Grid& gp) {
    const int n = gp.n();
    WaterState s = stokes_state(w, 0.0, gp);
    SolveOptions so;
    so.tol = 1e-15;
    so.max_iter = 400;
    TimeDerivative d = time_derivative(s, so);
    CVec fp = derivative(gp, s.offset, 1), gp1 = derivative(gp, s.u, 1);
    CurveKernel K(gp, s.offset);
    CVec f1(n), f2(n), h1, h2;
    for (int j = 0; j < n; ++j) {
        f1[j] = std::conj(s.offset[j]);
        f2[j] = std::conj(s.u[j]);
    }
    K.hilbert_many({&f1, &f2}, {&h1, &h2});
    const double sh = std::sqrt(gp.h());
    RVec r(8 * n);
    for (int j = 0; j < n; ++j) {
        const cplx rz = d.dzeta[j] - w.omega * fp[j];
        const cplx ru = d.du[j] - w.omega * gp1[j];
        const cplx c1 = f1[j] - h1[j], c2 = f2[j] - h2[j];
        r[8 * j + 0] = sh * rz.real();
        r[8 * j + 1] = sh * rz.imag();
        r[8 * j + 2] = sh * ru.real();
        r[8 * j + 3] = sh * ru.imag();
        r[8 * j + 4] = sh * c1.real();
        r[8 * j + 5] = sh * c1.imag();
        r[8 * j + 6] = sh * c2.real();
        r[8 * j + 7] = sh * c2.imag();
    }
    return r;
}

double norm2(const RVec& r) {
    double a = 0.0;
    for (double v : r) a += v * v;
    return std::sqrt(a);
}

double safe_residual(const StokesWave& w, const Grid& gp, RVec* out) {
    try {
        RVec r = residual_vector(w, gp);
        const double nr = norm2(r);
        if (out) *out = std::move(r);
        return std::isfinite(nr) ? nr : std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

StokesWave resize_modes(const StokesWave& w, int K) {
    StokesWave o = w;
    o.kmax = K;
    o.F.assign(2 * K + 1, 0.0);
    o.G.assign(2 * K + 1, 0.0);
    for (int k = -K; k <= K; ++k) {
        o.F[k + K] = w.f_coeff(k);
        o.G[k + K] = w.g_coeff(k);
    }
    return o;
}

StokesWave newton_solve(double eps, StokesWave guess, const NewtonOptions& opt) {
    const Layout L{opt.n_modes};
    const Grid gp(1.0, profile_nodes(L.K));
    guess = resize_modes(guess, L.K);
    RVec x = pack(guess, L);
    RVec r;
    double res = safe_residual(unpack(x, L, eps), gp, &r);
    if (!std::isfinite(res)) throw NewtonDiverged("initial Stokes guess is not admissible");
    for (int it = 0; it < opt.max_iter && res > opt.tol; ++it) {
        const int m = static_cast<int>(r.size()), nx = L.size();
        Eigen::MatrixXd J(m, nx);
        for (int c = 0; c < nx; ++c) {
            RVec xp = x, xm = x, rp, rm;
            xp[c] += opt.fd_step;
            xm[c] -= opt.fd_step;
            if (!std::isfinite(safe_residual(unpack(xp, L, eps), gp, &rp)) ||
                !std::isfinite(safe_residual(unpack(xm, L, eps), gp, &rm)))
                throw NewtonDiverged("Jacobian evaluation failed");
            for (int i = 0; i < m; ++i) J(i, c) = (rp[i] - rm[i]) / (2.0 * opt.fd_step);
        }
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), m);
        Eigen::VectorXd dx = J.colPivHouseholderQr().solve(-rv);
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 12; ++k, lambda *= 0.5) {
            RVec xt = x, rt;
            for (int c = 0; c < nx; ++c) xt[c] += lambda * dx[c];
            const double rt_norm = safe_residual(unpack(xt, L, eps), gp, &rt);
            if (rt_norm < res) {
                x = std::move(xt);
                r = std::move(rt);
                res = rt_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (!(res <= opt.tol))
        throw NewtonDiverged("Stokes Newton stalled at residual " + std::to_string(res) +
                             " for eps=" + std::to_string(eps));
    StokesWave w = unpack(x, L, eps);
    w.residual = res;
    return w;
}

}  // namespace

cplx StokesWave::F_at(double x) const { return series_at(F, kmax, x); }
cplx StokesWave::G_at(double x) const { return series_at(G, kmax, x); }

StokesWave stokes_expansion(double eps) {
    if (!(eps >= 0.0 && eps <= 0.2))
        throw AmplitudeOutOfRange("Stokes expansion needs 0 <= eps <= 0.2");
    StokesWave w;
    w.eps = eps;
    w.omega = 1.0 + 0.5 * eps * eps;
    w.kmax = 1;
    const double e2 = eps * eps, e3 = e2 * eps;
    w.F = {cplx(0.0, 0.5 * e3), cplx(0.0, e2), cplx(0.0, eps)};
    // G = omega F' + b (1 + F') with b = -omega eps^2, truncated after eps^3.
    w.G = {0.5 * e3, -e2, -eps + 0.5 * e3};
    w.residual = std::numeric_limits<double>::quiet_NaN();
    return w;
}

StokesWave stokes_newton(double eps, const StokesWave& guess, const NewtonOptions& opt) {
    if (!(eps >= 0.0 && eps <= 0.15)) throw AmplitudeOutOfRange("Stokes Newton needs 0 <= eps <= 0.15");
    return newton_solve(eps, guess, opt);
}

StokesWave stokes_newton(double eps, const NewtonOptions& opt) {
    if (!(eps >= 0.0 && eps <= 0.15)) throw AmplitudeOutOfRange("Stokes Newton needs 0 <= eps <= 0.15");
    if (eps <= 0.05) return newton_solve(eps, stokes_expansion(eps), opt);
    StokesWave w = newton_solve(0.05, stokes_expansion(0.05), opt);
    double e = 0.05;
    while (e < eps) {
        const double next = std::min(eps, e + 0.01);
        StokesWave g = w;
        g.omega = 1.0 + 0.5 * next * next;
        w = newton_solve(next, g, opt);
        e = next;
    }
    return w;
}

double stokes_residual(const StokesWave& w, int n_profile) {
    return safe_residual(w, Grid(1.0, n_profile), nullptr);
}

WaterState stokes_state(const StokesWave& w, double t, const Grid& g, double phase) {
    const double q = g.q();
    if (!(q >= 1.0) || std::abs(q - std::round(q)) > 1e-12)
        throw IncompatiblePeriod("grid period factor q must be a positive integer");
    WaterState s = WaterState::rest(g);
    s.t = t;
    const double shift = phase + w.omega * t;
    for (int j = 0; j < g.n(); ++j) {
        const double x = g.alpha(j) + shift;
        s.offset[j] = w.F_at(x);
        s.u[j] = w.G_at(x);
    }
    return s;
}

StokesWave StokesFamily::at(double gam) const {
    const int m = static_cast<int>(gamma.size());
    if (m == 1) return waves[0];
    int i = static_cast<int>(std::upper_bound(gamma.begin(), gamma.end(), gam) - gamma.begin()) - 2;
    i = std::clamp(i, 0, std::max(0, m - 4));
    const int cnt = std::min(4, m);
    StokesWave out = waves[i];
    out.eps = gam;
    out.omega = 0.0;
    std::fill(out.F.begin(), out.F.end(), cplx(0.0));
    std::fill(out.G.begin(), out.G.end(), cplx(0.0));
    for (int a = 0; a < cnt; ++a) {
        double l = 1.0;
        for (int b = 0; b < cnt; ++b)
            if (b != a) l *= (gam - gamma[i + b]) / (gamma[i + a] - gamma[i + b]);
        const StokesWave& w = waves[i + a];
        for (int k = -out.kmax; k <= out.kmax; ++k) {
            out.F[k + out.kmax] += l * w.f_coeff(k);
            out.G[k + out.kmax] += l * w.g_coeff(k);
        }
        out.omega += l * w.omega;
    }
    return out;
}

StokesFamily build_stokes_family(double gamma_max, int points, const NewtonOptions& opt) {
    StokesFamily fam;
    StokesWave prev;
    for (int i = 0; i < points; ++i) {
        const double gam = points == 1 ? 0.0 : gamma_max * i / (points - 1);
        StokesWave w;
        if (gam == 0.0) {
            w = resize_modes(stokes_expansion(0.0), opt.n_modes);
            w.residual = 0.0;
        } else if (gam <= 0.05 || i == 0) {
            w = stokes_newton(gam, opt);
        } else {
            w = stokes_newton(gam, prev.eps > 0.0 ? prev : stokes_expansion(gam), opt);
        }
        fam.gamma.push_back(gam);
        fam.waves.push_back(w);
        prev = w;
    }
    return fam;
}

namespace {

// Squared distance as a trig polynomial in phase: d2(phi) = c0 - 2 Re sum_k a_k e^{-ik phi}.
struct PhaseProfile {
    double c0;
    CVec a;  // index k + K
    int K;
    double eval(double phi) const {
        cplx s = 0.0;
        for (int k = -K; k <= K; ++k) s += a[k + K] * std::exp(-I1 * (k * phi));
        return c0 - 2.0 * s.real();
    }
    // First and second phase derivatives of d2.
    std::pair<double, double> slope(double phi) const {
        cplx s1 = 0.0, s2 = 0.0;
        for (int k = -K; k <= K; ++k) {
            const cplx t = a[k + K] * std::exp(-I1 * (k * phi));
            s1 += -I1 * double(k) * t;
            s2 += -double(k * k) * t;
        }
        return {-2.0 * s1.real(), -2.0 * s2.real()};
    }
};

PhaseProfile phase_profile(const WaterState& s, const StokesWave& w) {
    const Grid& g = s.grid;
    const int n = g.n();
    const double L = g.length();
    double self = 0.0;
    for (const auto& v : s.offset) self += std::norm(v);
    self *= g.h();
    PhaseProfile p;
    p.K = w.kmax;
    p.a.assign(2 * w.kmax + 1, 0.0);
    double fam = 0.0;
    for (int k = -w.kmax; k <= w.kmax; ++k) {
        const cplx c = w.f_coeff(k);
        fam += std::norm(c) * L;
        if (c == 0.0) continue;
        cplx proj = 0.0;
        for (int j = 0; j < n; ++j) proj += s.offset[j] * std::exp(-I1 * (k * g.alpha(j)));
        p.a[k + w.kmax] = proj * g.h() * std::conj(c);
    }
    p.c0 = self + fam;
    return p;
}

}  // namespace

FamilyDistance member_distance(const WaterState& s, const StokesWave& w) {
    PhaseProfile p = phase_profile(s, w);
    const int m = std::max(s.grid.n(), 8);
    const double dphi = 2.0 * kPi / m;
    // Coarse search over m equispaced phases as one correlation.
    CVec spec(m, 0.0), vals(m);
    for (int k = -p.K; k <= p.K; ++k) spec[((k % m) + m) % m] += std::conj(p.a[k + p.K]);
    Grid gm(1.0, m);
    gm.idft(spec.data(), vals.data());  // sum_k conj(a_k) e^{+2 pi i k j/m}
    int best = 0;
    double bestv = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        const double v = p.c0 - 2.0 * vals[j].real();
        if (v < bestv) {
            bestv = v;
            best = j;
        }
    }
    double phi = best * dphi;
    const double fm = p.eval(phi - dphi), f0 = p.eval(phi), fp = p.eval(phi + dphi);
    const double den = fm - 2.0 * f0 + fp;
    if (den > 0.0) phi += 0.5 * dphi * (fm - fp) / den;
    if (p.eval(phi) > f0) phi = best * dphi;
    // Newton polish; the parabola alone leaves a phase error of order dphi^3.
    for (int it = 0; it < 4; ++it) {
        const auto [d1, d2] = p.slope(phi);
        if (!(d2 > 0.0)) break;
        const double step = d1 / d2;
        if (std::abs(step) > dphi) break;
        phi -= step;
    }
    phi = std::remainder(phi, 2.0 * kPi);
    // Direct evaluation avoids the cancellation in c0 - 2 Re(...) for near members.
    const Grid& g = s.grid;
    double acc = 0.0;
    for (int j = 0; j < g.n(); ++j) acc += std::norm(s.offset[j] - w.F_at(g.alpha(j) + phi));
    return {std::sqrt(acc * g.h()), w.eps, phi};
}

FamilyDistance family_distance(const WaterState& s, const StokesFamily& fam) {
    const int m = static_cast<int>(fam.gamma.size());
    std::vector<FamilyDistance> grid_d(m);
    int best = 0;
    for (int i = 0; i < m; ++i) {
        grid_d[i] = member_distance(s, fam.waves[i]);
        grid_d[i].gamma = fam.gamma[i];
        if (grid_d[i].dist < grid_d[best].dist) best = i;
    }
    if (m < 3) return grid_d[best];
    double lo = fam.gamma[std::max(0, best - 1)], hi = fam.gamma[std::min(m - 1, best + 1)];
    auto f = [&](double gam) { return member_distance(s, fam.at(gam)); };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    FamilyDistance f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
        if (f1.dist < f2.dist) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    FamilyDistance r = f1.dist < f2.dist ? f1 : f2;
    if (grid_d[best].dist < r.dist) r = grid_d[best];
    return r;
}

namespace {

// Monotone piecewise-cubic (Fritsch-Carlson) interpolant through (xs, ys).
double pchip(const RVec& xs, const RVec& ys, const RVec& d, double x) {
    const size_t i = std::clamp<size_t>(
        std::upper_bound(xs.begin(), xs.end(), x) - xs.begin(), 1, xs.size() - 1) - 1;
    const double hh = xs[i + 1] - xs[i], t = (x - xs[i]) / hh;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * ys[i] + h10 * hh * d[i] + h01 * ys[i + 1] + h11 * hh * d[i + 1];
}

RVec pchip_slopes(const RVec& xs, const RVec& ys) {
    const size_t m = xs.size();
    RVec del(m - 1), d(m, 0.0);
    for (size_t i = 0; i + 1 < m; ++i) del[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    d[0] = del[0];
    d[m - 1] = del[m - 2];
    for (size_t i = 1; i + 1 < m; ++i) {
        if (del[i - 1] * del[i] <= 0.0) continue;
        const double w1 = 2 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
        const double w2 = (xs[i + 1] - xs[i]) + 2 * (xs[i] - xs[i - 1]);
        d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
    }
    return d;
}

}  // namespace

Elevation eulerian_elevation(const WaterState& s) {
    const Grid& g = s.grid;
    const int n = g.n();
    const double L = g.length();
    // Periodically extended samples of x(alpha) and alpha, three copies.
    RVec xs, as;
    xs.reserve(3 * n);
    as.reserve(3 * n);
    for (int c = -1; c <= 1; ++c)
        for (int j = 0; j < n; ++j) {
            xs.push_back(g.alpha(j) + s.offset[j].real() + c * L);
            as.push_back(g.alpha(j) + c * L);
        }
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw NonMonotoneParametrization("Re zeta is not increasing");
    const RVec slopes = pchip_slopes(xs, as);
    const CVec dz = derivative(g, s.offset, 1);
    Elevation e;
    e.x.resize(n);
    e.eta.resize(n);
    for (int j = 0; j < n; ++j) {
        const double x = g.alpha(j);
        double a = pchip(xs, as, slopes, x);
        // Polish on the spectral interpolant.
        for (int it = 0; it < 8; ++it) {
            const double fx = a + evaluate(g, s.offset, a).real() - x;
            const double dfx = 1.0 + evaluate(g, dz, a).real();
            const double step = fx / dfx;
            a -= step;
            if (std::abs(step) < 1e-15) break;
        }
        e.x[j] = x;
        e.eta[j] = evaluate(g, s.offset, a).imag();
    }
    return e;
}

cplx eulerian_harmonic(const Elevation& e, int k) {
    cplx s = 0.0;
    for (size_t j = 0; j < e.x.size(); ++j) s += e.eta[j] * std::exp(-I1 * (k * e.x[j]));
    return 2.0 * s / static_cast<double>(e.x.size());
}

void write_coefficient_table(std::ostream& os, const StokesWave& w) {
    os << std::setprecision(17);
    os << "# eps " << w.eps << "\n# omega " << w.omega << "\n# residual " << w.residual
       << "\n# columns: k Im_F Re_G (coefficients of e^{ik Gamma})\n";
    for (int k = -w.kmax; k <= w.kmax; ++k)
        if (w.f_coeff(k) != 0.0 || w.g_coeff(k) != 0.0)
            os << k << ' ' << w.f_coeff(k).imag() << ' ' << w.g_coeff(k).real() << '\n';
}

}  // namespace wwsim
