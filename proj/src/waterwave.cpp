#include "wwsim/waterwave.hpp"

#include <cmath>
#include <string>

namespace wwsim {

namespace {

const cplx I1(0.0, 1.0);

CVec conj_of(const CVec& f) {
    CVec out(f.size());
    for (size_t j = 0; j < f.size(); ++j) out[j] = std::conj(f[j]);
    return out;
}

double l2_real(const Grid& g, const RVec& a, const RVec& b) {
    double acc = 0.0;
    for (size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(acc * g.h());
}

struct AuxRhs {
    CVec rhs_b;     // (I - H) b = rhs_b
    CVec rhs_a;     // (I - H)((A - 1) conj(zeta_alpha)) = rhs_a
    CVec r1;        // i [u, H](conj(u)_alpha / zeta_alpha)
    CVec g;         // (conj(zeta_alpha) - 1) / zeta_alpha
    CVec hg;        // H g
    CVec ua;
};

AuxRhs aux_rhs(const CurveKernel& K, const CVec& u) {
    const Grid& grid = K.grid();
    const int n = grid.n();
    const CVec& za = K.zeta_alpha();
    AuxRhs r;
    r.ua = derivative(grid, u, 1);
    r.g.resize(n);
    CVec ug(n), w(n), uw(n), zb(n);
    for (int j = 0; j < n; ++j) {
        zb[j] = std::conj(za[j]) - 1.0;
        r.g[j] = zb[j] / za[j];
        ug[j] = u[j] * r.g[j];
        w[j] = std::conj(r.ua[j]) / za[j];
        uw[j] = u[j] * w[j];
    }
    CVec hug, hw, huw, hzb;
    K.hilbert_many({&r.g, &ug, &w, &uw, &zb}, {&r.hg, &hug, &hw, &huw, &hzb});
    r.rhs_b.resize(n);
    r.rhs_a.resize(n);
    r.r1.resize(n);
    for (int j = 0; j < n; ++j) {
        r.rhs_b[j] = -(u[j] * r.hg[j] - hug[j]);
        r.r1[j] = I1 * (u[j] * hw[j] - huw[j]);
        const cplx comm_za = za[j] * r.hg[j] - hzb[j];
        r.rhs_a[j] = r.r1[j] - comm_za;
    }
    return r;
}

// Joint Neumann iteration: (I - K) b = Re(rhs_b), (I + K*) k = Re(za rhs_a/|za|), A = 1 + k/|za|.
AuxFields solve_weighted(const CurveKernel& K, const AuxRhs& r, const SolveOptions& opt,
                         const RVec* b0, const RVec* a0, long* sweeps) {
    const Grid& grid = K.grid();
    const int n = grid.n();
    const CVec& za = K.zeta_alpha();
    RVec fb(n), fk(n), mod(n);
    for (int j = 0; j < n; ++j) {
        mod[j] = std::abs(za[j]);
        fb[j] = r.rhs_b[j].real();
        fk[j] = (za[j] * r.rhs_a[j]).real() / mod[j];
    }
    RVec xb = b0 ? *b0 : fb;
    RVec xk(n);
    if (a0) {
        for (int j = 0; j < n; ++j) xk[j] = (*a0)[j] * mod[j];
    } else {
        xk = fk;
    }
    bool done_b = false, done_k = false;
    int it_b = 0, it_k = 0;
    RVec kb, kk, nb(n), nk(n);
    for (int it = 1; it <= opt.max_iter && !(done_b && done_k); ++it) {
        K.double_layer_pair(done_b ? nullptr : &xb, &kb, done_k ? nullptr : &xk, &kk);
        if (sweeps) ++*sweeps;
        if (!done_b) {
            for (int j = 0; j < n; ++j) nb[j] = fb[j] + kb[j];
            const double ch = l2_real(grid, nb, xb);
            xb.swap(nb);
            it_b = it;
            done_b = ch <= opt.tol;
        }
        if (!done_k) {
            for (int j = 0; j < n; ++j) nk[j] = fk[j] - kk[j];
            const double ch = l2_real(grid, nk, xk);
            xk.swap(nk);
            it_k = it;
            done_k = ch <= opt.tol;
        }
    }
    if (!(done_b && done_k))
        throw NoConvergence("b/A solve: no convergence in " + std::to_string(opt.max_iter) +
                            " iterations");
    AuxFields out;
    out.b = std::move(xb);
    out.A.resize(n);
    for (int j = 0; j < n; ++j) out.A[j] = 1.0 + xk[j] / mod[j];
    out.iters_b = it_b;
    out.iters_A = it_k;
    return out;
}

RVec solve_A_nested(const CurveKernel& K, const AuxRhs& r, const SolveOptions& opt, int* iters) {
    const Grid& grid = K.grid();
    const int n = grid.n();
    const CVec& za = K.zeta_alpha();
    RVec A(n, 1.0);
    int total = 0;
    for (int outer = 0; outer < opt.max_iter; ++outer) {
        CVec d2(n), d2g(n);
        for (int j = 0; j < n; ++j) {
            d2[j] = -I1 + I1 * A[j] * za[j];
            d2g[j] = d2[j] * r.g[j];
        }
        CVec hd2g = K.hilbert(d2g);
        CVec rhs(n);
        for (int j = 0; j < n; ++j) rhs[j] = r.r1[j] + I1 * (d2[j] * r.hg[j] - hd2g[j]);
        RVec guess(n);
        for (int j = 0; j < n; ++j) guess[j] = A[j] - 1.0;
        auto sol = solve_real_hilbert(K, rhs, false, &guess, opt.tol, opt.max_iter);
        total += sol.iterations;
        double change = 0.0;
        for (int j = 0; j < n; ++j) {
            const double na = 1.0 + sol.h[j];
            change = std::max(change, std::abs(na - A[j]));
            A[j] = na;
        }
        if (change <= opt.tol) {
            if (iters) *iters = total;
            return A;
        }
    }
    throw NoConvergence("nested A iteration did not settle");
}

AuxFields aux_with_kernel(const CurveKernel& K, const CVec& u, const SolveOptions& opt,
                          const RVec* b0, const RVec* a0, long* sweeps) {
    AuxRhs r = aux_rhs(K, u);
    AuxFields f = solve_weighted(K, r, opt, b0, a0, sweeps);
    if (opt.a_method == AMethod::Nested) f.A = solve_A_nested(K, r, opt, &f.iters_A);
    return f;
}

TimeDerivative assemble(const Grid& g, const CurveKernel& K, const CVec& u, const CVec& ua,
                        const AuxFields& aux) {
    const int n = g.n();
    const CVec& za = K.zeta_alpha();
    TimeDerivative d;
    d.dzeta.resize(n);
    d.du.resize(n);
    for (int j = 0; j < n; ++j) {
        d.dzeta[j] = u[j] - aux.b[j] * za[j];
        d.du[j] = -I1 + I1 * aux.A[j] * za[j] - aux.b[j] * ua[j];
    }
    d.dzeta = dealias(g, d.dzeta);
    d.du = dealias(g, d.du);
    return d;
}

}  // namespace

WaterState WaterState::rest(const Grid& g) {
    WaterState s{g, 0.0, CVec(g.n(), 0.0), CVec(g.n(), 0.0), nullptr};
    return s;
}

CVec WaterState::zeta() const {
    CVec z(offset.size());
    for (int j = 0; j < grid.n(); ++j) z[j] = grid.alpha(j) + offset[j];
    return z;
}

AuxFields compute_aux(const WaterState& s, const SolveOptions& opt) {
    CurveKernel K(s.grid, s.offset);
    return aux_with_kernel(K, s.u, opt, nullptr, nullptr, nullptr);
}

RVec compute_b(const WaterState& s, const SolveOptions& opt) { return compute_aux(s, opt).b; }
RVec compute_A(const WaterState& s, const SolveOptions& opt) { return compute_aux(s, opt).A; }

double a_equation_imag_residual(const WaterState& s, const AuxFields& aux) {
    // (I - H)(A - 1) - i[u, H](conj(u)_a/za) - i[D_t^2 zeta, H] g, with D_t^2 zeta = -i + i A za.
    CurveKernel K(s.grid, s.offset);
    const int n = s.grid.n();
    AuxRhs r = aux_rhs(K, s.u);
    const CVec& za = K.zeta_alpha();
    CVec a(n), d2(n), d2g(n);
    for (int j = 0; j < n; ++j) {
        a[j] = aux.A[j] - 1.0;
        d2[j] = -I1 + I1 * aux.A[j] * za[j];
        d2g[j] = d2[j] * r.g[j];
    }
    CVec ha, hd2g;
    K.hilbert_many({&a, &d2g}, {&ha, &hd2g});
    CVec res(n);
    for (int j = 0; j < n; ++j)
        res[j] = a[j] - ha[j] - r.r1[j] - I1 * (d2[j] * r.hg[j] - hd2g[j]);
    RVec im = imag_part(res);
    double acc = 0.0;
    for (double v : im) acc += v * v;
    return std::sqrt(acc * s.grid.h());
}

RVec compute_at_over_a(const WaterState& s, const SolveOptions& opt) {
    CurveKernel K(s.grid, s.offset);
    const int n = s.grid.n();
    AuxFields aux = aux_with_kernel(K, s.u, opt, nullptr, nullptr, nullptr);
    const CVec& za = K.zeta_alpha();
    CVec d2(n);
    for (int j = 0; j < n; ++j) d2[j] = -I1 + I1 * aux.A[j] * za[j];
    CVec ubar = conj_of(s.u), d2bar = conj_of(d2);
    CVec c1 = K.commutator(d2, ubar);
    CVec c2 = K.commutator(s.u, d2bar);
    CVec sq = K.square_kernel(s.u, ubar);
    CVec rhs(n);
    for (int j = 0; j < n; ++j) rhs[j] = I1 * (2.0 * c1[j] + 2.0 * c2[j] - sq[j]);
    auto sol = solve_real_hilbert(K, rhs, true, nullptr, opt.tol, opt.max_iter);
    RVec h(n);
    for (int j = 0; j < n; ++j) h[j] = sol.h[j] / aux.A[j];
    return h;
}

TimeDerivative time_derivative(const WaterState& s, const SolveOptions& opt) {
    CurveKernel K(s.grid, s.offset);
    AuxFields aux = aux_with_kernel(K, s.u, opt, nullptr, nullptr, nullptr);
    return assemble(s.grid, K, s.u, derivative(s.grid, s.u, 1), aux);
}

RhsEngine::RhsEngine(const Grid& g, SolveOptions opt) : grid_(g), opt_(opt) {}

TimeDerivative RhsEngine::operator()(const WaterState& s, AuxFields* aux_out) {
    if (!kernel_) {
        kernel_.emplace(grid_, s.offset);
    } else {
        kernel_->rebuild(s.offset);
    }
    const bool warm = !b_prev_.empty();
    AuxFields aux = aux_with_kernel(*kernel_, s.u, opt_, warm ? &b_prev_ : nullptr,
                                    warm ? &a_prev_ : nullptr, &sweeps_);
    ++evals_;
    b_prev_ = aux.b;
    a_prev_.resize(aux.A.size());
    for (size_t j = 0; j < aux.A.size(); ++j) a_prev_[j] = aux.A[j] - 1.0;
    TimeDerivative d = assemble(grid_, *kernel_, s.u, derivative(grid_, s.u, 1), aux);
    if (aux_out) *aux_out = std::move(aux);
    return d;
}

void RhsEngine::project(WaterState& s) {
    if (!kernel_) {
        kernel_.emplace(grid_, s.offset);
    } else {
        kernel_->rebuild(s.offset);
    }
    CVec f1 = conj_of(s.offset), f2 = conj_of(s.u), h1, h2;
    kernel_->hilbert_many({&f1, &f2}, {&h1, &h2});
    const cplx c1 = cauchy_constant(*kernel_, f1), c2 = cauchy_constant(*kernel_, f2);
    for (size_t j = 0; j < f1.size(); ++j) {
        s.offset[j] = std::conj(0.5 * (f1[j] + h1[j] + c1));
        s.u[j] = std::conj(0.5 * (f2[j] + h2[j] + c2));
    }
    s.aux.reset();
}

double max_stable_dt(const Grid& g) {
    const double kmax = g.n() / (3.0 * g.q());
    return 0.5 / std::sqrt(kmax);
}

namespace {

WaterState axpy_state(const WaterState& s, double dt, const TimeDerivative& d) {
    WaterState out{s.grid, s.t + dt, s.offset, s.u, nullptr};
    for (size_t j = 0; j < out.offset.size(); ++j) {
        out.offset[j] += dt * d.dzeta[j];
        out.u[j] += dt * d.du[j];
    }
    return out;
}

void check_finite(const WaterState& s, double limit) {
    for (size_t j = 0; j < s.offset.size(); ++j) {
        const double a = std::abs(s.offset[j]), b = std::abs(s.u[j]);
        if (!std::isfinite(a) || !std::isfinite(b) || a > limit || b > limit)
            throw BlowupDetected("field magnitude exceeded " + std::to_string(limit) + " at t=" +
                                 std::to_string(s.t));
    }
}

}  // namespace

WaterState step_rk4(const WaterState& s, double dt, RhsEngine& rhs, const StepOptions& opt) {
    try {
        TimeDerivative k1 = rhs(s);
        TimeDerivative k2 = rhs(axpy_state(s, 0.5 * dt, k1));
        TimeDerivative k3 = rhs(axpy_state(s, 0.5 * dt, k2));
        TimeDerivative k4 = rhs(axpy_state(s, dt, k3));
        WaterState out{s.grid, s.t + dt, s.offset, s.u, nullptr};
        const double w = dt / 6.0;
        for (size_t j = 0; j < out.offset.size(); ++j) {
            out.offset[j] += w * (k1.dzeta[j] + 2.0 * k2.dzeta[j] + 2.0 * k3.dzeta[j] + k4.dzeta[j]);
            out.u[j] += w * (k1.du[j] + 2.0 * k2.du[j] + 2.0 * k3.du[j] + k4.du[j]);
        }
        if (opt.dealias) {
            out.offset = dealias(s.grid, out.offset);
            out.u = dealias(s.grid, out.u);
        }
        if (opt.krasny > 0.0) {
            out.offset = krasny_filter(s.grid, out.offset, opt.krasny);
            out.u = krasny_filter(s.grid, out.u, opt.krasny);
        }
        check_finite(out, opt.norm_limit);
        return out;
    } catch (const ChordArcViolation& e) {
        throw BlowupDetected(std::string("chord-arc failure near t=") + std::to_string(s.t) + ": " +
                             e.what());
    }
}

WaterState step_rk4(const WaterState& s, double dt) {
    RhsEngine rhs(s.grid);
    return step_rk4(s, dt, rhs);
}

WaterState evolve(const WaterState& s, double t_end, double dt, const Observer& obs, long stride,
                  const StepOptions& opt, const SolveOptions& sopt) {
    RhsEngine rhs(s.grid, sopt);
    const long steps = std::lround((t_end - s.t) / dt);
    WaterState cur = s;
    if (obs) obs(cur, 0);
    const double t0 = s.t;
    for (long k = 1; k <= steps; ++k) {
        cur = step_rk4(cur, dt, rhs, opt);
        cur.t = t0 + k * dt;
        if (opt.project_every > 0 && k % opt.project_every == 0) {
            rhs.project(cur);
            if (opt.dealias) {
                cur.offset = dealias(cur.grid, cur.offset);
                cur.u = dealias(cur.grid, cur.u);
            }
        }
        if (obs && (k % stride == 0 || k == steps)) obs(cur, k);
    }
    return cur;
}

cplx cauchy_constant(const CurveKernel& K, const CVec& f) {
    const CVec& za = K.zeta_alpha();
    cplx s = 0.0;
    for (size_t j = 0; j < f.size(); ++j) s += f[j] * za[j];
    return s / static_cast<double>(f.size());
}

HoloResiduals holo_residuals(const WaterState& s, const CurveKernel& K) {
    const Grid& g = s.grid;
    const int n = g.n();
    CVec f1 = conj_of(s.offset), f2 = conj_of(s.u), h1, h2;
    K.hilbert_many({&f1, &f2}, {&h1, &h2});
    const cplx c1 = cauchy_constant(K, f1), c2 = cauchy_constant(K, f2);
    CVec r1(n), r2(n);
    for (int j = 0; j < n; ++j) {
        r1[j] = f1[j] - h1[j] - c1;
        r2[j] = f2[j] - h2[j] - c2;
    }
    return {l2_norm(g, r1), l2_norm(g, r2)};
}

HoloResiduals holo_residuals(const WaterState& s) {
    CurveKernel K(s.grid, s.offset);
    return holo_residuals(s, K);
}

CVec theta(const WaterState& s) {
    CurveKernel K(s.grid, s.offset);
    CVec h = K.hilbert(s.offset);
    CVec out(h.size());
    for (size_t j = 0; j < h.size(); ++j) out[j] = s.offset[j] - h[j];
    return out;
}

CVec theta_dt(const WaterState& s) {
    CurveKernel K(s.grid, s.offset);
    const int n = s.grid.n();
    CVec v(n), zz(n);
    for (int j = 0; j < n; ++j) {
        v[j] = s.u[j] - std::conj(s.u[j]);
        zz[j] = s.offset[j] - std::conj(s.offset[j]);
    }
    CVec hv = K.hilbert(v);
    CVec c = K.commutator(s.u, zz);
    CVec out(n);
    for (int j = 0; j < n; ++j) out[j] = v[j] - hv[j] - c[j];
    return out;
}

CubicForcing cubic_forcing(const WaterState& s) {
    const Grid& g = s.grid;
    const int n = g.n();
    const double q = g.q(), h = g.h();
    CurveKernel K(g, s.offset);
    const CVec& za = K.zeta_alpha();
    CVec x = derivative(g, s.u, 1);
    CVec ux(n);
    for (int j = 0; j < n; ++j) ux[j] = s.u[j] * x[j];
    // sum_b Im(C_ab) y_b = (S(y) - conj(S(conj y))) / 2i
    std::vector<CVec> in = {x, conj_of(x), ux, conj_of(ux)};
    std::vector<RVec> re(4, RVec(n)), im(4, RVec(n)), orr(4, RVec(n, 0.0)), oi(4, RVec(n, 0.0));
    std::vector<const double*> pr, pi;
    std::vector<double*> por, poi;
    for (int k = 0; k < 4; ++k) {
        re[k] = real_part(in[k]);
        im[k] = imag_part(in[k]);
        pr.push_back(re[k].data());
        pi.push_back(im[k].data());
        por.push_back(orr[k].data());
        poi.push_back(oi[k].data());
    }
    K.cot_sum_many(pr, pi, por, poi);
    CubicForcing out;
    out.G1.resize(n);
    for (int a = 0; a < n; ++a) {
        const cplx s1 = (cplx(orr[0][a], oi[0][a]) - std::conj(cplx(orr[1][a], oi[1][a]))) / (2.0 * I1);
        const cplx s2 = (cplx(orr[2][a], oi[2][a]) - std::conj(cplx(orr[3][a], oi[3][a]))) / (2.0 * I1);
        const cplx diag = 2.0 * q * x[a] * (1.0 / za[a]).imag() * x[a];
        out.G1[a] = -(2.0 * h / (q * kPi)) * (s.u[a] * s1 - s2 + diag);
    }
    CVec zz(n);
    for (int j = 0; j < n; ++j) zz[j] = s.offset[j] - std::conj(s.offset[j]);
    out.G2 = K.square_kernel(s.u, zz);
    return out;
}

double basic_energy(const Grid& g, const RVec& A, const CVec& Theta, const CVec& DtTheta) {
    CVec tb = derivative(g, conj_of(Theta), 1);
    double acc = 0.0;
    for (int j = 0; j < g.n(); ++j)
        acc += std::norm(DtTheta[j]) / A[j] + (I1 * Theta[j] * tb[j]).real();
    return acc * g.h();
}

double basic_energy_rate(const Grid& g, const RVec& A, const RVec& at_over_a, const CVec& DtTheta,
                         const CVec& G) {
    double acc = 0.0;
    for (int j = 0; j < g.n(); ++j)
        acc += 2.0 / A[j] * (DtTheta[j] * std::conj(G[j])).real() -
               at_over_a[j] / A[j] * std::norm(DtTheta[j]);
    return acc * g.h();
}

EnergyCheck energy_derivative_check(const WaterState& s, double dt) {
    StepOptions so;
    so.krasny = 0.0;
    RhsEngine fwd(s.grid), bwd(s.grid);
    WaterState sp = step_rk4(s, dt, fwd, so);
    WaterState sm = step_rk4(s, -dt, bwd, so);
    auto energy = [](const WaterState& st) {
        RVec A = compute_A(st);
        return basic_energy(st.grid, A, theta(st), theta_dt(st));
    };
    const double fd = (energy(sp) - energy(sm)) / (2.0 * dt);
    RVec A = compute_A(s);
    RVec ata = compute_at_over_a(s);
    CubicForcing G = cubic_forcing(s);
    CVec Gs(G.G1.size());
    for (size_t j = 0; j < Gs.size(); ++j) Gs[j] = G.G1[j] + G.G2[j];
    const double formula = basic_energy_rate(s.grid, A, ata, theta_dt(s), Gs);
    const double scale = std::max(std::abs(fd), std::abs(formula));
    return {fd, formula, scale > 0.0 ? std::abs(fd - formula) / scale : 0.0};
}

}  // namespace wwsim
