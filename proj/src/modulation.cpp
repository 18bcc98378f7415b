#include "wwsim/modulation.hpp"

#include <cmath>

namespace wwsim {

namespace {

const cplx I1(0.0, 1.0);

CVec add(const CVec& a, const CVec& b, double sb = 1.0) {
    CVec o(a.size());
    for (size_t j = 0; j < a.size(); ++j) o[j] = a[j] + sb * b[j];
    return o;
}

CVec mul(const CVec& a, const CVec& b) {
    CVec o(a.size());
    for (size_t j = 0; j < a.size(); ++j) o[j] = a[j] * b[j];
    return o;
}

CVec conj_of(const CVec& a) {
    CVec o(a.size());
    for (size_t j = 0; j < a.size(); ++j) o[j] = std::conj(a[j]);
    return o;
}

CVec scale(const CVec& a, cplx c) {
    CVec o(a.size());
    for (size_t j = 0; j < a.size(); ++j) o[j] = c * a[j];
    return o;
}

// (i/2)(I + H0) f + (i/2) M(f)
CVec z2_map(const Grid& g, const CVec& f) {
    CVec h = flat_hilbert(g, f);
    const cplx m = mean(g, f);
    CVec o(f.size());
    for (size_t j = 0; j < f.size(); ++j) o[j] = 0.5 * I1 * (f[j] + h[j] + m);
    return o;
}

// (1/2)(I + H0) f
CVec half_proj(const Grid& g, const CVec& f) {
    CVec h = flat_hilbert(g, f);
    CVec o(f.size());
    for (size_t j = 0; j < f.size(); ++j) o[j] = 0.5 * (f[j] + h[j]);
    return o;
}

// i(V_XX/8 + |B|^2 V + B^2 conj(V)/2 - V/2), X derivatives via d/dalpha / eps.
CVec nls_linearized(const Grid& g, double eps, const CVec& B, const CVec& V) {
    CVec vxx = derivative(g, V, 2);
    const double s = 1.0 / (eps * eps);
    CVec o(V.size());
    for (size_t j = 0; j < V.size(); ++j)
        o[j] = I1 * (vxx[j] * s / 8.0 + std::norm(B[j]) * V[j] + 0.5 * B[j] * B[j] * std::conj(V[j]) -
                     0.5 * V[j]);
    return o;
}

CVec nls_rhs(const Grid& g, double eps, const CVec& B) {
    CVec bxx = derivative(g, B, 2);
    const double s = 1.0 / (eps * eps);
    CVec o(B.size());
    for (size_t j = 0; j < B.size(); ++j)
        o[j] = I1 * (bxx[j] * s / 8.0 + 0.5 * std::norm(B[j]) * B[j] - 0.5 * B[j]);
    return o;
}

Jet jet_product(const Jet& a, const Jet& b) {
    Jet o;
    o.v = mul(a.v, b.v);
    o.vt = add(mul(a.vt, b.v), mul(a.v, b.vt));
    o.vtt = add(add(mul(a.vtt, b.v), scale(mul(a.vt, b.vt), 2.0)), mul(a.v, b.vtt));
    return o;
}

Jet jet_conj(const Jet& a) { return {conj_of(a.v), conj_of(a.vt), conj_of(a.vtt)}; }

template <class F>
Jet jet_linear(const Jet& a, F&& f) {
    return {f(a.v), f(a.vt), f(a.vtt)};
}

Jet jet_combine(const std::vector<std::pair<cplx, const Jet*>>& terms) {
    Jet o{CVec(terms[0].second->v.size(), 0.0), CVec(terms[0].second->v.size(), 0.0),
          CVec(terms[0].second->v.size(), 0.0)};
    for (const auto& [c, j] : terms)
        for (size_t k = 0; k < o.v.size(); ++k) {
            o.v[k] += c * j->v[k];
            o.vt[k] += c * j->vt[k];
            o.vtt[k] += c * j->vtt[k];
        }
    return o;
}

EnvelopeFields fields_from_jet(const Grid& g, double eps, double omega, double t, const Jet& B) {
    const int n = g.n();
    Jet ph, phm;
    ph.v.resize(n);
    phm.v.resize(n);
    for (int j = 0; j < n; ++j) {
        ph.v[j] = std::exp(I1 * (g.alpha(j) + omega * t));
        phm.v[j] = std::conj(ph.v[j]);
    }
    ph.vt = scale(ph.v, I1 * omega);
    ph.vtt = scale(ph.v, -omega * omega);
    phm.vt = scale(phm.v, -I1 * omega);
    phm.vtt = scale(phm.v, -omega * omega);

    const Jet Bc = jet_conj(B);
    auto dX = [&](const CVec& f) { return scale(derivative(g, f, 1), 1.0 / eps); };
    const Jet BX = jet_linear(B, dX);

    EnvelopeFields out;
    out.z1 = jet_product(B, ph);
    const Jet mod2 = jet_product(Bc, B);
    out.z2 = jet_linear(mod2, [&](const CVec& f) { return z2_map(g, f); });
    const Jet cubic = jet_product(jet_product(Bc, mod2), phm);
    const Jet q = jet_linear(jet_product(Bc, BX), [&](const CVec& f) { return half_proj(g, f); });
    out.z3 = jet_combine({{-0.5, &cubic}, {1.0, &q}});
    return out;
}

Jet envelope_jet(const Grid& g, const CVec& B, const CVec& BX, double eps, double omega) {
    const double c1 = eps / (2.0 * omega), e2 = eps * eps;
    Jet j;
    j.v = B;
    CVec n0 = nls_rhs(g, eps, B);
    j.vt.resize(B.size());
    for (size_t k = 0; k < B.size(); ++k) j.vt[k] = c1 * BX[k] + e2 * n0[k];
    CVec btx = scale(derivative(g, j.vt, 1), 1.0 / eps);
    CVec dn = nls_linearized(g, eps, B, j.vt);
    j.vtt.resize(B.size());
    for (size_t k = 0; k < B.size(); ++k) j.vtt[k] = c1 * btx[k] + e2 * dn[k];
    return j;
}

NlsState advance_to(const NlsState& B, double T) {
    if (std::abs(B.T - T) <= 1e-12) return B;
    const double span = T - B.T;
    const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / 1e-3)));
    NlsState out = B;
    out.B = nls_evolve(B.grid, B.B, CubicNls::envelope(), span / steps, span);
    out.T = T;
    return out;
}

}  // namespace

CVec embed_slow(const NlsState& B, const Grid& fast, double eps, double shift) {
    const Grid& slow = B.grid;
    const double q = fast.q();
    if (std::abs(q - std::round(q)) > 1e-9 || std::abs(q * eps - slow.q()) > 1e-9 * slow.q())
        throw IncompatiblePeriod("fast period factor must equal q1/eps and be an integer");
    const int ns = slow.n(), nf = fast.n();
    if (nf < ns) throw IncompatiblePeriod("fast grid must have at least as many nodes as the slow grid");
    CVec cs = to_spectrum(Field(slow, B.B));
    // Slow mode k on q1 T is e^{ik X/q1} = e^{ik (alpha + shift)/q}: fast frequency k.
    CVec cf(nf, 0.0);
    const double ratio = fast.length() / slow.length();
    for (int i = 0; i < ns; ++i) {
        const int k = slow.freq(i);
        if (2 * std::abs(k) == ns) continue;
        cf[(k + nf) % nf] = cs[i] * ratio * std::exp(I1 * (k * shift / q));
    }
    return to_samples(fast, cf).samples;
}

EnvelopeFields envelope_fields(const NlsState& B, double eps, double omega, double t,
                               const Grid& fast) {
    const NlsState Bt = advance_to(B, eps * eps * t);
    const CVec Bf = embed_slow(Bt, fast, eps, t / (2.0 * omega));
    const CVec BX = scale(derivative(fast, Bf, 1), 1.0 / eps);
    return fields_from_jet(fast, eps, omega, t, envelope_jet(fast, Bf, BX, eps, omega));
}

CVec tilde_velocity(const Grid& g, const Jet& z, const Jet& b) {
    CVec za = derivative(g, z.v, 1);
    CVec o(z.v.size());
    for (size_t j = 0; j < o.size(); ++j) o[j] = z.vt[j] + b.v[j] * (1.0 + za[j]);
    return o;
}

CVec tilde_acceleration(const Grid& g, const Jet& z, const Jet& b) {
    CVec za = derivative(g, z.v, 1), zaa = derivative(g, z.v, 2), zta = derivative(g, z.vt, 1);
    CVec ba = derivative(g, b.v, 1);
    CVec o(z.v.size());
    for (size_t j = 0; j < o.size(); ++j) {
        const cplx zeta_a = 1.0 + za[j];
        o[j] = z.vtt[j] + b.vt[j] * zeta_a + 2.0 * b.v[j] * zta[j] + b.v[j] * ba[j] * zeta_a +
               b.v[j] * b.v[j] * zaa[j];
    }
    return o;
}

EnvelopeBundle make_bundle(const NlsState& B, const StokesWave& w, double t, const Grid& fast) {
    const double eps = w.eps, omega = w.omega;
    const int n = fast.n();
    EnvelopeBundle bd{eps, omega, t, fast, envelope_fields(B, eps, omega, t, fast), {}, {}, {},
                      stokes_state(w, t, fast), {}, {}, {}, {}};
    const double e2 = eps * eps, e3 = e2 * eps;
    bd.tilde = jet_combine({{eps, &bd.f.z1}, {e2, &bd.f.z2}, {e3, &bd.f.z3}});

    Jet unit{CVec(n, I1), CVec(n, 0.0), CVec(n, 0.0)};
    EnvelopeFields fst = fields_from_jet(fast, eps, omega, t, unit);
    bd.tilde_st = jet_combine({{eps, &fst.z1}, {e2, &fst.z2}, {e3, &fst.z3}});

    const Jet mod2 = jet_product(jet_conj(bd.f.z1), bd.f.z1);  // |B|^2 since |e^{i phi}| = 1
    bd.b_tilde = jet_combine({{-e2 * omega, &mod2}});
    Jet b_st{CVec(n, -e2 * omega), CVec(n, 0.0), CVec(n, 0.0)};

    bd.stokes_A = compute_A(bd.stokes);
    const CVec za_st = derivative(fast, bd.stokes.offset, 1);
    const CVec v_t = tilde_velocity(fast, bd.tilde, bd.b_tilde);
    const CVec v_s = tilde_velocity(fast, bd.tilde_st, b_st);
    const CVec a_t = tilde_acceleration(fast, bd.tilde, bd.b_tilde);
    const CVec a_s = tilde_acceleration(fast, bd.tilde_st, b_st);
    bd.app_offset.resize(n);
    bd.app_velocity.resize(n);
    bd.app_accel.resize(n);
    for (int j = 0; j < n; ++j) {
        bd.app_offset[j] = bd.stokes.offset[j] + (bd.tilde.v[j] - bd.tilde_st.v[j]);
        bd.app_velocity[j] = bd.stokes.u[j] + (v_t[j] - v_s[j]);
        const cplx acc_st = -I1 + I1 * bd.stokes_A[j] * (1.0 + za_st[j]);
        bd.app_accel[j] = acc_st + (a_t[j] - a_s[j]);
    }
    return bd;
}

constexpr double kRemainderFloor = 1e-11;

Remainder remainder(const WaterState& s, const EnvelopeBundle& bd, double sob) {
    const Grid& g = s.grid;
    const int n = g.n();
    const RVec A = compute_A(s);
    const CVec za = derivative(g, s.offset, 1);
    Remainder r;
    r.r.resize(n);
    r.dt_r.resize(n);
    r.dt2_r.resize(n);
    for (int j = 0; j < n; ++j) {
        r.r[j] = s.offset[j] - bd.app_offset[j];
        r.dt_r[j] = s.u[j] - bd.app_velocity[j];
        r.dt2_r[j] = (-I1 + I1 * A[j] * (1.0 + za[j])) - bd.app_accel[j];
    }
    // Second spectral derivatives leave round-off near 1e-16 (k/q)^2 in the empty high modes, and the
    // weights lift it above the physical content on fine grids. Modes below kRemainderFloor are dropped.
    const double e = sobolev_norm(g, r.dt_r, sob + 0.5, kRemainderFloor) +
                     sobolev_norm(g, derivative(g, r.r, 1), sob, kRemainderFloor) +
                     sobolev_norm(g, r.dt2_r, sob, kRemainderFloor);
    r.Es = e * e;
    return r;
}

CVec cubic_remainder_rho(const WaterState& s, const EnvelopeBundle& bd) {
    const Grid& g = s.grid;
    auto theta_of = [&](const CVec& offset) {
        WaterState tmp = WaterState::rest(g);
        tmp.offset = offset;
        return theta(tmp);
    };
    const CVec th = theta(s), th_st = theta(bd.stokes), tt = theta_of(bd.tilde.v),
               tt_st = theta_of(bd.tilde_st.v);
    CVec d(th.size());
    for (size_t j = 0; j < d.size(); ++j) d[j] = th[j] - th_st[j] - (tt[j] - tt_st[j]);
    CurveKernel K(g, s.offset);
    CVec h = K.hilbert(d);
    for (size_t j = 0; j < d.size(); ++j) d[j] -= h[j];
    return d;
}

double packet_holo_check(const Grid& slow, const CVec& f, int lambda, double eps, double s) {
    if (lambda == 0) throw std::invalid_argument("lambda must be nonzero");
    const double q = slow.q() / eps;
    CVec c = to_spectrum(Field(slow, f));
    const double L = 2.0 * kPi * q, ratio = L / slow.length();
    const double sg = lambda > 0 ? 1.0 : -1.0;
    double acc = 0.0;
    for (int i = 0; i < slow.n(); ++i) {
        const int k = slow.freq(i);
        const double m = k + lambda * q;  // fast frequency index
        const double sm = m > 0 ? 1.0 : (m < 0 ? -1.0 : 0.0);
        const double symbol = 1.0 - sg * sm;  // I + sgn(lambda) H0 with H0 symbol -sgn
        const double w = std::pow(1.0 + std::abs(m / q), 2.0 * s);
        acc += w * std::norm(symbol * c[i] * ratio);
    }
    return std::sqrt(acc / L);
}

}  // namespace wwsim
