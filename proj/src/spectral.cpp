#include "wwsim/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "kernel_sum.hpp"

namespace wwsim {

namespace detail {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlans {
    int n;
    fftw_plan fwd;
    fftw_plan bwd;
    CVec cot_symbol;

    explicit FftPlans(int n_) : n(n_) {
        fftw_complex* a = fftw_alloc_complex(n);
        fftw_complex* b = fftw_alloc_complex(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
        bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
        fftw_free(a);
        fftw_free(b);
        // Node spacing over 2q is pi/n for every q, so the symbol depends on n only.
        CVec c(n, 0.0);
        for (int m = 1; m < n; ++m) c[m] = 1.0 / std::tan(kPi * m / n);
        cot_symbol.resize(n);
        fftw_execute_dft(fwd, reinterpret_cast<fftw_complex*>(c.data()),
                         reinterpret_cast<fftw_complex*>(cot_symbol.data()));
    }
    ~FftPlans() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
};

namespace {
std::shared_ptr<FftPlans> plans_for(int n) {
    static std::map<int, std::weak_ptr<FftPlans>> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto& slot = cache[n];
    if (auto p = slot.lock()) return p;
    auto p = std::make_shared<FftPlans>(n);
    slot = p;
    return p;
}
}  // namespace

}  // namespace detail

Grid::Grid(double q, int n) : q_(q), n_(n) {
    if (!(q > 0.0)) throw std::invalid_argument("grid period factor must be positive");
    if (n < 8 || (n % 2) != 0) throw std::invalid_argument("grid needs an even n >= 8");
    plans_ = detail::plans_for(n);
}

RVec Grid::nodes() const {
    RVec x(n_);
    for (int j = 0; j < n_; ++j) x[j] = alpha(j);
    return x;
}

void Grid::dft(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void Grid::idft(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->bwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

const CVec& Grid::flat_cot_symbol() const { return plans_->cot_symbol; }

Field::Field(Grid g, CVec s) : grid(std::move(g)), samples(std::move(s)) {
    if (static_cast<int>(samples.size()) != grid.n())
        throw std::invalid_argument("field size does not match grid");
}

Field Field::zeros(const Grid& g) { return Field(g, CVec(g.n(), 0.0)); }
Field Field::constant(const Grid& g, cplx c) { return Field(g, CVec(g.n(), c)); }

CVec to_spectrum(const Field& f) {
    const Grid& g = f.grid;
    CVec c(g.n());
    g.dft(f.samples.data(), c.data());
    const double h = g.h();
    for (int i = 0; i < g.n(); ++i) c[i] *= (g.freq(i) % 2 == 0 ? h : -h);
    return c;
}

Field to_samples(const Grid& g, const CVec& coeffs) {
    CVec c(coeffs);
    const double s = 1.0 / g.length();
    for (int i = 0; i < g.n(); ++i) c[i] *= (g.freq(i) % 2 == 0 ? s : -s);
    CVec out(g.n());
    g.idft(c.data(), out.data());
    return Field(g, std::move(out));
}

namespace {

template <class M>
CVec apply_multiplier(const Grid& g, const CVec& f, M&& mult) {
    const int n = g.n();
    CVec c(n);
    g.dft(f.data(), c.data());
    for (int i = 0; i < n; ++i) c[i] *= mult(i);
    CVec out(n);
    g.idft(c.data(), out.data());
    const double s = 1.0 / n;
    for (auto& v : out) v *= s;
    return out;
}

double hilbert_symbol(const Grid& g, int i) {
    const int k = g.freq(i);
    return k > 0 ? -1.0 : (k < 0 ? 1.0 : 0.0);
}

}  // namespace

CVec derivative(const Grid& g, const CVec& f, int order) {
    const int n = g.n();
    return apply_multiplier(g, f, [&](int i) -> cplx {
        if (g.freq(i) == -n / 2) return 0.0;
        return std::pow(cplx(0.0, g.wavenumber(i)), order);
    });
}

CVec flat_hilbert(const Grid& g, const CVec& f) {
    return apply_multiplier(g, f, [&](int i) -> cplx { return hilbert_symbol(g, i); });
}

Field flat_hilbert(const Field& f) { return Field(f.grid, flat_hilbert(f.grid, f.samples)); }

CVec dealias(const Grid& g, const CVec& f) {
    const int kmax = g.n() / 3;
    return apply_multiplier(g, f, [&](int i) -> cplx { return std::abs(g.freq(i)) <= kmax ? 1.0 : 0.0; });
}

CVec krasny_filter(const Grid& g, const CVec& f, double rel) {
    const int n = g.n();
    CVec c(n);
    g.dft(f.data(), c.data());
    double mx = 0.0;
    for (const auto& v : c) mx = std::max(mx, std::abs(v));
    const double cut = rel * mx;
    for (auto& v : c)
        if (std::abs(v) < cut) v = 0.0;
    CVec out(n);
    g.idft(c.data(), out.data());
    for (auto& v : out) v /= n;
    return out;
}

cplx evaluate(const Grid& g, const CVec& f, double x) {
    const int n = g.n();
    CVec c(n);
    g.dft(f.data(), c.data());
    const double t = (x - g.alpha(0)) / g.q();
    cplx sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = g.freq(i);
        if (k == -n / 2) {
            sum += c[i] * std::cos(k * t);
        } else {
            sum += c[i] * std::polar(1.0, k * t);
        }
    }
    return sum / static_cast<double>(n);
}

cplx mean(const Grid& g, const CVec& f) {
    cplx s = 0.0;
    for (const auto& v : f) s += v;
    return s / static_cast<double>(g.n());
}

cplx mean(const Field& f) { return mean(f.grid, f.samples); }

double sobolev_norm(const Grid& g, const CVec& f, double s, double noise_floor) {
    const int n = g.n();
    CVec c(n);
    g.dft(f.data(), c.data());
    const double h = g.h();
    const double cut = noise_floor * n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(c[i]) < cut) continue;
        const double w = std::pow(1.0 + std::abs(g.wavenumber(i)), 2.0 * s);
        acc += w * std::norm(c[i] * h);
    }
    return std::sqrt(acc / g.length());
}

double sobolev_norm(const Field& f, double s) { return sobolev_norm(f.grid, f.samples, s); }

double l2_norm(const Grid& g, const CVec& f) {
    double acc = 0.0;
    for (const auto& v : f) acc += std::norm(v);
    return std::sqrt(acc * g.h());
}

double max_abs(const CVec& f) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const RVec& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

cplx inner(const Grid& g, const CVec& f, const CVec& h) {
    cplx s = 0.0;
    for (size_t j = 0; j < f.size(); ++j) s += f[j] * std::conj(h[j]);
    return s / static_cast<double>(g.n());
}

CVec to_complex(const RVec& r) { return CVec(r.begin(), r.end()); }

RVec real_part(const CVec& c) {
    RVec r(c.size());
    for (size_t j = 0; j < c.size(); ++j) r[j] = c[j].real();
    return r;
}

RVec imag_part(const CVec& c) {
    RVec r(c.size());
    for (size_t j = 0; j < c.size(); ++j) r[j] = c[j].imag();
    return r;
}

// ---------------------------------------------------------------------------

CurveKernel::CurveKernel(const Grid& g, const CVec& offset) : grid_(g) { rebuild(offset); }

void CurveKernel::rebuild(const CVec& offset) {
    const Grid& g = grid_;
    const int n = g.n();
    const double q = g.q();
    CVec d1 = derivative(g, offset, 1);
    zaa_ = derivative(g, offset, 2);
    za_.resize(n);
    diag_.resize(n);
    double min_abs_za = 1e300;
    for (int j = 0; j < n; ++j) {
        za_[j] = 1.0 + d1[j];
        diag_[j] = -q * zaa_[j] / za_[j];
        min_abs_za = std::min(min_abs_za, std::abs(za_[j]));
    }

    RVec er(n), ei(n), emod(n);
    for (int j = 0; j < n; ++j) {
        const cplx e = std::exp(cplx(0.0, 1.0) * (g.alpha(j) + offset[j]) / q);
        er[j] = e.real();
        ei[j] = e.imag();
        emod[j] = std::abs(e);
    }
    // 1/(4 sin^2(pi m/n)) for the flat chord.
    RVec inv_flat(n, 0.0);
    for (int m = 1; m < n; ++m) {
        const double s = std::sin(kPi * m / n);
        inv_flat[m] = 1.0 / (4.0 * s * s);
    }

    if (row_.size() != static_cast<size_t>(n + 1)) {
        row_.resize(n + 1);
        size_t off = 0;
        for (int a = 0; a < n; ++a) {
            row_[a] = off;
            off += static_cast<size_t>(n - a - 1);
        }
        row_[n] = off;
        cre_.resize(off);
        cim_.resize(off);
    }
    const double min_ratio2 = kernel::build_cot_rows(n, er.data(), ei.data(), emod.data(),
                                                     inv_flat.data(), row_.data(), cre_.data(),
                                                     cim_.data());
    chord_arc_ = std::min(std::sqrt(min_ratio2), min_abs_za);
    if (!(chord_arc_ >= kChordArcMin))
        throw ChordArcViolation("chord-arc ratio " + std::to_string(chord_arc_) + " below " +
                                std::to_string(kChordArcMin));
}

void CurveKernel::cot_sum_many(const std::vector<const double*>& re,
                               const std::vector<const double*>& im,
                               const std::vector<double*>& ore,
                               const std::vector<double*>& oim) const {
    kernel::antisymmetric_sum(grid_.n(), static_cast<int>(re.size()), row_.data(), cre_.data(),
                              cim_.data(), re.data(), im.data(), ore.data(), oim.data());
}

void CurveKernel::hilbert_many(const std::vector<const CVec*>& in,
                               const std::vector<CVec*>& out) const {
    const int n = grid_.n();
    const int m = static_cast<int>(in.size());
    const double q = grid_.q();
    const double h = grid_.h();
    std::vector<RVec> vr(m, RVec(n)), vi(m, RVec(n)), sr(m, RVec(n, 0.0)), si(m, RVec(n, 0.0));
    std::vector<const double*> pr(m), pi(m);
    std::vector<double*> po_r(m), po_i(m);
    for (int j = 0; j < m; ++j) {
        const CVec& f = *in[j];
        for (int a = 0; a < n; ++a) {
            const cplx v = za_[a] * f[a];
            vr[j][a] = v.real();
            vi[j][a] = v.imag();
        }
        pr[j] = vr[j].data();
        pi[j] = vi[j].data();
        po_r[j] = sr[j].data();
        po_i[j] = si[j].data();
    }
    cot_sum_many(pr, pi, po_r, po_i);

    const CVec& sym = grid_.flat_cot_symbol();
    const cplx pref = h / (2.0 * q * kPi * cplx(0.0, 1.0));
    for (int j = 0; j < m; ++j) {
        const CVec& f = *in[j];
        CVec c(n);
        grid_.dft(f.data(), c.data());
        for (int i = 0; i < n; ++i) c[i] *= hilbert_symbol(grid_, i) - pref * sym[i];
        CVec& o = *out[j];
        o.resize(n);
        grid_.idft(c.data(), o.data());
        for (int a = 0; a < n; ++a)
            o[a] = o[a] / static_cast<double>(n) +
                   pref * (cplx(sr[j][a], si[j][a]) + diag_[a] * f[a]);
    }
}

CVec CurveKernel::hilbert(const CVec& f) const {
    CVec out;
    hilbert_many({&f}, {&out});
    return out;
}

void CurveKernel::double_layer_pair(const RVec* hv, RVec* kh, const RVec* kv, RVec* ksk) const {
    const int n = grid_.n();
    const double h = grid_.h();
    const double q = grid_.q();
    const double pref = h / (2.0 * q * kPi);
    std::vector<RVec> store;
    std::vector<const double*> pr, pi;
    std::vector<double*> po_r, po_i;
    store.reserve(6);
    if (hv) {
        RVec a(n), b(n);
        for (int j = 0; j < n; ++j) {
            a[j] = za_[j].real() * (*hv)[j];
            b[j] = za_[j].imag() * (*hv)[j];
        }
        store.push_back(std::move(a));
        store.push_back(std::move(b));
    }
    if (kv) {
        RVec a(n), b(n, 0.0);
        for (int j = 0; j < n; ++j) a[j] = std::abs(za_[j]) * (*kv)[j];
        store.push_back(std::move(a));
        store.push_back(std::move(b));
    }
    const int m = static_cast<int>(store.size()) / 2;
    std::vector<RVec> outs(2 * m, RVec(n, 0.0));
    for (int j = 0; j < m; ++j) {
        pr.push_back(store[2 * j].data());
        pi.push_back(store[2 * j + 1].data());
        po_r.push_back(outs[2 * j].data());
        po_i.push_back(outs[2 * j + 1].data());
    }
    if (m > 0) cot_sum_many(pr, pi, po_r, po_i);
    int slot = 0;
    if (hv) {
        kh->resize(n);
        for (int a = 0; a < n; ++a) {
            const cplx w = zaa_[a] / za_[a];
            (*kh)[a] = pref * outs[2 * slot + 1][a] - h * w.imag() / (2.0 * kPi) * (*hv)[a];
        }
        ++slot;
    }
    if (kv) {
        ksk->resize(n);
        for (int a = 0; a < n; ++a) {
            const cplx w = zaa_[a] / za_[a];
            const cplx u = za_[a] / std::abs(za_[a]);
            const cplx s(outs[2 * slot][a], outs[2 * slot + 1][a]);
            (*ksk)[a] = -pref * (u * s).imag() - h * w.imag() / (2.0 * kPi) * (*kv)[a];
        }
    }
}

CVec CurveKernel::double_layer(const CVec& f) const {
    RVec re = real_part(f), im = imag_part(f), kr, ki;
    double_layer_pair(&re, &kr, nullptr, nullptr);
    double_layer_pair(&im, &ki, nullptr, nullptr);
    CVec out(f.size());
    for (size_t j = 0; j < f.size(); ++j) out[j] = cplx(kr[j], ki[j]);
    return out;
}

CVec CurveKernel::adjoint_double_layer(const CVec& f) const {
    RVec re = real_part(f), im = imag_part(f), kr, ki;
    double_layer_pair(nullptr, nullptr, &re, &kr);
    double_layer_pair(nullptr, nullptr, &im, &ki);
    CVec out(f.size());
    for (size_t j = 0; j < f.size(); ++j) out[j] = cplx(kr[j], ki[j]);
    return out;
}

CVec CurveKernel::commutator(const CVec& g, const CVec& f) const {
    const int n = grid_.n();
    CVec fa = derivative(grid_, f, 1);
    CVec v(n), gv(n);
    for (int j = 0; j < n; ++j) {
        v[j] = fa[j] / za_[j];
        gv[j] = g[j] * v[j];
    }
    CVec hv, hgv;
    hilbert_many({&v, &gv}, {&hv, &hgv});
    CVec out(n);
    for (int j = 0; j < n; ++j) out[j] = g[j] * hv[j] - hgv[j];
    return out;
}

CVec CurveKernel::square_kernel(const CVec& u, const CVec& f) const {
    const int n = grid_.n();
    const double q = grid_.q();
    const double h = grid_.h();
    CVec fb = derivative(grid_, f, 1);
    CVec ua = derivative(grid_, u, 1);
    CVec acc(n, 0.0);
    for (int a = 0; a < n; ++a) {
        const cplx d = 2.0 * q * ua[a] / za_[a];
        acc[a] += d * d * fb[a];
        const size_t base = row_[a];
        for (int b = a + 1; b < n; ++b) {
            const cplx c(cre_[base + b - a - 1], cim_[base + b - a - 1]);
            const cplx du = u[a] - u[b];
            const cplx k = du * du * (1.0 + c * c);
            acc[a] += k * fb[b];
            acc[b] += k * fb[a];
        }
    }
    const cplx pref = h / (4.0 * kPi * q * q * cplx(0.0, 1.0));
    for (auto& v : acc) v *= pref;
    return acc;
}

// ---------------------------------------------------------------------------

RealSolveResult solve_real_hilbert(const CurveKernel& K, const CVec& g, bool weighted,
                                   const RVec* guess, double tol, int max_iter) {
    const Grid& grid = K.grid();
    const int n = grid.n();
    const CVec& za = K.zeta_alpha();
    RVec rhs(n), mod(n, 1.0);
    for (int j = 0; j < n; ++j) {
        if (weighted) {
            mod[j] = std::abs(za[j]);
            rhs[j] = (za[j] * g[j]).real() / mod[j];
        } else {
            rhs[j] = g[j].real();
        }
    }
    RVec x(n);
    if (guess) {
        for (int j = 0; j < n; ++j) x[j] = (*guess)[j] * mod[j];
    } else {
        x = rhs;
    }
    RVec kx;
    double change = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        if (weighted) {
            K.double_layer_pair(nullptr, nullptr, &x, &kx);
        } else {
            K.double_layer_pair(&x, &kx, nullptr, nullptr);
        }
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double nx = weighted ? rhs[j] - kx[j] : rhs[j] + kx[j];
            acc += (nx - x[j]) * (nx - x[j]);
            x[j] = nx;
        }
        change = std::sqrt(acc * grid.h());
        if (change <= tol) {
            for (int j = 0; j < n; ++j) x[j] /= mod[j];
            return {std::move(x), it, change};
        }
    }
    throw NoConvergence("real Hilbert solve: no convergence in " + std::to_string(max_iter) +
                        " iterations (last change " + std::to_string(change) + ")");
}

ExpansionTerms expansion_terms(const Grid& g, const CVec& z1, const CVec& z2, const CVec& f) {
    const int n = g.n();
    auto comm = [&](const CVec& a, const CVec& x) {
        CVec ax(n);
        for (int j = 0; j < n; ++j) ax[j] = a[j] * x[j];
        CVec hx = flat_hilbert(g, x), hax = flat_hilbert(g, ax);
        CVec out(n);
        for (int j = 0; j < n; ++j) out[j] = a[j] * hx[j] - hax[j];
        return out;
    };
    CVec fa = derivative(g, f, 1), faa = derivative(g, f, 2), z1a = derivative(g, z1, 1);
    ExpansionTerms t;
    t.h1 = comm(z1, fa);
    CVec z1a_fa(n);
    for (int j = 0; j < n; ++j) z1a_fa[j] = z1a[j] * fa[j];
    CVec inner_c = comm(z1, faa);
    CVec z1_inner(n);
    for (int j = 0; j < n; ++j) z1_inner[j] = z1[j] * faa[j];
    CVec c2 = comm(z1, z1_inner);
    CVec a = comm(z2, fa), b = comm(z1, z1a_fa);
    t.h2.resize(n);
    for (int j = 0; j < n; ++j) {
        const cplx double_comm = z1[j] * inner_c[j] - c2[j];
        t.h2[j] = a[j] - b[j] + 0.5 * double_comm;
    }
    return t;
}

}  // namespace wwsim
