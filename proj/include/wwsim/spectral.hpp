#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wwsim {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct ChordArcViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IncompatiblePeriod : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
struct FftPlans;
}

// Uniform periodic grid on [-q*pi, q*pi) with n nodes. Copies share FFT plans.
class Grid {
public:
    Grid(double q, int n);

    double q() const { return q_; }
    int n() const { return n_; }
    double h() const { return 2.0 * kPi * q_ / n_; }
    double length() const { return 2.0 * kPi * q_; }
    double alpha(int j) const { return -kPi * q_ + h() * j; }
    RVec nodes() const;
    // Integer frequency stored at DFT slot i, in [-n/2, n/2).
    int freq(int i) const { return i < n_ / 2 ? i : i - n_; }
    double wavenumber(int i) const { return freq(i) / q_; }

    // Raw unnormalized DFTs (e^{-2 pi i jk/n} forward). In-place allowed.
    void dft(const cplx* in, cplx* out) const;
    void idft(const cplx* in, cplx* out) const;

    // Spectrum of the discrete sum over b != a of cot((alpha_a - alpha_b)/2q).
    const CVec& flat_cot_symbol() const;

    bool same_as(const Grid& o) const { return n_ == o.n_ && q_ == o.q_; }

private:
    double q_;
    int n_;
    std::shared_ptr<detail::FftPlans> plans_;
};

struct Field {
    Grid grid;
    CVec samples;

    Field(Grid g, CVec s);
    static Field zeros(const Grid& g);
    static Field constant(const Grid& g, cplx c);
    // Samples f(alpha_j) of a callable.
    template <class F>
    static Field sample(const Grid& g, F&& f) {
        CVec s(g.n());
        for (int j = 0; j < g.n(); ++j) s[j] = f(g.alpha(j));
        return Field(g, std::move(s));
    }
    int n() const { return grid.n(); }
    const cplx& operator[](int j) const { return samples[j]; }
};

// Coefficients f_k = int f e^{-ik x/q} dx (trapezoid), stored in DFT slot order.
CVec to_spectrum(const Field& f);
Field to_samples(const Grid& g, const CVec& coeffs);

// Fourier-multiplier helpers on raw sample vectors.
CVec derivative(const Grid& g, const CVec& f, int order = 1);
CVec flat_hilbert(const Grid& g, const CVec& f);
CVec dealias(const Grid& g, const CVec& f);
// Zero every coefficient below rel * max |coefficient|.
CVec krasny_filter(const Grid& g, const CVec& f, double rel = 1e-13);
// Trigonometric interpolation of samples at arbitrary points.
cplx evaluate(const Grid& g, const CVec& f, double x);

Field flat_hilbert(const Field& f);
cplx mean(const Field& f);
cplx mean(const Grid& g, const CVec& f);
double sobolev_norm(const Field& f, double s);
// Modes whose amplitude |DFT_k|/n is below noise_floor are skipped, which keeps
// high-order norms from being dominated by round-off.
double sobolev_norm(const Grid& g, const CVec& f, double s, double noise_floor = 0.0);
double l2_norm(const Grid& g, const CVec& f);
inline double l2_norm(const Field& f) { return l2_norm(f.grid, f.samples); }
double max_abs(const CVec& f);
double max_abs(const RVec& f);
// (1/2q pi) int f conj(g).
cplx inner(const Grid& g, const CVec& f, const CVec& h);

CVec to_complex(const RVec& r);
RVec real_part(const CVec& c);
RVec imag_part(const CVec& c);

// Precomputed singular-integral kernels for a curve zeta = alpha + offset.
//
// The Cauchy kernel zeta_b cot((zeta_a - zeta_b)/2q) is split as the flat cot
// kernel, applied exactly in Fourier space, plus a smooth remainder summed by
// the trapezoid rule. The remainder has diagonal limit -q zeta''/zeta'.
class CurveKernel {
public:
    static constexpr double kChordArcMin = 0.1;

    CurveKernel(const Grid& g, const CVec& offset);
    // Rebuilds for a new offset on the same grid, reusing storage.
    void rebuild(const CVec& offset);

    const Grid& grid() const { return grid_; }
    const CVec& zeta_alpha() const { return za_; }
    const CVec& zeta_alpha_alpha() const { return zaa_; }
    double chord_arc() const { return chord_arc_; }

    CVec hilbert(const CVec& f) const;
    // Applies H_zeta to m vectors at once; one sweep over the stored kernel.
    void hilbert_many(const std::vector<const CVec*>& in, const std::vector<CVec*>& out) const;
    // Real double-layer kernel and its adjoint (both smooth), any complex input.
    CVec double_layer(const CVec& f) const;
    CVec adjoint_double_layer(const CVec& f) const;
    // K h and K* k for real inputs, fused into one sweep.
    void double_layer_pair(const RVec* h, RVec* kh, const RVec* k, RVec* ksk) const;

    // S(f, g) = [g, H](f_alpha / zeta_alpha).
    CVec commutator(const CVec& g, const CVec& f) const;
    // (1/(4 pi q^2 i)) int ((u_a - u_b)/sin((zeta_a - zeta_b)/2q))^2 f_b' db.
    CVec square_kernel(const CVec& u, const CVec& f) const;

    // Sum over b != a of C_ab v_b for each input, where C_ab = cot((zeta_a - zeta_b)/2q).
    void cot_sum_many(const std::vector<const double*>& re, const std::vector<const double*>& im,
                      const std::vector<double*>& ore, const std::vector<double*>& oim) const;

private:
    Grid grid_;
    CVec za_, zaa_;
    CVec diag_;  // -q zeta''/zeta'
    double chord_arc_;
    // Strict upper triangle of C, row-major, split into real and imaginary parts.
    RVec cre_, cim_;
    std::vector<size_t> row_;
};

struct RealSolveResult {
    RVec h;
    int iterations;
    double last_change;
};

// Solves (I - H_zeta) h = g for real h by Neumann iteration on the real part,
// or (I - H_zeta)(h conj(zeta_alpha)) = g through (I + K*)(h|zeta_alpha|) = Re(zeta_alpha g/|zeta_alpha|).
RealSolveResult solve_real_hilbert(const CurveKernel& K, const CVec& g, bool weighted,
                                   const RVec* guess = nullptr, double tol = 1e-12,
                                   int max_iter = 50);

// Flat-curve expansion terms H1 f and H2 f.
struct ExpansionTerms {
    CVec h1, h2;
};
ExpansionTerms expansion_terms(const Grid& g, const CVec& z1, const CVec& z2, const CVec& f);

}  // namespace wwsim
