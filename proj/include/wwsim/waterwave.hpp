#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "wwsim/spectral.hpp"

namespace wwsim {

struct BlowupDetected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AuxFields {
    RVec b;
    RVec A;
    int iters_b = 0;
    int iters_A = 0;
};

// Interface state: offset = zeta - alpha and u = D_t zeta, both periodic.
struct WaterState {
    Grid grid;
    double t = 0.0;
    CVec offset;
    CVec u;
    // Filled by the evolver when b and A were computed for exactly this state.
    std::shared_ptr<const AuxFields> aux;

    static WaterState rest(const Grid& g);
    CVec zeta() const;
};

// How A - 1 is obtained.
//  Weighted: one real solve of (I - H)((A - 1) conj(zeta_alpha)) = R, valid for
//            holomorphic data.
//  Nested:   repeated unweighted solves with D_t^2 zeta refreshed from the
//            previous A until A stops changing.
enum class AMethod { Weighted, Nested };

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 50;
    AMethod a_method = AMethod::Weighted;
};

RVec compute_b(const WaterState& s, const SolveOptions& opt = {});
RVec compute_A(const WaterState& s, const SolveOptions& opt = {});
AuxFields compute_aux(const WaterState& s, const SolveOptions& opt = {});
// a_t/a composed with the inverse Lagrangian map.
RVec compute_at_over_a(const WaterState& s, const SolveOptions& opt = {});

// Imaginary part of the residual of the unreduced complex A equation.
double a_equation_imag_residual(const WaterState& s, const AuxFields& aux);

struct TimeDerivative {
    CVec dzeta;
    CVec du;
};
TimeDerivative time_derivative(const WaterState& s, const SolveOptions& opt = {});

// Reusable right-hand-side evaluator. Keeps kernel storage and warm starts
// b and A from the previous call, so results agree with time_derivative to
// solver tolerance rather than bit for bit.
class RhsEngine {
public:
    RhsEngine(const Grid& g, SolveOptions opt = {});
    TimeDerivative operator()(const WaterState& s, AuxFields* aux_out = nullptr);
    // Replaces conj(zeta) - alpha and conj(u) by their holomorphic parts
    // (1/2)(I + H) f + (1/2) mean(f zeta_alpha), which leaves holomorphic data unchanged.
    void project(WaterState& s);
    long evaluations() const { return evals_; }
    long sweeps() const { return sweeps_; }

private:
    Grid grid_;
    SolveOptions opt_;
    std::optional<CurveKernel> kernel_;
    RVec b_prev_, a_prev_;
    long evals_ = 0;
    long sweeps_ = 0;
};

struct StepOptions {
    bool dealias = true;
    double krasny = 1e-13;
    double norm_limit = 1e6;
    // evolve() projects onto the holomorphic constraints every this many steps (0 never).
    // Antiholomorphic modes grow like exp(sqrt(|k/q|) t), so round-off must not accumulate.
    int project_every = 5;
};

double max_stable_dt(const Grid& g);

// Classical RK4 step followed by dealiasing and the Krasny filter.
WaterState step_rk4(const WaterState& s, double dt, RhsEngine& rhs, const StepOptions& opt = {});
WaterState step_rk4(const WaterState& s, double dt);

using Observer = std::function<void(const WaterState&, long step)>;
// Steps with fixed dt until t_end; observer is called at step 0 and every `stride` steps.
WaterState evolve(const WaterState& s, double t_end, double dt, const Observer& obs = {},
                  long stride = 1, const StepOptions& opt = {}, const SolveOptions& sopt = {});

struct HoloResiduals {
    double r1;
    double r2;
};
// L2 norms of (I - H)(conj(zeta) - alpha) and (I - H) conj(u) after removing the
// constant (1/2 q pi) int f zeta_alpha that a holomorphic f must produce.
HoloResiduals holo_residuals(const WaterState& s);
HoloResiduals holo_residuals(const WaterState& s, const CurveKernel& K);
// (1/2 q pi) int f zeta_alpha d alpha.
cplx cauchy_constant(const CurveKernel& K, const CVec& f);

CVec theta(const WaterState& s);
// D_t theta = (I - H)(u - conj u) - [u, H]((zeta - conj zeta)_alpha / zeta_alpha).
CVec theta_dt(const WaterState& s);

struct CubicForcing {
    CVec G1;
    CVec G2;
};
CubicForcing cubic_forcing(const WaterState& s);

// int (1/A)|D_t Theta|^2 + i Theta conj(Theta)_alpha.
double basic_energy(const Grid& g, const RVec& A, const CVec& Theta, const CVec& DtTheta);
// Right-hand side int (2/A) Re(D_t Theta conj G) - (a_t/a)(1/A)|D_t Theta|^2.
double basic_energy_rate(const Grid& g, const RVec& A, const RVec& at_over_a, const CVec& DtTheta,
                         const CVec& G);

struct EnergyCheck {
    double fd_rate;
    double formula_rate;
    double rel_error;
};
// Central difference of E_0(theta) over [t - dt, t + dt] against the formula at t.
EnergyCheck energy_derivative_check(const WaterState& s, double dt);

}  // namespace wwsim
