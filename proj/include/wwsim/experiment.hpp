#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "wwsim/initdata.hpp"
#include "wwsim/modulation.hpp"

namespace wwsim {

struct ExperimentConfig {
    double eps = 0.1;
    int q = 10;
    int n = 1024;
    double dt = 0.02;
    double t_end = 250.0;
    double delta = 0.01;
    double mu = 0.1;
    double s = 4.0;
    double s_prime = 11.0;
    int k0 = 1;                 // seeded slow mode; 0 picks the fastest mode on q1
    int n_slow = 64;            // nodes of the envelope grid
    double snapshot_every = 1.0;
    double distance_every = 10.0;
    double fit_from = 20.0;     // start of the sideband fit window
    double es_until = 100.0;    // E_s is tracked on [0, es_until]
    std::string out_dir = "run";

    double q1() const { return q * eps; }
    double t_star() const;  // eps^-2 log(mu / delta)
};

// Flat key=value text, '#' starts a comment. Unknown keys throw.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);
// Canonical key=value listing, one key per line in a fixed order.
std::string config_text(const ExperimentConfig& c);
// Throws std::invalid_argument for configurations outside the model's hypotheses.
void validate(const ExperimentConfig& c);

struct PreparedRun {
    NlsState B0;
    StokesWave stokes;
    InitialData data;
};
PreparedRun prepare_run(const ExperimentConfig& c);

struct Snapshot {
    double t;
    double es_sqrt;      // NaN past es_until
    double rho_norm;     // NaN past es_until
    double side_minus;   // |mode q - 1| of the offset, L2-normalized
    double side_plus;
    double distance;     // NaN when not evaluated
    double holo_zeta;
    double holo_v;
};

struct InstabilityResult {
    std::vector<Snapshot> series;
    Admissibility admissibility;
    double initial_distance = 0.0;
    double final_distance = 0.0;  // at t_star
    double t_star = 0.0;
    double fitted_rate = 0.0;
    double expected_rate = 0.0;   // eps^2 tau(q1)
    double envelope_rate = 0.0;   // eps^2 tau_std(k0 / 2 q1) / 2
    double holo_growth = 0.0;
    bool aborted = false;
    std::string abort_reason;
};

using SnapshotHook = std::function<void(const Snapshot&, const WaterState&)>;
InstabilityResult run_instability(const ExperimentConfig& c, const SnapshotHook& hook = {});

// Least-squares slope of log y against t over samples with t >= t_from.
double fit_exponential_rate(const RVec& t, const RVec& y, double t_from);
// Least-squares slope of log y against log x.
double loglog_slope(const RVec& x, const RVec& y);

struct ScalingPoint {
    double eps;
    int q;
    int n;
    double es0_sqrt;
};
struct ScalingStudy {
    std::vector<ScalingPoint> points;
    double slope;
};
// E_s^{1/2}(0) for each eps at fixed q1 and fixed nodes per carrier wavelength.
ScalingStudy es_scaling(const ExperimentConfig& c, const RVec& eps_values);

// Sideband amplitudes |c_{q-1}| and |c_{q+1}| of the offset.
std::pair<double, double> sideband_amplitudes(const WaterState& s, int q);

}  // namespace wwsim
