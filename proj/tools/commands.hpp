#pragma once

#include <string>
#include <vector>

#include "wwsim/experiment.hpp"

namespace wwsim::cli {

enum ExitCode { kPass = 0, kUsage = 1, kToleranceFail = 2, kNumericalAbort = 3 };

struct StokesArgs {
    double eps = 0.1;
    int modes = 21;
    std::string out_dir = "stokes_out";
};
int cmd_stokes(const StokesArgs& a);

struct NlsArgs {
    double q1 = 1.0;
    double delta = 1e-3;
    double mu = 0.1;
    int n = 128;
    double dt = 1e-3;
    double s_prime = 11.0;
    std::string out_dir = "nls_out";
};
int cmd_nls(const NlsArgs& a);

int cmd_instability(const ExperimentConfig& c, long checkpoint_every = 50);
int cmd_compare(const ExperimentConfig& c);

struct SweepArgs {
    std::string command = "compare";  // instability | compare
    std::string key;
    std::vector<std::string> values;
    int jobs = 1;
};
int cmd_sweep(const ExperimentConfig& base, const SweepArgs& a);

}  // namespace wwsim::cli
