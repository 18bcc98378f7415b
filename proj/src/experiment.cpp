#include "wwsim/experiment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace wwsim {

namespace {

const double NaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("bad value for " + key + ": '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::round(x)) throw std::invalid_argument(key + " must be an integer");
    return static_cast<int>(x);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

double ExperimentConfig::t_star() const { return std::log(mu / delta) / (eps * eps); }

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "eps") c.eps = to_double(key, v);
    else if (key == "q") c.q = to_int(key, v);
    else if (key == "n") c.n = to_int(key, v);
    else if (key == "dt") c.dt = to_double(key, v);
    else if (key == "t_end") c.t_end = to_double(key, v);
    else if (key == "delta") c.delta = to_double(key, v);
    else if (key == "mu") c.mu = to_double(key, v);
    else if (key == "s") c.s = to_double(key, v);
    else if (key == "s_prime") c.s_prime = to_double(key, v);
    else if (key == "k0") c.k0 = to_int(key, v);
    else if (key == "n_slow") c.n_slow = to_int(key, v);
    else if (key == "snapshot_every") c.snapshot_every = to_double(key, v);
    else if (key == "distance_every") c.distance_every = to_double(key, v);
    else if (key == "fit_from") c.fit_from = to_double(key, v);
    else if (key == "es_until") c.es_until = to_double(key, v);
    else if (key == "out_dir") c.out_dir = v;
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key=value");
        set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config " + path);
    return parse_config(f, base);
}

std::string config_text(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "eps=" << fmt(c.eps) << "\nq=" << c.q << "\nn=" << c.n << "\ndt=" << fmt(c.dt)
      << "\nt_end=" << fmt(c.t_end) << "\ndelta=" << fmt(c.delta) << "\nmu=" << fmt(c.mu)
      << "\ns=" << fmt(c.s) << "\ns_prime=" << fmt(c.s_prime) << "\nk0=" << c.k0
      << "\nn_slow=" << c.n_slow << "\nsnapshot_every=" << fmt(c.snapshot_every)
      << "\ndistance_every=" << fmt(c.distance_every) << "\nfit_from=" << fmt(c.fit_from)
      << "\nes_until=" << fmt(c.es_until) << "\n";
    return o.str();
}

void validate(const ExperimentConfig& c) {
    if (!(c.eps > 0.0 && c.eps <= 0.15)) throw std::invalid_argument("eps must lie in (0, 0.15]");
    if (c.q < 1) throw std::invalid_argument("q must be a positive integer");
    if (c.q1() < 1.0 - 1e-12) throw std::invalid_argument("q * eps must be at least 1");
    if (std::abs(c.q1() - std::round(c.q1())) > 1e-9)
        throw std::invalid_argument("q * eps must be an integer so the envelope torus embeds exactly");
    if (c.n < 8 || c.n % 2) throw std::invalid_argument("n must be even and at least 8");
    if (c.n_slow < 8 || c.n_slow % 2 || c.n_slow > c.n)
        throw std::invalid_argument("n_slow must be even, at least 8 and at most n");
    if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (c.dt > max_stable_dt(Grid(c.q, c.n)))
        throw std::invalid_argument("dt exceeds the stability limit " + fmt(max_stable_dt(Grid(c.q, c.n))));
    if (!(c.delta >= 0.0 && c.mu > c.delta)) throw std::invalid_argument("need 0 <= delta < mu");
    if (c.s < 4.0) throw std::invalid_argument("s must be at least 4");
    if (c.k0 < 0) throw std::invalid_argument("k0 must be non-negative");
    if (!(c.snapshot_every > 0.0 && c.distance_every > 0.0))
        throw std::invalid_argument("snapshot spacings must be positive");
}

PreparedRun prepare_run(const ExperimentConfig& c) {
    validate(c);
    const Grid slow(c.q1(), c.n_slow);
    const int k0 = c.k0 > 0 ? c.k0 : growth_rate(c.q1()).k0;
    CVec w0 = c.delta > 0.0 ? unstable_seed(slow, c.delta, k0, c.s_prime) : CVec(c.n_slow, 0.0);
    NlsState B0 = lift_to_B(slow, w0);
    StokesWave w = stokes_newton(c.eps, NewtonOptions{});
    SeedSpec spec{B0, c.eps, w, c.n};
    InitialData d = build_initial_data(spec);
    return {B0, w, d};
}

std::pair<double, double> sideband_amplitudes(const WaterState& s, int q) {
    const Grid& g = s.grid;
    CVec c(g.n());
    g.dft(s.offset.data(), c.data());
    const double scale = std::sqrt(g.length()) / g.n();
    return {std::abs(c[q - 1]) * scale, std::abs(c[q + 1]) * scale};
}

double fit_exponential_rate(const RVec& t, const RVec& y, double t_from) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    int m = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_from || !(y[i] > 0.0)) continue;
        const double ly = std::log(y[i]);
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
        ++m;
    }
    if (m < 2) return NaN;
    return (m * sty - st * sy) / (m * stt - st * st);
}

double loglog_slope(const RVec& x, const RVec& y) {
    RVec lx(x.size());
    for (size_t i = 0; i < x.size(); ++i) lx[i] = std::log(x[i]);
    return fit_exponential_rate(lx, y, -std::numeric_limits<double>::infinity());
}

InstabilityResult run_instability(const ExperimentConfig& c, const SnapshotHook& hook) {
    const PreparedRun prep = prepare_run(c);
    const StokesFamily fam = build_stokes_family(std::min(0.15, 1.5 * c.eps));
    InstabilityResult res;
    res.t_star = c.t_star();
    res.admissibility = verify_admissibility(prep.data.state);
    res.expected_rate = c.eps * c.eps * growth_rate(c.q1()).tau;
    {
        const int k0 = c.k0 > 0 ? c.k0 : growth_rate(c.q1()).k0;
        const double kap = k0 / (2.0 * c.q1());
        res.envelope_rate = kap * kap < 2.0 ? 0.5 * c.eps * c.eps * kap * std::sqrt(2.0 - kap * kap) : 0.0;
    }

    const long snap = std::max(1L, std::lround(c.snapshot_every / c.dt));
    const long dist_every = std::max(1L, std::lround(c.distance_every / c.dt) / snap) * snap;
    const long star_step = std::isfinite(res.t_star) ? std::lround(res.t_star / c.dt) : -1;
    const HoloResiduals h0 = holo_residuals(prep.data.state);
    res.final_distance = NaN;

    auto observe = [&](const WaterState& s, long step) {
        Snapshot sn{s.t, NaN, NaN, 0.0, 0.0, NaN, 0.0, 0.0};
        if (s.t <= c.es_until + 0.5 * c.dt) {
            const EnvelopeBundle bd = make_bundle(prep.B0, prep.stokes, s.t, s.grid);
            sn.es_sqrt = std::sqrt(remainder(s, bd, c.s).Es);
            sn.rho_norm = l2_norm(s.grid, cubic_remainder_rho(s, bd));
        }
        std::tie(sn.side_minus, sn.side_plus) = sideband_amplitudes(s, c.q);
        if (step % dist_every == 0 || step == star_step) sn.distance = family_distance(s, fam).dist;
        if (step == 0) res.initial_distance = sn.distance;
        if (step == star_step) res.final_distance = sn.distance;
        const HoloResiduals h = holo_residuals(s);
        sn.holo_zeta = h.r1;
        sn.holo_v = h.r2;
        res.holo_growth = std::max(res.holo_growth, std::max(h.r1 - h0.r1, h.r2 - h0.r2));
        res.series.push_back(sn);
        if (hook) hook(sn, s);
    };

    // The step at t_star may fall between regular snapshots; stride over single steps
    // and filter here.
    auto filtered = [&](const WaterState& s, long step) {
        if (step % snap == 0 || step == star_step) observe(s, step);
    };
    try {
        evolve(prep.data.state, c.t_end, c.dt, filtered, 1);
    } catch (const BlowupDetected& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    } catch (const NoConvergence& e) {
        res.aborted = true;
        res.abort_reason = e.what();
    }

    RVec t, a;
    for (const auto& sn : res.series) {
        t.push_back(sn.t);
        a.push_back(std::hypot(sn.side_minus, sn.side_plus));
    }
    res.fitted_rate = fit_exponential_rate(t, a, c.fit_from);
    return res;
}

ScalingStudy es_scaling(const ExperimentConfig& c, const RVec& eps_values) {
    ScalingStudy st;
    RVec xs, ys;
    const double per_wave = static_cast<double>(c.n) / c.q;
    for (double e : eps_values) {
        ExperimentConfig ce = c;
        ce.eps = e;
        ce.q = static_cast<int>(std::lround(c.q1() / e));
        ce.n = static_cast<int>(std::lround(per_wave * ce.q));
        ce.n += ce.n % 2;
        ce.dt = std::min(c.dt, max_stable_dt(Grid(ce.q, ce.n)));
        const PreparedRun prep = prepare_run(ce);
        const EnvelopeBundle bd = make_bundle(prep.B0, prep.stokes, 0.0, prep.data.state.grid);
        const double v = std::sqrt(remainder(prep.data.state, bd, c.s).Es);
        st.points.push_back({e, ce.q, ce.n, v});
        xs.push_back(e);
        ys.push_back(v);
    }
    st.slope = loglog_slope(xs, ys);
    return st;
}

}  // namespace wwsim
