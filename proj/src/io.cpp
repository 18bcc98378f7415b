#include "wwsim/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace wwsim {

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

void put_le(std::ostream& o, double x) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char b[8];
    std::memcpy(b, &x, 8);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    o.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated checkpoint");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
    double x;
    std::memcpy(&x, b, 8);
    return x;
}

std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            default: o += c;
        }
    }
    return o;
}

}  // namespace

void ensure_directory(const std::string& path) { std::filesystem::create_directories(path); }

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    auto f = open_out(path);
    f << kCsvSchema << "\n";
    for (size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << "\n";
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw std::invalid_argument("CSV row width mismatch");
        for (size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << num(r[i]);
        f << "\n";
    }
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) t.header.push_back(cell);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ','))
            row.push_back(cell == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string content_hash(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("SHA-256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

void write_manifest(const std::string& path, const std::string& command, const std::string& config,
                    const std::map<std::string, std::string>& extra) {
    nlohmann::ordered_json j;
    j["schema"] = "wwsim-manifest v1";
    j["command"] = command;
    j["config"] = config;
    j["config_sha256"] = content_hash(command + "\n" + config);
    for (const auto& [k, v] : extra) j[k] = v;
    open_out(path) << j.dump(2) << "\n";
}

void write_summary(const std::string& path, const Summary& s) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : s.numbers) {
        if (std::isfinite(v)) j[k] = v;
        else j[k] = nullptr;
    }
    for (const auto& [k, v] : s.flags) j[k] = v;
    for (const auto& [k, v] : s.strings) j[k] = v;
    open_out(path) << j.dump(2) << "\n";
}

void write_checkpoint(const std::string& path, const WaterState& s, double eps) {
    auto f = open_out(path, std::ios::out | std::ios::binary);
    f << "wwsim-checkpoint v1\n"
      << "grid periodic\n"
      << "t " << num(s.t) << "\n"
      << "eps " << num(eps) << "\n"
      << "q " << num(s.grid.q()) << "\n"
      << "n " << s.grid.n() << "\n"
      << "data\n";
    for (const auto& z : s.offset) {
        put_le(f, z.real());
        put_le(f, z.imag());
    }
    for (const auto& z : s.u) {
        put_le(f, z.real());
        put_le(f, z.imag());
    }
}

WaterState read_checkpoint(const std::string& path, double* eps) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(f, line);
    if (line != "wwsim-checkpoint v1") throw std::runtime_error("not a checkpoint: " + path);
    double t = 0.0, e = 0.0, q = 0.0;
    int n = 0;
    while (std::getline(f, line) && line != "data") {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "t") ss >> t;
        else if (key == "eps") ss >> e;
        else if (key == "q") ss >> q;
        else if (key == "n") ss >> n;
    }
    if (line != "data" || n <= 0 || q <= 0.0) throw std::runtime_error("bad checkpoint header");
    WaterState s = WaterState::rest(Grid(q, n));
    s.t = t;
    for (auto& z : s.offset) {
        const double re = get_le(f);
        z = cplx(re, get_le(f));
    }
    for (auto& z : s.u) {
        const double re = get_le(f);
        z = cplx(re, get_le(f));
    }
    if (eps) *eps = e;
    return s;
}

void write_svg_plot(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    auto ok = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!spec.log_y || y > 0.0); };
    auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i)
            if (ok(s.x[i], s.y[i])) {
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, ty(s.y[i]));
                y1 = std::max(y1, ty(s.y[i]));
            }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

    auto f = open_out(path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(spec.title) << "</text>\n"
      << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    char buf[64];
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + i * (x1 - x0) / 4, yv = y0 + i * (y1 - y0) / 4;
        std::snprintf(buf, sizeof buf, "%.3g", xv);
        f << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << buf
          << "</text>\n";
        std::snprintf(buf, sizeof buf, spec.log_y ? "1e%.2g" : "%.3g", yv);
        const double yy = H - B - i * (H - T - B) / 4;
        f << "<text x=\"" << L - 6 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    f << "<text x=\"" << L + (W - L - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
      << xml_escape(spec.xlabel) << "</text>\n"
      << "<text x=\"16\" y=\"" << T + (H - T - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << T + (H - T - B) / 2 << ")\">" << xml_escape(spec.ylabel) << "</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = colors[k % 6];
        f << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
            if (ok(s.x[i], s.y[i])) f << px(s.x[i]) << "," << py(s.y[i]) << " ";
        f << "\"/>\n";
        f << "<text x=\"" << W - R - 6 << "\" y=\"" << T + 16 + 14 * k << "\" text-anchor=\"end\" fill=\"" << col
          << "\">" << xml_escape(s.name) << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace wwsim
