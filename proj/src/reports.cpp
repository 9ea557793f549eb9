#include "dtnlab/reports.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace dtnlab {

using nlohmann::json;

const std::vector<std::string> kExperimentNames = {
    "dtn-verify",     "commutator-sweep",  "identity-check", "square-report",
    "carleson-report", "kenig-stein-check", "kernel-check"};

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

ValidationResult validate_config(const std::string& json_text) {
    ValidationResult out;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& e) {
        out.errors.push_back(std::string("config is not valid JSON: ") + e.what());
        return out;
    }
    if (!doc.is_object()) {
        out.errors.push_back("config must be a JSON object");
        return out;
    }

    static const std::vector<std::string> known = {"experiment", "n",     "L",    "Y",
                                                   "y_levels",   "N0",    "seed", "trials",
                                                   "band_limit", "p",     "c0",   "out",
                                                   "plots",      "paper_literal"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool found = false;
        for (const auto& k : known) found = found || k == it.key();
        if (!found) out.errors.push_back("unknown config key: " + it.key());
    }

    ExperimentConfig cfg;
    auto number = [&](const char* key, double lo, double hi, double& dst, const char* what) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_number()) {
            out.errors.push_back(std::string(key) + " must be a number");
            return;
        }
        double v = doc[key].get<double>();
        if (v < lo || v > hi) {
            out.errors.push_back(std::string(key) + " " + what);
            return;
        }
        dst = v;
    };
    auto integer = [&](const char* key, long lo, long hi, int& dst, const char* what) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_number_integer()) {
            out.errors.push_back(std::string(key) + " must be an integer");
            return;
        }
        long v = doc[key].get<long>();
        if (v < lo || v > hi) {
            out.errors.push_back(std::string(key) + " " + what);
            return;
        }
        dst = static_cast<int>(v);
    };

    if (doc.contains("experiment")) {
        if (!doc["experiment"].is_string()) {
            out.errors.push_back("experiment must be a string");
        } else {
            cfg.experiment = doc["experiment"].get<std::string>();
            bool found = false;
            for (const auto& e : kExperimentNames) found = found || e == cfg.experiment;
            if (!found) out.errors.push_back("unknown experiment: " + cfg.experiment);
        }
    }
    integer("n", 8, 1 << 20, cfg.n, "must lie in [8, 2^20]");
    if (doc.contains("n") && doc["n"].is_number_integer() && !is_pow2(doc["n"].get<int>()))
        out.errors.push_back("n must be a power of two");
    number("L", 1e-8, 1e8, cfg.L, "must be positive and finite");
    number("Y", 1e-8, 1e12, cfg.Y, "must be positive");
    integer("y_levels", 8, 1 << 20, cfg.y_levels, "must lie in [8, 2^20]");
    number("N0", 1.0, 1e6, cfg.N0, "must be >= 1");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            out.errors.push_back("seed must be an integer");
        else
            cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    integer("trials", 1, 1000000, cfg.trials, "must be >= 1");
    integer("band_limit", 1, 1 << 20, cfg.band_limit, "must be >= 1");
    if (doc.contains("p")) {
        if (!doc["p"].is_number()) {
            out.errors.push_back("p must be a number");
        } else {
            double v = doc["p"].get<double>();
            if (!(v > 1.0) || !std::isfinite(v))
                out.errors.push_back("p must satisfy 1 < p < infinity");
            else
                cfg.p = v;
        }
    }
    if (doc.contains("c0")) {
        if (doc["c0"].is_string() && doc["c0"].get<std::string>() == "auto") {
            cfg.c0_auto = true;
        } else if (doc["c0"].is_number() && doc["c0"].get<double>() > 0.0) {
            cfg.c0_auto = false;
            cfg.c0_value = doc["c0"].get<double>();
        } else {
            out.errors.push_back("c0 must be \"auto\" or a positive number");
        }
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string())
            out.errors.push_back("out must be a string path");
        else
            cfg.out_dir = doc["out"].get<std::string>();
    }
    if (doc.contains("plots")) {
        if (!doc["plots"].is_boolean())
            out.errors.push_back("plots must be a boolean");
        else
            cfg.plots = doc["plots"].get<bool>();
    }
    if (doc.contains("paper_literal")) {
        if (!doc["paper_literal"].is_boolean())
            out.errors.push_back("paper_literal must be a boolean");
        else
            cfg.paper_literal = doc["paper_literal"].get<bool>();
    }

    // cross-field constraints, only meaningful once the fields themselves are valid
    if (is_pow2(cfg.n) && cfg.band_limit > cfg.n / 4)
        out.errors.push_back("band_limit must not exceed n/4 (dealiasing headroom)");
    if (cfg.Y > 0.0 && cfg.Y > 4.0 * cfg.L) out.errors.push_back("Y must not exceed 4L");

    if (out.errors.empty()) out.config = cfg;
    return out;
}

CheckRecord check_le(std::string name, double value, double tol) {
    return {std::move(name), value, tol, "le", value <= tol};
}

CheckRecord check_ge(std::string name, double value, double tol) {
    return {std::move(name), value, tol, "ge", value >= tol};
}

std::string csv_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool RunReport::all_pass() const {
    for (const auto& r : records)
        if (!r.pass) return false;
    return true;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    if (cfg.experiment == "dtn-verify")
        rep = run_dtn_verify(cfg);
    else if (cfg.experiment == "commutator-sweep")
        rep = run_commutator_sweep(cfg);
    else if (cfg.experiment == "identity-check")
        rep = run_identity_check(cfg);
    else if (cfg.experiment == "square-report")
        rep = run_square_report(cfg);
    else if (cfg.experiment == "carleson-report")
        rep = run_carleson_report(cfg);
    else if (cfg.experiment == "kenig-stein-check")
        rep = run_kenig_stein_check(cfg);
    else if (cfg.experiment == "kernel-check")
        rep = run_kernel_check(cfg);
    else
        throw std::invalid_argument("run_experiment: unknown experiment " + cfg.experiment);
    rep.config = cfg;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

namespace {

void write_svg_plot(const std::string& path, const CsvTable& table) {
    // first column is x, every further numeric column a polyline
    if (table.rows.empty() || table.header.size() < 2) return;
    const int w = 640, h = 400, margin = 48;
    std::vector<std::vector<double>> cols(table.header.size());
    for (const auto& row : table.rows)
        for (size_t c = 0; c < row.size() && c < cols.size(); ++c) {
            try {
                cols[c].push_back(std::stod(row[c]));
            } catch (...) {
                return;  // non-numeric table, nothing to plot
            }
        }
    auto minmax = [](const std::vector<double>& v) {
        double lo = v[0], hi = v[0];
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (hi == lo) hi = lo + 1.0;
        return std::pair<double, double>{lo, hi};
    };
    auto [xlo, xhi] = minmax(cols[0]);
    double ylo = cols[1][0], yhi = cols[1][0];
    for (size_t c = 1; c < cols.size(); ++c) {
        auto [a, b] = minmax(cols[c]);
        ylo = std::min(ylo, a);
        yhi = std::max(yhi, b);
    }
    if (yhi == ylo) yhi = ylo + 1.0;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_plot: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"13\">" << table.name << "</text>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (size_t c = 1; c < cols.size(); ++c) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[(c - 1) % 6]
            << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < cols[c].size(); ++i) {
            double px = margin + (cols[0][i] - xlo) / (xhi - xlo) * (w - 2 * margin);
            double py = h - margin - (cols[c][i] - ylo) / (yhi - ylo) * (h - 2 * margin);
            out << px << ',' << py << ' ';
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace

std::vector<std::string> write_report(const RunReport& report) {
    namespace fs = std::filesystem;
    const auto& cfg = report.config;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (!fs::is_directory(cfg.out_dir))
        throw std::runtime_error("write_report: cannot create output directory " + cfg.out_dir);

    std::vector<std::string> written;

    json summary;
    summary["library"] = kLibraryVersion;
    summary["experiment"] = cfg.experiment;
    summary["wall_seconds"] = report.wall_seconds;
    summary["all_pass"] = report.all_pass();
    json jc;
    jc["n"] = cfg.n;
    jc["L"] = cfg.L;
    jc["Y"] = cfg.resolved_Y();
    jc["y_levels"] = cfg.y_levels;
    jc["N0"] = cfg.N0;
    jc["seed"] = cfg.seed;
    jc["trials"] = cfg.trials;
    jc["band_limit"] = cfg.band_limit;
    jc["p"] = cfg.p;
    jc["c0"] = cfg.c0_auto ? json("auto") : json(cfg.c0_value);
    jc["out"] = cfg.out_dir;
    jc["plots"] = cfg.plots;
    jc["paper_literal"] = cfg.paper_literal;
    summary["config"] = jc;
    json recs = json::array();
    for (const auto& r : report.records) {
        json jr;
        jr["name"] = r.name;
        jr["value"] = r.value;
        jr["tolerance"] = r.tolerance;
        jr["cmp"] = r.cmp;
        jr["pass"] = r.pass;
        recs.push_back(jr);
    }
    summary["records"] = recs;

    const std::string sum_path = cfg.out_dir + "/" + cfg.experiment + "_summary.json";
    {
        std::ofstream out(sum_path);
        if (!out) throw std::runtime_error("write_report: cannot write " + sum_path);
        out << summary.dump(2) << '\n';
    }
    written.push_back(sum_path);

    for (const auto& t : report.tables) {
        const std::string path = cfg.out_dir + "/" + t.name + ".csv";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("write_report: cannot write " + path);
        for (size_t c = 0; c < t.header.size(); ++c)
            out << t.header[c] << (c + 1 < t.header.size() ? "," : "");
        out << '\n';
        for (const auto& row : t.rows) {
            for (size_t c = 0; c < row.size(); ++c)
                out << row[c] << (c + 1 < row.size() ? "," : "");
            out << '\n';
        }
        written.push_back(path);
        if (cfg.plots) {
            const std::string svg = cfg.out_dir + "/" + t.name + ".svg";
            write_svg_plot(svg, t);
            written.push_back(svg);
        }
    }
    return written;
}

}  // namespace dtnlab
