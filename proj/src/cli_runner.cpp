#include "mcrelay/cli_runner.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace mcrelay {

namespace {

std::string format_number(double v) { return fmt::format("{:.12e}", v); }

template <class T>
T read_number(const nlohmann::json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw std::invalid_argument(fmt::format("'{}' must be a number", key));
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument(fmt::format("'{}' must be an integer", key));
        if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)
                throw std::invalid_argument(fmt::format("'{}' must be non-negative", key));
        }
        if constexpr (sizeof(T) < sizeof(std::int64_t)) {
            const auto wide = v.is_number_unsigned() ? static_cast<long double>(v.get<std::uint64_t>())
                                                     : static_cast<long double>(v.get<std::int64_t>());
            if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max())
                throw std::invalid_argument(fmt::format("'{}' is out of range", key));
        }
    }
    return v.get<T>();
}

std::string read_string(const nlohmann::json& obj, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) throw std::invalid_argument(fmt::format("'{}' must be a string", key));
    return v.get<std::string>();
}

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw std::invalid_argument(fmt::format("{}: unknown key '{}'", where, item.key()));
}

std::optional<double> least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) return std::nullopt;
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

std::vector<double> Experiment::snr_grid_db() const {
    std::vector<double> grid;
    const auto steps = static_cast<long>(std::floor((snr_db_stop - snr_db_start) / snr_db_step + 1e-9));
    for (long i = 0; i <= steps; ++i) grid.push_back(snr_db_start + static_cast<double>(i) * snr_db_step);
    return grid;
}

SimConfig Experiment::sim_config(unsigned threads) const {
    SimConfig cfg;
    cfg.M = M;
    cfg.K = K;
    cfg.protocol = protocol;
    cfg.scheme = scheme;
    cfg.snr_params = {db_to_linear(snr_db_start), mu1, mu2};
    cfg.s_threshold = s_threshold();
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.threads = threads;
    return cfg;
}

void Experiment::validate() const {
    const std::string where = fmt::format("experiment '{}'", name);
    if (name.empty() || name.find_first_of("/\\") != std::string::npos || name == "." || name == ".." ||
        name == "summary")
        throw std::invalid_argument(where + ": name must be a plain file stem other than 'summary'");
    if (M < 1) throw std::invalid_argument(where + ": M must be at least 1");
    if (K < 1 || K > 64) throw std::invalid_argument(where + ": K must be in [1, 64]");
    if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw std::invalid_argument(where + ": mu1 and mu2 must be positive");
    if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument(where + ": threshold must be positive");
    if (!(snr_db_step > 0.0)) throw std::invalid_argument(where + ": snr_db_step must be positive");
    if (!(snr_db_stop >= snr_db_start)) throw std::invalid_argument(where + ": snr_db_stop must be >= snr_db_start");
    if (trials < 1) throw std::invalid_argument(where + ": trials must be at least 1");
    for (const auto& o : outputs)
        if (o != "csv" && o != "json") throw std::invalid_argument(where + ": output format must be csv or json");
}

Experiment parse_experiment(const nlohmann::json& obj, std::size_t index) {
    if (!obj.is_object()) throw std::invalid_argument(fmt::format("experiment {} must be an object", index));
    static const std::set<std::string> allowed{"name",         "M",           "K",           "protocol", "scheme",
                                               "mu1",          "mu2",         "xi",          "rate_bits", "snr_db_start",
                                               "snr_db_stop",  "snr_db_step", "trials",      "seed",      "outputs"};
    reject_unknown_keys(obj, allowed, fmt::format("experiment {}", index));

    Experiment e;
    e.name = read_string(obj, "name", fmt::format("exp{}", index));
    e.M = read_number<int>(obj, "M", e.M);
    e.K = read_number<int>(obj, "K", e.K);
    e.protocol = parse_protocol(read_string(obj, "protocol", "DF"));
    e.scheme = parse_scheme(read_string(obj, "scheme", "bulk"));
    e.mu1 = read_number<double>(obj, "mu1", e.mu1);
    e.mu2 = read_number<double>(obj, "mu2", e.mu2);
    if (obj.contains("xi") && obj.contains("rate_bits"))
        throw std::invalid_argument(fmt::format("experiment '{}': give either xi or rate_bits, not both", e.name));
    if (obj.contains("rate_bits")) e.xi = bits_to_nats(read_number<double>(obj, "rate_bits", 0.0));
    e.xi = read_number<double>(obj, "xi", e.xi);
    e.snr_db_start = read_number<double>(obj, "snr_db_start", e.snr_db_start);
    e.snr_db_stop = read_number<double>(obj, "snr_db_stop", e.snr_db_stop);
    e.snr_db_step = read_number<double>(obj, "snr_db_step", e.snr_db_step);
    e.trials = read_number<std::uint64_t>(obj, "trials", e.trials);
    e.seed = read_number<std::uint64_t>(obj, "seed", e.seed);
    if (obj.contains("outputs")) {
        const auto& outs = obj.at("outputs");
        if (!outs.is_array()) throw std::invalid_argument("'outputs' must be an array of strings");
        e.outputs.clear();
        for (const auto& o : outs) {
            if (!o.is_string()) throw std::invalid_argument("'outputs' must be an array of strings");
            e.outputs.push_back(o.get<std::string>());
        }
    }
    e.validate();
    return e;
}

RunSpec parse_run_spec(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("run spec must be a JSON object");
    reject_unknown_keys(doc, {"experiments", "output_dir", "threads"}, "run spec");
    if (!doc.contains("experiments") || !doc.at("experiments").is_array())
        throw std::invalid_argument("run spec needs an 'experiments' array");

    RunSpec spec;
    if (doc.contains("output_dir")) spec.output_dir = read_string(doc, "output_dir", "");
    spec.threads = read_number<unsigned>(doc, "threads", 0u);
    std::set<std::string> names;
    const auto& list = doc.at("experiments");
    for (std::size_t i = 0; i < list.size(); ++i) {
        Experiment e = parse_experiment(list[i], i);
        if (!names.insert(e.name).second) throw std::invalid_argument(fmt::format("duplicate experiment name '{}'", e.name));
        spec.experiments.push_back(std::move(e));
    }
    return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(fmt::format("cannot open run spec '{}'", path.string()));
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(fmt::format("run spec '{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return parse_run_spec(doc);
}

std::string format_csv(const OutageCurve& curve) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& p : curve) {
        out += fmt::format("{},{},{},{},{},{},{}\n", format_number(p.snr_db), format_number(p.analytic),
                           p.asymptotic ? format_number(*p.asymptotic) : std::string{}, format_number(p.mc.p_hat),
                           format_number(p.mc.ci_low), format_number(p.mc.ci_high), p.clamped ? 1 : 0);
    }
    return out;
}

nlohmann::json curve_to_json(const OutageCurve& curve) {
    auto arr = nlohmann::json::array();
    for (const auto& p : curve) {
        nlohmann::json row;
        row["snr_db"] = p.snr_db;
        row["analytic"] = p.analytic;
        row["asymptotic"] = p.asymptotic ? nlohmann::json(*p.asymptotic) : nlohmann::json(nullptr);
        row["mc_p_hat"] = p.mc.p_hat;
        row["mc_ci_low"] = p.mc.ci_low;
        row["mc_ci_high"] = p.mc.ci_high;
        row["clamped_flag"] = p.clamped;
        arr.push_back(std::move(row));
    }
    return arr;
}

SlopeFit fit_high_snr_slope(const OutageCurve& curve, double window_db) {
    SlopeFit fit;
    if (curve.empty()) return fit;
    const double lo = curve.back().snr_db - window_db - 1e-9;
    std::vector<double> xa, ya, xm, ym;
    for (const auto& p : curve) {
        if (p.snr_db < lo) continue;
        if (p.analytic > 0.0 && !p.clamped) {
            xa.push_back(p.snr_db);
            ya.push_back(std::log10(p.analytic));
        }
        if (!p.mc.low_count) {
            xm.push_back(p.snr_db);
            ym.push_back(std::log10(p.mc.p_hat));
        }
    }
    fit.analytic = least_squares_slope(xa, ya);
    fit.monte_carlo = least_squares_slope(xm, ym);
    return fit;
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& override_dir, const RunSpec& spec) {
    if (override_dir) return *override_dir;
    if (spec.output_dir) return *spec.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return ".";
}

int run(const RunSpec& spec, const std::filesystem::path& output_dir, std::ostream& log,
        std::vector<ExperimentOutcome>* outcomes) {
    std::vector<ExperimentOutcome> results;
    for (const auto& e : spec.experiments) {
        ExperimentOutcome outcome;
        outcome.name = e.name;
        try {
            const auto grid = e.snr_grid_db();
            const OutageCurve curve = estimate_curve(e.sim_config(spec.threads), grid);
            const ProtocolDistribution d{e.protocol, {db_to_linear(e.snr_db_start), e.mu1, e.mu2}};
            outcome.diversity = diversity_order(e.scheme, e.M, e.K, series_order(d));
            outcome.slopes = fit_high_snr_slope(curve);

            std::filesystem::create_directories(output_dir);
            for (const auto& format : e.outputs) {
                const auto path = output_dir / (e.name + "." + format);
                std::ofstream out(path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + path.string());
                if (format == "csv") {
                    out << format_csv(curve);
                } else {
                    out << curve_to_json(curve).dump(2) << '\n';
                }
                outcome.files.push_back(path);
            }
            outcome.ok = true;
        } catch (const std::exception& ex) {
            outcome.error = ex.what();
            log << fmt::format("experiment '{}' failed: {}\n", e.name, ex.what());
        }
        results.push_back(std::move(outcome));
    }

    bool all_ok = true;
    if (!results.empty()) {
        std::string table = "name,diversity,expected_slope_per_db,analytic_slope_per_db,mc_slope_per_db,status\n";
        const auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string{}; };
        for (const auto& r : results) {
            all_ok = all_ok && r.ok;
            table += fmt::format("{},{},{},{},{},{}\n", r.name, r.diversity,
                                 r.ok ? fmt::format("{:.6f}", -r.diversity / 10.0) : std::string{}, opt(r.slopes.analytic),
                                 opt(r.slopes.monte_carlo), r.ok ? "ok" : "failed");
        }
        log << table;
        std::error_code ec;
        std::filesystem::create_directories(output_dir, ec);
        std::ofstream(output_dir / "summary.csv", std::ios::binary) << table;
    }
    if (outcomes) *outcomes = std::move(results);
    return all_ok ? 0 : 1;
}

}  // namespace mcrelay
