#pragma once

// Batch front-end: a RunSpec names a scenario file, a command, an optional
// parameter sweep and an output file. Every command produces one table,
// written as CSV (header row with units) or JSON (array of row objects).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "radarsg/errors.hpp"
#include "radarsg/interference.hpp"
#include "radarsg/io.hpp"
#include "radarsg/model.hpp"
#include "radarsg/montecarlo.hpp"
#include "radarsg/performance.hpp"

namespace radarsg::cli {

enum class Command { Mean, Cdf, Ps, Optimize, DutyCycle, Mc, Converge };
enum class Format { Csv, Json };

inline const std::vector<std::pair<std::string, Command>>& command_names() {
    static const std::vector<std::pair<std::string, Command>> names = {
        {"mean", Command::Mean},   {"cdf", Command::Cdf},
        {"ps", Command::Ps},       {"optimize", Command::Optimize},
        {"duty-cycle", Command::DutyCycle}, {"mc", Command::Mc},
        {"converge", Command::Converge}};
    return names;
}

inline Command parse_command(const std::string& name) {
    for (const auto& [n, c] : command_names()) {
        if (n == name) return c;
    }
    throw SchemaError("command", "unknown command '" + name + "'");
}

inline std::string to_string(Command c) {
    for (const auto& [n, cc] : command_names()) {
        if (cc == c) return n;
    }
    return "unknown";
}

// Evenly spaced values from..to, linear or logarithmic.
struct Axis {
    double from = 0.0;
    double to = 0.0;
    std::size_t points = 2;
    bool log = false;

    void validate(const std::string& field) const {
        if (!(std::isfinite(from) && std::isfinite(to))) throw InvariantError(field, "bounds must be finite");
        if (points < 2) throw InvariantError(field, "points must be >= 2");
        if (!(to > from)) throw InvariantError(field, "'to' must exceed 'from'");
        if (log && !(from > 0.0)) throw InvariantError(field, "log scale requires from > 0");
    }

    std::vector<double> values() const {
        std::vector<double> v(points);
        const double n = static_cast<double>(points - 1);
        for (std::size_t i = 0; i < points; ++i) {
            const double t = static_cast<double>(i) / n;
            v[i] = log ? std::exp(std::log(from) + t * (std::log(to) - std::log(from))) : from + t * (to - from);
        }
        v.front() = from;
        v.back() = to;
        return v;
    }
};

struct Sweep {
    std::string name;
    Axis axis;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double parse_number(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw SchemaError(field, "'" + text + "' is not a number");
    }
    if (used != text.size()) throw SchemaError(field, "'" + text + "' is not a number");
    return v;
}

inline Axis parse_axis_parts(const std::vector<std::string>& parts, const std::string& field) {
    if (parts.size() != 3 && parts.size() != 4) throw SchemaError(field, "expected from:to:points[:log]");
    Axis a;
    a.from = parse_number(parts[0], field);
    a.to = parse_number(parts[1], field);
    const double pts = parse_number(parts[2], field);
    if (!(pts >= 2.0 && pts == std::floor(pts) && pts <= 1e7)) throw InvariantError(field, "points must be an integer >= 2");
    a.points = static_cast<std::size_t>(pts);
    if (parts.size() == 4) {
        if (parts[3] == "log") a.log = true;
        else if (parts[3] != "lin" && parts[3] != "linear") throw SchemaError(field, "scale must be 'log' or 'linear'");
    }
    a.validate(field);
    return a;
}

}  // namespace detail

// "from:to:points[:log]"
inline Axis parse_axis(const std::string& text, const std::string& field = "grid") {
    return detail::parse_axis_parts(detail::split(text, ':'), field);
}

// "name:from:to:points[:log]"; name must be a scenario field.
inline Sweep parse_sweep(const std::string& text) {
    auto parts = detail::split(text, ':');
    if (parts.size() < 4) throw SchemaError("sweep", "expected name:from:to:points[:log]");
    Sweep s;
    s.name = parts.front();
    const auto& fields = io::sweepable_fields();
    if (std::find(fields.begin(), fields.end(), s.name) == fields.end()) {
        throw InvariantError("sweep", "'" + s.name + "' is not a scenario field");
    }
    parts.erase(parts.begin());
    s.axis = detail::parse_axis_parts(parts, "sweep");
    return s;
}

// Column label of a swept field, with its SI unit.
inline std::string sweep_column(const std::string& field) {
    if (field == "tx_power" || field == "noise_power") return field + "_watts";
    if (field == "beamwidth") return "beamwidth_rad";
    if (field == "frequency") return "frequency_hz";
    if (field == "rcs") return "rcs_m2";
    if (field == "offset") return "offset_m";
    if (field == "density") return "density_per_m";
    return field;
}

struct RunSpec {
    std::string scenario_path;
    Command command = Command::Mean;
    std::optional<Sweep> sweep;
    // Command axis: x [W] for cdf, R [m] for ps and optimize, n for duty-cycle.
    std::optional<Axis> grid;
    // lambda_I [1/m] axis of the optimize surface.
    std::optional<Axis> lambda_grid;
    std::string output_path = "-";  // "-" writes to stdout
    Format format = Format::Csv;
    bool mc = false;
    montecarlo::McConfig mc_config;
    std::string dump_path;  // raw MC samples, little-endian float64

    void validate() const {
        if (scenario_path.empty()) throw InvariantError("scenario", "a scenario file is required");
        if (output_path.empty()) throw InvariantError("out", "an output path is required");
        if (sweep) sweep->axis.validate("sweep");
        if (grid) grid->validate("grid");
        if (lambda_grid) lambda_grid->validate("lambda_grid");
        mc_config.validate();
    }
};

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            if (const auto* d = std::get_if<double>(&row[i])) os << io::format_double(*d);
            else os << std::get<std::string>(row[i]);
        }
        os << '\n';
    }
}

inline void write_json(std::ostream& os, const Table& t, Command command) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const auto* d = std::get_if<double>(&row[i])) {
                // JSON has no inf/nan; they become null
                obj[t.columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
            } else {
                obj[t.columns[i]] = std::get<std::string>(row[i]);
            }
        }
        rows.push_back(std::move(obj));
    }
    nlohmann::ordered_json doc;
    doc["command"] = to_string(command);
    doc["columns"] = t.columns;
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvariantError("scenario", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline montecarlo::McConfig with_replicates(montecarlo::McConfig mc, std::size_t reps) {
    mc.replicates = reps;
    return mc;
}

inline std::string dump_name(const RunSpec& spec, std::size_t sweep_index) {
    if (!spec.sweep) return spec.dump_path;
    return spec.dump_path + "." + std::to_string(sweep_index);
}

// CDF grid from sample quantiles 0.001..0.999, log-spaced.
inline std::vector<double> auto_cdf_grid(std::vector<double> samples, std::size_t points) {
    std::sort(samples.begin(), samples.end());
    const auto q = [&](double p) { return samples[static_cast<std::size_t>(p * static_cast<double>(samples.size() - 1))]; };
    double lo = q(0.001);
    double hi = q(0.999);
    if (!(lo > 0.0)) {
        const auto it = std::upper_bound(samples.begin(), samples.end(), 0.0);
        if (it == samples.end()) throw DomainError("cdf: interference is identically zero");
        lo = *it;
    }
    if (!(hi > lo)) hi = 10.0 * lo;
    return Axis{lo, hi, points, true}.values();
}

inline DistributionCurve analytic_cdf(const Scenario& s, const std::vector<double>& grid, unsigned threads) {
    const auto spec = interference::CfSpec::from_scenario(s);
    if (s.geometry == Geometry::BernoulliLattice) {
        interference::LatticeCdfOptions opt;
        opt.threads = threads;
        return interference::cdf_bl_talbot(spec, grid, opt);
    }
    if (spec.is_worst_case()) return interference::cdf_levy_closed(spec, grid);
    return interference::cdf_ppp(spec, grid);
}

inline double lane_mean(double (*f)(const DerivedConstants&, const Lane&, const MediumAccess&),
                        const Scenario& s) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.lanes.size(); ++i) {
        const auto c = derive(s, i);
        if (c.delta_o == 0.0 && c.offset == 0.0 && s.access.duty_cycle > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        total += f(c, s.lanes[i], s.access);
    }
    return total;
}

inline double mean_ppp(const DerivedConstants& c, const Lane& l, const MediumAccess& a) {
    return c.offset > 0.0 ? interference::mean_ppp_exact(c, l, a) : interference::mean_simplified(c, l, a);
}

inline double mean_simplified_or_nan(const DerivedConstants& c, const Lane& l, const MediumAccess& a) {
    return c.delta_o > 0.0 ? interference::mean_simplified(c, l, a) : std::numeric_limits<double>::quiet_NaN();
}

// Rows for one scenario; the sweep column is prepended by the caller.
class Runner {
public:
    Runner(const RunSpec& spec, std::size_t sweep_index) : spec_(spec), sweep_index_(sweep_index) {}

    std::vector<std::string> columns() const {
        switch (spec_.command) {
            case Command::Mean: {
                std::vector<std::string> c{"mean_ppp_watts", "mean_simplified_watts", "mean_bl_watts"};
                if (spec_.mc) c.insert(c.end(), {"mean_mc_watts", "mean_mc_ci99_watts"});
                return c;
            }
            case Command::Cdf: {
                std::vector<std::string> c{"x_watts", "cdf", "method"};
                if (spec_.mc) c.push_back("cdf_mc");
                return c;
            }
            case Command::Ps: {
                std::vector<std::string> c{"range_m", "p_success", "p_success_wc"};
                if (spec_.mc) c.insert(c.end(), {"p_success_mc", "p_success_mc_ci99_lower", "p_success_mc_ci99_upper"});
                return c;
            }
            case Command::Optimize:
                return {"range_m", "lambda_i_per_m", "beta_per_m", "lambda_i_star_per_m", "xi_star",
                        "beta_star_per_m", "xi_star_clamped"};
            case Command::DutyCycle:
                return {"n", "xi_bar_star", "asymptote", "method"};
            case Command::Mc:
                return {"replicates", "seed", "mean_watts", "mean_ci99_watts", "q001_watts", "q010_watts",
                        "q050_watts", "q090_watts", "q099_watts"};
            case Command::Converge:
                return {"delta_m", "duty_cycle", "chi_square", "dof", "p_value", "tv_distance"};
        }
        return {};
    }

    std::vector<std::vector<Cell>> rows(const Scenario& s) const {
        switch (spec_.command) {
            case Command::Mean: return mean(s);
            case Command::Cdf: return cdf(s);
            case Command::Ps: return ps(s);
            case Command::Optimize: return optimize(s);
            case Command::DutyCycle: return duty_cycle(s);
            case Command::Mc: return mc(s);
            case Command::Converge: return converge(s);
        }
        return {};
    }

private:
    const RunSpec& spec_;
    std::size_t sweep_index_;

    std::vector<double> samples(const Scenario& s, const montecarlo::McConfig& mc) const {
        auto v = montecarlo::interference_samples(s, mc);
        if (!spec_.dump_path.empty()) montecarlo::write_samples_binary(dump_name(spec_, sweep_index_), v);
        return v;
    }

    std::vector<std::vector<Cell>> mean(const Scenario& s) const {
        std::vector<Cell> row{lane_mean(mean_ppp, s), lane_mean(mean_simplified_or_nan, s),
                              lane_mean(interference::mean_bl, s)};
        if (spec_.mc) {
            const auto r = montecarlo::mc_interference(s, spec_.mc_config);
            if (!spec_.dump_path.empty()) montecarlo::write_samples_binary(dump_name(spec_, sweep_index_), r.samples);
            row.emplace_back(r.mean.value);
            row.emplace_back(r.mean.ci_halfwidth);
        }
        return {row};
    }

    std::vector<std::vector<Cell>> cdf(const Scenario& s) const {
        std::vector<double> mc_samples;
        std::vector<double> grid;
        if (spec_.mc) mc_samples = samples(s, spec_.mc_config);
        if (spec_.grid) {
            grid = spec_.grid->values();
        } else {
            const auto pilot = spec_.mc ? mc_samples
                                        : montecarlo::interference_samples(
                                              s, with_replicates(spec_.mc_config,
                                                                 std::min<std::size_t>(2000, spec_.mc_config.replicates)));
            grid = auto_cdf_grid(pilot, 60);
        }
        const auto curve = analytic_cdf(s, grid, spec_.mc_config.threads);
        DistributionCurve ecdf;
        if (spec_.mc) ecdf = montecarlo::empirical_cdf(mc_samples);
        std::vector<std::vector<Cell>> out;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<Cell> row{grid[i], curve.cdf[i], std::string(to_string(curve.method_at(i)))};
            if (spec_.mc) row.emplace_back(ecdf(grid[i]));
            out.push_back(std::move(row));
        }
        return out;
    }

    std::vector<double> ranges(double from, double to, std::size_t points) const {
        return spec_.grid ? spec_.grid->values() : Axis{from, to, points, false}.values();
    }

    std::vector<std::vector<Cell>> ps(const Scenario& s) const {
        const auto r = ranges(10.0, 250.0, 25);
        const auto consts = derive(s, 0);
        const double noise = s.radar.noise_power;
        // budgets S/T - N decrease with R; invert once over the positive ones
        std::vector<double> budget(r.size());
        std::vector<double> grid;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] > 0.0)) throw InvariantError("grid", "ranges must be > 0");
            budget[i] = performance::interference_budget(consts, r[i], noise);
            if (budget[i] > 0.0) grid.push_back(budget[i]);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        const auto spec = interference::CfSpec::from_scenario(s);
        std::optional<DistributionCurve> curve;
        if (!grid.empty()) curve = analytic_cdf(s, grid, spec_.mc_config.threads);
        const auto worst = spec.worst_case();
        std::optional<performance::PerformanceCurve> mc;
        if (spec_.mc) mc = montecarlo::ranging_success_from_samples(samples(s, spec_.mc_config), consts, r);
        std::vector<std::vector<Cell>> out;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double x = budget[i];
            const double general = x > 0.0 ? std::clamp((*curve)(x), 0.0, 1.0) : 0.0;
            const double wc = x > 0.0 ? interference::levy_cdf(worst, x) : 0.0;
            std::vector<Cell> row{r[i], general, wc};
            if (mc) {
                row.emplace_back(mc->values[i]);
                row.emplace_back(mc->ci_lower[i]);
                row.emplace_back(mc->ci_upper[i]);
            }
            out.push_back(std::move(row));
        }
        return out;
    }

    std::vector<std::vector<Cell>> optimize(const Scenario& s) const {
        const auto r = ranges(50.0, 150.0, 3);
        const auto lambdas = spec_.lambda_grid ? spec_.lambda_grid->values() : Axis{1e-4, 1e-1, 100, true}.values();
        const auto consts = derive(s, 0);
        std::vector<std::vector<Cell>> out;
        for (double range : r) {
            const auto opt = performance::optimal_duty_cycle(s.lanes[0], consts, range);
            for (double li : lambdas) {
                out.push_back({range, li, performance::spatial_success(li, consts, range), opt.lambda_i_star,
                               opt.xi_star, opt.beta_star, std::string(opt.clamped ? "true" : "false")});
            }
        }
        return out;
    }

    std::vector<std::vector<Cell>> duty_cycle(const Scenario& s) const {
        std::vector<int> orders;
        if (spec_.grid) {
            for (double v : spec_.grid->values()) {
                const int n = static_cast<int>(std::lround(v));
                if (n < 1) throw InvariantError("grid", "orders n must be >= 1");
                if (orders.empty() || n != orders.back()) orders.push_back(n);
            }
        } else {
            for (int n = 1; n <= 30; ++n) orders.push_back(n);
        }
        const auto consts = derive(s, 0);
        const auto curve = performance::duty_cycle_curve(s.lanes[0], consts, orders);
        std::vector<std::vector<Cell>> out;
        for (std::size_t i = 0; i < orders.size(); ++i) {
            out.push_back({static_cast<double>(orders[i]), curve.values[i],
                           performance::duty_cycle_asymptote(s.lanes[0], consts, orders[i]),
                           std::string(orders[i] >= 3 ? "closed_form" : "quadrature")});
        }
        return out;
    }

    std::vector<std::vector<Cell>> mc(const Scenario& s) const {
        const auto r = montecarlo::mc_interference(s, spec_.mc_config);
        if (!r.warning.empty()) std::cerr << "warning: " << r.warning << '\n';
        if (!spec_.dump_path.empty()) montecarlo::write_samples_binary(dump_name(spec_, sweep_index_), r.samples);
        auto sorted = r.samples;
        std::sort(sorted.begin(), sorted.end());
        const auto q = [&](double p) { return sorted[static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1))]; };
        return {{static_cast<double>(spec_.mc_config.replicates), std::to_string(spec_.mc_config.master_seed),
                 r.mean.value, r.mean.ci_halfwidth, q(0.01), q(0.10), q(0.50), q(0.90), q(0.99)}};
    }

    // Spacings halve from xi = 1 until xi <= 0.01 at the scenario's lambda_I.
    std::vector<std::vector<Cell>> converge(const Scenario& s) const {
        const double li = s.access.duty_cycle * s.lanes[0].density;
        if (!(li > 0.0)) throw InvariantError("access.duty_cycle", "converge requires lambda_I > 0");
        std::vector<double> deltas;
        for (double d = 1.0 / li;; d *= 0.5) {
            deltas.push_back(d);
            if (d * li <= 0.01) break;
        }
        const auto iv = montecarlo::equal_intervals(0.0, spec_.mc_config.window, 20);
        const auto rows = montecarlo::mc_convergence_bl_to_ppp(li, deltas, iv, spec_.mc_config);
        std::vector<std::vector<Cell>> out;
        for (const auto& row : rows) {
            out.push_back({row.delta, row.duty_cycle, row.gof.chi_square, row.gof.dof, row.gof.p_value,
                           row.gof.tv_distance});
        }
        return out;
    }
};

}  // namespace detail

// Computes the table for a RunSpec without writing it.
inline Table execute(const RunSpec& spec, const Scenario& base) {
    spec.validate();
    const detail::Runner runner0(spec, 0);
    Table t;
    if (spec.sweep) t.columns.push_back(sweep_column(spec.sweep->name));
    for (auto& c : runner0.columns()) t.columns.push_back(c);
    const std::vector<double> sweep_values = spec.sweep ? spec.sweep->axis.values() : std::vector<double>{0.0};
    for (std::size_t k = 0; k < sweep_values.size(); ++k) {
        Scenario s = base;
        if (spec.sweep) {
            io::set_field(s, spec.sweep->name, sweep_values[k]);
            try {
                s.validate();
            } catch (const InvariantError& e) {
                throw InvariantError("sweep", spec.sweep->name + " = " + io::format_double(sweep_values[k]) + ": " +
                                                  e.what());
            }
        }
        const detail::Runner runner(spec, k);
        for (auto& row : runner.rows(s)) {
            if (spec.sweep) row.insert(row.begin(), sweep_values[k]);
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

inline Table execute(const RunSpec& spec) {
    spec.validate();
    return execute(spec, io::parse_scenario(detail::read_file(spec.scenario_path)));
}

inline void write_table(std::ostream& os, const Table& t, Format format, Command command) {
    if (format == Format::Csv) write_csv(os, t);
    else write_json(os, t, command);
}

inline std::string error_json(const std::string& kind, const std::string& field, const std::string& message) {
    nlohmann::ordered_json e;
    e["error"] = kind;
    if (!field.empty()) e["field"] = field;
    e["message"] = message;
    return e.dump();
}

// Exit status: 0 success, 2 invalid input, 1 computation failure. Errors are
// one JSON object on `err`.
inline int run(const RunSpec& spec, std::ostream& err = std::cerr) {
    try {
        const auto table = execute(spec);
        if (spec.output_path == "-") {
            write_table(std::cout, table, spec.format, spec.command);
            std::cout.flush();
        } else {
            std::ofstream f(spec.output_path, std::ios::binary);
            if (!f) throw InvariantError("out", "cannot open '" + spec.output_path + "' for writing");
            write_table(f, table, spec.format, spec.command);
            if (!f) throw InvariantError("out", "write to '" + spec.output_path + "' failed");
        }
        return 0;
    } catch (const SchemaError& e) {
        err << error_json("schema_error", e.field(), e.what()) << '\n';
        return 2;
    } catch (const InvariantError& e) {
        err << error_json("invariant_error", e.field(), e.what()) << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << error_json("domain_error", "", e.what()) << '\n';
        return 1;
    } catch (const DivergenceError& e) {
        err << error_json("divergence_error", "", e.what()) << '\n';
        return 1;
    } catch (const ConvergenceError& e) {
        err << error_json("convergence_error", "", e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << error_json("error", "", e.what()) << '\n';
        return 1;
    }
}

}  // namespace radarsg::cli
