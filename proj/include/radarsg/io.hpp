#pragma once

// Scenario files. Quantities are SI and linear unless the key carries a
// `_db`, `_dbm` or `_dbsm` suffix, which is converted on parse. Every
// quantity accepts exactly one of its spellings.
//
// {
//   "radar": {"tx_power_dbm": 10, "antenna_gain_db": 45, "beamwidth_deg": 15,
//             "frequency_hz": 76.5e9, "rcs_dbsm": 30, "sinr_threshold_db": 10,
//             "pathloss_exp": 2, "noise_power_w": 0},
//   "lanes": [{"offset_m": 10, "density_per_m": 0.1}],
//   "access": {"duty_cycle": 0.1},
//   "fading": "unit",
//   "geometry": "ppp",
//   "neglect_offset_in_distance": false
// }

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "radarsg/errors.hpp"
#include "radarsg/model.hpp"

namespace radarsg::io {

using nlohmann::json;

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw SchemaError(where, "must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw SchemaError(where.empty() ? key : where + "." + key, "unknown field");
    }
}

inline double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw SchemaError(field, "must be a number");
    return v.get<double>();
}

struct Spelling {
    std::string key;
    double (*convert)(double);
};

// Exactly one spelling of a quantity; nullopt if none is present.
inline std::optional<double> quantity(const json& obj, const std::string& where, const std::string& name,
                                      const std::vector<Spelling>& spellings) {
    std::optional<double> out;
    std::string seen;
    for (const auto& s : spellings) {
        if (!obj.contains(s.key)) continue;
        if (out) throw SchemaError(where + "." + s.key, "conflicts with " + seen);
        out = s.convert(number(obj.at(s.key), where + "." + s.key));
        seen = s.key;
    }
    (void)name;
    return out;
}

inline double required(const json& obj, const std::string& where, const std::string& name,
                       const std::vector<Spelling>& spellings) {
    const auto v = quantity(obj, where, name, spellings);
    if (!v) throw SchemaError(where + "." + name, "missing required field");
    return *v;
}

inline double identity(double x) { return x; }
inline double from_deg(double x) { return deg_to_rad(x); }

// Re-labels invariant failures with their position in the file.
inline std::string scenario_path(const std::string& field) {
    static const std::map<std::string, std::string> paths = {
        {"tx_power", "radar.tx_power"},         {"antenna_gain", "radar.antenna_gain"},
        {"beamwidth", "radar.beamwidth"},       {"frequency", "radar.frequency"},
        {"rcs", "radar.rcs"},                   {"sinr_threshold", "radar.sinr_threshold"},
        {"pathloss_exp", "radar.pathloss_exp"}, {"noise_power", "radar.noise_power"},
        {"duty_cycle", "access.duty_cycle"},
    };
    const auto it = paths.find(field);
    return it == paths.end() ? field : it->second;
}

}  // namespace detail

inline Scenario parse_scenario(const json& doc) {
    using detail::Spelling;
    detail::reject_unknown(doc, "", {"radar", "lanes", "access", "fading", "geometry", "neglect_offset_in_distance"});
    for (const char* key : {"radar", "lanes", "access"}) {
        if (!doc.contains(key)) throw SchemaError(key, "missing required field");
    }
    Scenario s;

    const auto& r = doc.at("radar");
    detail::reject_unknown(r, "radar",
                           {"tx_power_w", "tx_power_dbm", "antenna_gain", "antenna_gain_db", "beamwidth_deg",
                            "beamwidth_rad", "frequency_hz", "rcs_m2", "rcs_dbsm", "sinr_threshold",
                            "sinr_threshold_db", "pathloss_exp", "noise_power_w", "noise_power_dbm"});
    s.radar.tx_power = detail::required(r, "radar", "tx_power_w",
                                        {{"tx_power_w", detail::identity}, {"tx_power_dbm", dbm_to_watts}});
    s.radar.antenna_gain = detail::required(
        r, "radar", "antenna_gain", {{"antenna_gain", detail::identity}, {"antenna_gain_db", db_to_linear}});
    s.radar.beamwidth = detail::required(r, "radar", "beamwidth_deg",
                                         {{"beamwidth_deg", detail::from_deg}, {"beamwidth_rad", detail::identity}});
    s.radar.frequency = detail::required(r, "radar", "frequency_hz", {{"frequency_hz", detail::identity}});
    s.radar.rcs = detail::required(r, "radar", "rcs_m2", {{"rcs_m2", detail::identity}, {"rcs_dbsm", db_to_linear}});
    s.radar.sinr_threshold = detail::required(
        r, "radar", "sinr_threshold", {{"sinr_threshold", detail::identity}, {"sinr_threshold_db", db_to_linear}});
    s.radar.pathloss_exp = detail::required(r, "radar", "pathloss_exp", {{"pathloss_exp", detail::identity}});
    s.radar.noise_power =
        detail::quantity(r, "radar", "noise_power_w",
                         {{"noise_power_w", detail::identity}, {"noise_power_dbm", dbm_to_watts}})
            .value_or(0.0);

    const auto& lanes = doc.at("lanes");
    if (!lanes.is_array()) throw SchemaError("lanes", "must be an array");
    s.lanes.clear();
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        const std::string where = "lanes[" + std::to_string(i) + "]";
        detail::reject_unknown(lanes[i], where, {"offset_m", "density_per_m"});
        Lane lane;
        lane.offset = detail::required(lanes[i], where, "offset_m", {{"offset_m", detail::identity}});
        lane.density = detail::required(lanes[i], where, "density_per_m", {{"density_per_m", detail::identity}});
        s.lanes.push_back(lane);
    }

    const auto& access = doc.at("access");
    detail::reject_unknown(access, "access", {"duty_cycle"});
    s.access.duty_cycle = detail::required(access, "access", "duty_cycle", {{"duty_cycle", detail::identity}});

    if (doc.contains("fading")) {
        const auto& f = doc.at("fading");
        if (!f.is_string()) throw SchemaError("fading", "must be \"unit\" or \"rayleigh\"");
        const auto name = f.get<std::string>();
        if (name == "unit") {
            s.fading = FadingModel::unit();
        } else if (name == "rayleigh") {
            s.fading = FadingModel::rayleigh();
        } else {
            throw SchemaError("fading", "must be \"unit\" or \"rayleigh\"");
        }
    }
    if (doc.contains("geometry")) {
        const auto& g = doc.at("geometry");
        const auto name = g.is_string() ? g.get<std::string>() : std::string();
        if (name == "ppp") {
            s.geometry = Geometry::PPP;
        } else if (name == "bernoulli_lattice") {
            s.geometry = Geometry::BernoulliLattice;
        } else {
            throw SchemaError("geometry", "must be \"ppp\" or \"bernoulli_lattice\"");
        }
    }
    if (doc.contains("neglect_offset_in_distance")) {
        const auto& v = doc.at("neglect_offset_in_distance");
        if (!v.is_boolean()) throw SchemaError("neglect_offset_in_distance", "must be a boolean");
        s.neglect_offset_in_distance = v.get<bool>();
    }

    try {
        s.validate();
    } catch (const SchemaError&) {
        throw;
    } catch (const InvariantError& e) {
        throw InvariantError(detail::scenario_path(e.field()), e.what());
    }
    return s;
}

inline Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

// Scenario fields that a sweep may vary, in SI linear units. Lane fields
// apply to every lane.
inline const std::vector<std::string>& sweepable_fields() {
    static const std::vector<std::string> names = {
        "tx_power", "antenna_gain", "beamwidth", "frequency", "rcs", "sinr_threshold", "pathloss_exp",
        "noise_power", "offset", "density", "duty_cycle"};
    return names;
}

inline void set_field(Scenario& s, const std::string& name, double value) {
    if (name == "tx_power") s.radar.tx_power = value;
    else if (name == "antenna_gain") s.radar.antenna_gain = value;
    else if (name == "beamwidth") s.radar.beamwidth = value;
    else if (name == "frequency") s.radar.frequency = value;
    else if (name == "rcs") s.radar.rcs = value;
    else if (name == "sinr_threshold") s.radar.sinr_threshold = value;
    else if (name == "pathloss_exp") s.radar.pathloss_exp = value;
    else if (name == "noise_power") s.radar.noise_power = value;
    else if (name == "offset") for (auto& l : s.lanes) l.offset = value;
    else if (name == "density") for (auto& l : s.lanes) l.density = value;
    else if (name == "duty_cycle") s.access.duty_cycle = value;
    else throw SchemaError("sweep", "'" + name + "' is not a scenario field");
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) throw DomainError("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

}  // namespace radarsg::io
