/*
* Copyright (C) 2026 Epizone
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "epizone_cli/app.h"
#include "epizone/csv.h"

#include <fstream>
#include <set>

namespace epizone::cli
{

namespace
{

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& known, const std::string& where)
{
    if (!obj.is_object()) {
        throw Error(ErrorCode::InvalidConfig, where + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) {
            throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + where);
        }
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    if (path.empty() || path.is_absolute() || base.empty()) {
        return path;
    }
    return base / path;
}

} // namespace

GraphMode GraphMode::parse(const std::string& text)
{
    if (text == "auto") {
        return {GraphKind::Auto, 0};
    }
    if (text == "contiguity") {
        return {GraphKind::Contiguity, 0};
    }
    if (text == "gabriel") {
        return {GraphKind::Gabriel, 0};
    }
    if (text.rfind("knn:", 0) == 0) {
        try {
            std::size_t used = 0;
            int k = std::stoi(text.substr(4), &used);
            if (used == text.size() - 4 && k >= 1) {
                return {GraphKind::Knn, k};
            }
        }
        catch (const std::exception&) {
        }
    }
    throw Error(ErrorCode::InvalidConfig, "graph must be auto, contiguity, gabriel or knn:K, got '" + text + "'");
}

std::string GraphMode::to_string() const
{
    switch (kind) {
    case GraphKind::Auto:
        return "auto";
    case GraphKind::Contiguity:
        return "contiguity";
    case GraphKind::Gabriel:
        return "gabriel";
    case GraphKind::Knn:
        return "knn:" + std::to_string(knn);
    }
    return "auto";
}

nlohmann::ordered_json PipelineConfig::to_json() const
{
    nlohmann::ordered_json j;
    j["mode"] = mode == PipelineMode::Cases ? "cases" : "excess_mortality";
    j["incidence"] = incidence.generic_string();
    j["incidence_kind"] = cumulative_input ? "cumulative" : "daily";
    j["geometry"] = geometry.generic_string();
    j["mortality"] = mortality.generic_string();
    j["aggregation"] = aggregation.generic_string();
    j["target_year"] = target_year;
    j["baseline_years"] = baseline_years;
    j["reference_week"] = reference_week;
    j["start_date"] = start_date ? nlohmann::ordered_json(start_date->to_string()) : nlohmann::ordered_json();
    j["end_date"] = end_date ? nlohmann::ordered_json(end_date->to_string()) : nlohmann::ordered_json();
    j["si"] = {{"mean", si.mean}, {"sd", si.sd}, {"max_lag", si.max_lag}};
    j["smooth_window"] = smooth_window;
    j["dtw"] = {{"step", epizone::to_string(dtw.step_pattern)},
                {"normalize", dtw.normalize},
                {"window", dtw.window ? nlohmann::ordered_json(*dtw.window) : nlohmann::ordered_json()}};
    j["graph"] = graph.to_string();
    j["k"] = k;
    j["min_size"] = min_size;
    j["objective"] = epizone::to_string(objective);
    j["algorithm"] = algorithm == Algorithm::Skater ? "skater" : "grow";
    j["seed"] = seed;
    j["out"] = out.generic_string();
    return j;
}

void PipelineConfig::validate() const
{
    if (mode == PipelineMode::Cases && incidence.empty()) {
        throw Error(ErrorCode::InvalidConfig, "cases mode needs an incidence file");
    }
    if (mode == PipelineMode::ExcessMortality && mortality.empty()) {
        throw Error(ErrorCode::InvalidConfig, "excess_mortality mode needs a mortality file");
    }
    if (geometry.empty()) {
        throw Error(ErrorCode::InvalidConfig, "a geometry file is required");
    }
    if (k < 1) {
        throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
    }
    validate_parameters();
}

void PipelineConfig::validate_parameters() const
{
    auto bad = [](const std::string& msg) {
        return Error(ErrorCode::InvalidConfig, msg);
    };
    if (k < 0) {
        throw bad("k must be >= 1");
    }
    if (min_size < 1) {
        throw bad("min_size must be >= 1");
    }
    if (smooth_window < 1 || smooth_window % 2 == 0) {
        throw bad("smooth_window must be odd and >= 1");
    }
    if (!(si.mean > 0) || !(si.sd > 0) || si.max_lag < 1) {
        throw bad("si needs mean > 0, sd > 0, max_lag >= 1");
    }
    if (dtw.window && *dtw.window < 0) {
        throw bad("dtw.window must be >= 0");
    }
    if (reference_week < 1) {
        throw bad("reference_week must be >= 1");
    }
    if (start_date && end_date && *end_date < *start_date) {
        throw bad("end_date precedes start_date");
    }
}

PipelineConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir)
{
    reject_unknown(doc,
                   {"mode", "incidence", "incidence_kind", "geometry", "mortality", "aggregation", "target_year",
                    "baseline_years", "reference_week", "start_date", "end_date", "si", "smooth_window", "dtw",
                    "graph", "k", "min_size", "objective", "algorithm", "seed", "out"},
                   "config");
    PipelineConfig c;
    try {
        if (doc.contains("mode")) {
            std::string mode = doc["mode"].get<std::string>();
            if (mode == "cases") {
                c.mode = PipelineMode::Cases;
            }
            else if (mode == "excess_mortality") {
                c.mode = PipelineMode::ExcessMortality;
            }
            else {
                throw Error(ErrorCode::InvalidConfig, "mode must be 'cases' or 'excess_mortality'");
            }
        }
        if (doc.contains("incidence")) {
            c.incidence = resolve(base_dir, doc["incidence"].get<std::string>());
        }
        if (doc.contains("incidence_kind")) {
            std::string kind = doc["incidence_kind"].get<std::string>();
            if (kind != "daily" && kind != "cumulative") {
                throw Error(ErrorCode::InvalidConfig, "incidence_kind must be 'daily' or 'cumulative'");
            }
            c.cumulative_input = kind == "cumulative";
        }
        if (doc.contains("geometry")) {
            c.geometry = resolve(base_dir, doc["geometry"].get<std::string>());
        }
        if (doc.contains("mortality")) {
            c.mortality = resolve(base_dir, doc["mortality"].get<std::string>());
        }
        if (doc.contains("aggregation")) {
            c.aggregation = resolve(base_dir, doc["aggregation"].get<std::string>());
        }
        c.target_year = doc.value("target_year", c.target_year);
        c.baseline_years = doc.value("baseline_years", c.baseline_years);
        c.reference_week = doc.value("reference_week", c.reference_week);
        if (doc.contains("start_date") && !doc["start_date"].is_null()) {
            c.start_date = Date::parse(doc["start_date"].get<std::string>());
        }
        if (doc.contains("end_date") && !doc["end_date"].is_null()) {
            c.end_date = Date::parse(doc["end_date"].get<std::string>());
        }
        if (doc.contains("si")) {
            const auto& si = doc["si"];
            reject_unknown(si, {"mean", "sd", "max_lag"}, "si");
            c.si.mean = si.value("mean", c.si.mean);
            c.si.sd = si.value("sd", c.si.sd);
            c.si.max_lag = si.value("max_lag", c.si.max_lag);
        }
        c.smooth_window = doc.value("smooth_window", c.smooth_window);
        if (doc.contains("dtw")) {
            const auto& dtw = doc["dtw"];
            reject_unknown(dtw, {"step", "normalize", "window"}, "dtw");
            if (dtw.contains("step")) {
                c.dtw.step_pattern = step_pattern_from_string(dtw["step"].get<std::string>());
            }
            c.dtw.normalize = dtw.value("normalize", c.dtw.normalize);
            if (dtw.contains("window") && !dtw["window"].is_null()) {
                c.dtw.window = dtw["window"].get<int>();
            }
        }
        if (doc.contains("graph")) {
            c.graph = GraphMode::parse(doc["graph"].get<std::string>());
        }
        c.k = doc.value("k", c.k);
        c.min_size = doc.value("min_size", c.min_size);
        if (doc.contains("objective")) {
            c.objective = objective_from_string(doc["objective"].get<std::string>());
        }
        if (doc.contains("algorithm")) {
            std::string a = doc["algorithm"].get<std::string>();
            if (a != "skater" && a != "grow") {
                throw Error(ErrorCode::InvalidConfig, "algorithm must be 'skater' or 'grow'");
            }
            c.algorithm = a == "skater" ? Algorithm::Skater : Algorithm::Grow;
        }
        c.seed = doc.value("seed", c.seed);
        if (doc.contains("out")) {
            c.out = resolve(base_dir, doc["out"].get<std::string>());
        }
    }
    catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) {
            throw;
        }
        throw Error(ErrorCode::InvalidConfig, e.message());
    }
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    auto in = open_input(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
    return config_from_json(doc, path.parent_path());
}

} // namespace epizone::cli
