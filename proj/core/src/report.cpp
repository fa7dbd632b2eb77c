#include "coherentcast/report.hpp"

#include <cmath>

#include <json.hpp>

#include "coherentcast/csv.hpp"

namespace coherentcast {

namespace {

using nlohmann::json;

json finite_or_marker(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json anova_json(const AnovaResult& r) {
    return {{"F", finite_or_marker(r.f)}, {"p", r.p}, {"df_between", r.df_between}, {"df_within", r.df_within}};
}

std::string level_name(double level) { return format_number(level); }

std::string number_or(const std::optional<double>& v) { return v ? format_number(*v) : "undefined"; }

std::string f_text(double f) { return std::isinf(f) ? "inf" : format_number(f); }

}  // namespace

std::string report_json(const EvalReport& r) {
    json j;
    j["methods"] = r.methods;
    j["series"] = json::array();
    for (const auto& s : r.series) {
        json e{{"series", s.series}, {"method", s.method}, {"MAE", s.mae}, {"RMSE", s.rmse}, {"ES", s.energy}};
        for (const auto& [lag, v] : s.mase) e["MASE(" + std::to_string(lag) + ")"] = v ? json(*v) : json("undefined");
        for (const auto& [level, v] : s.ql) e["QL(" + level_name(level) + ")"] = v;
        for (const auto& [level, v] : s.ws) e["WS(" + level_name(level) + ")"] = v;
        j["series"].push_back(std::move(e));
    }
    j["summary"] = json::array();
    for (const auto& m : r.summaries) {
        j["summary"].push_back({{"method", m.method},
                                {"energy_per_step", m.energy_per_step},
                                {"energy_flattened", m.energy_flattened},
                                {"max_coherency_gap", m.max_coherency_gap},
                                {"min_value", m.min_value},
                                {"observations", m.observations}});
    }
    j["anova"]["overall"] = anova_json(r.anova.overall);
    j["anova"]["pairwise"] = json::array();
    for (const auto& p : r.anova.pairwise) {
        json e = anova_json(p.result);
        e["first"] = r.methods.at(p.first);
        e["second"] = r.methods.at(p.second);
        j["anova"]["pairwise"].push_back(std::move(e));
    }
    return j.dump(1);
}

std::string metrics_csv(const EvalReport& r) {
    std::string out = "series,method,MAE,RMSE";
    if (!r.series.empty()) {
        const auto& first = r.series.front();
        for (const auto& [lag, v] : first.mase) out += ",MASE(" + std::to_string(lag) + ")";
        for (const auto& [level, v] : first.ql) out += ",QL(" + level_name(level) + ")";
        for (const auto& [level, v] : first.ws) out += ",WS(" + level_name(level) + ")";
    }
    out += ",ES\n";
    for (const auto& s : r.series) {
        out += s.series + "," + s.method + "," + format_number(s.mae) + "," + format_number(s.rmse);
        for (const auto& [lag, v] : s.mase) out += "," + number_or(v);
        for (const auto& [level, v] : s.ql) out += "," + format_number(v);
        for (const auto& [level, v] : s.ws) out += "," + format_number(v);
        out += "," + format_number(s.energy) + "\n";
    }
    return out;
}

std::string anova_csv(const EvalReport& r) {
    std::string out = "method_a,method_b,F,p,df_between,df_within\n";
    auto row = [&](const std::string& a, const std::string& b, const AnovaResult& x) {
        out += a + "," + b + "," + f_text(x.f) + "," + format_number(x.p) + "," + format_number(x.df_between) + "," +
               format_number(x.df_within) + "\n";
    };
    row("all", "all", r.anova.overall);
    for (const auto& p : r.anova.pairwise) row(r.methods.at(p.first), r.methods.at(p.second), p.result);
    return out;
}

std::string summary_csv(const EvalReport& r) {
    std::string out = "method,energy_per_step,energy_flattened,max_coherency_gap,min_value,observations\n";
    for (const auto& m : r.summaries) {
        out += m.method + "," + format_number(m.energy_per_step) + "," + format_number(m.energy_flattened) + "," +
               format_number(m.max_coherency_gap) + "," + format_number(m.min_value) + "," +
               std::to_string(m.observations) + "\n";
    }
    return out;
}

}  // namespace coherentcast
