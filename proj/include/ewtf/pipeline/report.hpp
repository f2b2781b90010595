// Copyright 2026 The ewtforecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ewtf/core/csv.hpp"
#include "ewtf/core/metrics.hpp"
#include "ewtf/pipeline/run.hpp"

namespace ewtf::pipeline {

/// Improvement cell text: recomputed from the stored pair, two decimals.
inline std::string improvement_cell(double baseline, double candidate) {
  return csv::format_fixed(improvement_pct(baseline, candidate), 2);
}

/// Human-readable tables: one block per scenario with its metrics, then
/// the EWT comparison laid out per leaders setting, then the leaders
/// comparison per EWT setting.
inline std::string report_text(const ForecastReport& r) {
  std::ostringstream o;
  o << "ewtforecast " << r.version << "  seed " << r.seed << "\n";
  o << "periods: " << r.n_total << " (train " << r.n_train << ", test " << r.n_test << " from " << r.first_test_period
    << ")\n";
  if (!r.leader_ids.empty()) {
    o << "opinion leaders:";
    for (const auto& id : r.leader_ids) o << ' ' << id;
    o << '\n';
  }
  o << "\nTest-set accuracy\n";
  o << std::left << std::setw(24) << "scenario" << std::setw(9) << "horizon" << std::setw(14) << "MAPE(%)" << std::setw(14)
    << "RMSE" << "RMSRE\n";
  for (const auto& s : r.scenarios)
    for (const auto& h : s.horizons)
      o << std::left << std::setw(24) << s.label << std::setw(9) << h.horizon << std::setw(14) << csv::format_fixed(h.mape, 4)
        << std::setw(14) << csv::format_fixed(h.rmse, 4) << csv::format_fixed(h.rmsre, 6) << '\n';

  for (const char* factor : {"ewt", "leaders"}) {
    bool header = false;
    for (const auto& im : r.improvements) {
      if (im.factor != factor || im.metric != "rmsre") continue;
      if (!header) {
        o << "\nRMSRE improvement from " << factor << " (candidate vs baseline)\n";
        o << std::left << std::setw(14) << "held" << std::setw(9) << "horizon" << std::setw(12) << "candidate" << std::setw(12)
          << "baseline" << "improvement(%)\n";
        header = true;
      }
      o << std::left << std::setw(14) << im.held << std::setw(9) << im.horizon << std::setw(12)
        << csv::format_fixed(im.candidate_value, 4) << std::setw(12) << csv::format_fixed(im.baseline_value, 4)
        << improvement_cell(im.baseline_value, im.candidate_value) << '\n';
    }
  }
  if (!r.warnings.empty()) {
    o << "\nwarnings:\n";
    for (const auto& w : r.warnings) o << "  - " << w << '\n';
  }
  return o.str();
}

inline std::string metrics_csv(const ForecastReport& r) {
  std::string out = "scenario,leaders,ewt,seed,horizon,n,mape,rmse,rmsre\n";
  for (const auto& s : r.scenarios)
    for (const auto& h : s.horizons)
      out += '"' + s.label + "\"," + (s.leaders ? "1," : "0,") + (s.ewt ? "1," : "0,") + std::to_string(s.seed) + ',' +
             std::to_string(h.horizon) + ',' + std::to_string(h.n) + ',' + csv::format_double(h.mape) + ',' +
             csv::format_double(h.rmse) + ',' + csv::format_double(h.rmsre) + '\n';
  return out;
}

inline std::string improvements_csv(const ForecastReport& r) {
  std::string out = "factor,held,horizon,metric,baseline,candidate,baseline_value,candidate_value,improvement_pct\n";
  for (const auto& im : r.improvements)
    out += im.factor + ',' + im.held + ',' + std::to_string(im.horizon) + ',' + im.metric + ",\"" + im.baseline + "\",\"" +
           im.candidate + "\"," + csv::format_double(im.baseline_value) + ',' + csv::format_double(im.candidate_value) + ',' +
           csv::format_double(improvement_pct(im.baseline_value, im.candidate_value)) + '\n';
  return out;
}

/// Per-horizon observed/predicted pairs, ready for plotting.
inline std::string forecasts_csv(const ForecastReport& r) {
  std::string out = "scenario,horizon,index,observed,predicted\n";
  for (const auto& s : r.scenarios)
    for (const auto& h : s.horizons)
      for (std::size_t i = 0; i < h.observed.size(); ++i)
        out += '"' + s.label + "\"," + std::to_string(h.horizon) + ',' + std::to_string(i) + ',' +
               csv::format_double(h.observed[i]) + ',' + csv::format_double(h.predicted[i]) + '\n';
  return out;
}

inline nlohmann::ordered_json report_json(const ForecastReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["version"] = r.version;
  j["seed"] = r.seed;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  j["periods"] = {{"total", r.n_total}, {"train", r.n_train}, {"test", r.n_test}, {"first_test", r.first_test_period}};
  j["leaders"] = r.leader_ids;
  j["warnings"] = r.warnings;
  ordered_json scen = ordered_json::array();
  for (const auto& s : r.scenarios) {
    ordered_json js;
    js["label"] = s.label;
    js["leaders"] = s.leaders;
    js["ewt"] = s.ewt;
    js["seed"] = s.seed;
    js["input_width"] = s.input_width;
    js["components"] = s.components;
    ordered_json hp = ordered_json::object();
    for (const auto& [k, v] : s.hyperparameters) hp[k] = v;
    js["hyperparameters"] = hp;
    if (s.cv_loss) js["cv_loss"] = *s.cv_loss;
    js["best_epochs"] = s.best_epochs;
    ordered_json hs = ordered_json::array();
    for (const auto& h : s.horizons)
      hs.push_back({{"horizon", h.horizon}, {"n", h.n}, {"mape", h.mape}, {"rmse", h.rmse}, {"rmsre", h.rmsre}});
    js["metrics"] = hs;
    scen.push_back(js);
  }
  j["scenarios"] = scen;
  ordered_json imps = ordered_json::array();
  for (const auto& im : r.improvements)
    imps.push_back({{"factor", im.factor},
                    {"held", im.held},
                    {"horizon", im.horizon},
                    {"metric", im.metric},
                    {"baseline", im.baseline},
                    {"candidate", im.candidate},
                    {"baseline_value", im.baseline_value},
                    {"candidate_value", im.candidate_value},
                    {"improvement_pct", improvement_pct(im.baseline_value, im.candidate_value)}});
  j["improvements"] = imps;
  return j;
}

/// Inverse of `report_json` for the serialized fields (models and forecast
/// paths are not part of the JSON).
inline ForecastReport report_from_json(const nlohmann::ordered_json& j) {
  try {
    ForecastReport r;
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    r.n_total = j.at("periods").at("total").get<std::size_t>();
    r.n_train = j.at("periods").at("train").get<std::size_t>();
    r.n_test = j.at("periods").at("test").get<std::size_t>();
    r.first_test_period = j.at("periods").at("first_test").get<std::string>();
    r.leader_ids = j.at("leaders").get<std::vector<std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& js : j.at("scenarios")) {
      ScenarioResult s;
      s.label = js.at("label").get<std::string>();
      s.leaders = js.at("leaders").get<bool>();
      s.ewt = js.at("ewt").get<bool>();
      s.seed = js.at("seed").get<std::uint64_t>();
      s.input_width = js.at("input_width").get<std::size_t>();
      s.components = js.at("components").get<std::size_t>();
      for (const auto& [k, v] : js.at("hyperparameters").items()) s.hyperparameters.emplace_back(k, v.get<std::string>());
      if (js.contains("cv_loss")) s.cv_loss = js.at("cv_loss").get<double>();
      s.best_epochs = js.at("best_epochs").get<std::vector<std::size_t>>();
      for (const auto& h : js.at("metrics"))
        s.horizons.push_back({h.at("horizon").get<std::size_t>(), h.at("n").get<std::size_t>(), h.at("mape").get<double>(),
                              h.at("rmse").get<double>(), h.at("rmsre").get<double>(), {}, {}});
      r.scenarios.push_back(std::move(s));
    }
    for (const auto& ji : j.at("improvements"))
      r.improvements.push_back({ji.at("factor").get<std::string>(), ji.at("held").get<std::string>(),
                                ji.at("baseline").get<std::string>(), ji.at("candidate").get<std::string>(),
                                ji.at("horizon").get<std::size_t>(), ji.at("metric").get<std::string>(),
                                ji.at("baseline_value").get<double>(), ji.at("candidate_value").get<double>(),
                                ji.at("improvement_pct").get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("report JSON: ") + e.what());
  }
}

namespace detail {

inline std::string unquote(const std::string& s) {
  return s.size() >= 2 && s.front() == '"' && s.back() == '"' ? s.substr(1, s.size() - 2) : s;
}

/// Splits a CSV line honouring double-quoted fields (no embedded quotes).
inline std::vector<std::string> split_quoted(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') quoted = !quoted;
    if (ch == ',' && !quoted) out.emplace_back();
    else out.back() += ch;
  }
  for (auto& f : out) f = unquote(csv::trim(f));
  return out;
}

}  // namespace detail

/// Replaces the numeric metric and improvement fields of `base` with the
/// values parsed from the CSV exports.
inline ForecastReport merge_csv(ForecastReport base, const std::string& metrics, const std::string& improvements) {
  std::istringstream m(metrics), im(improvements);
  std::string line;
  std::getline(m, line);
  while (std::getline(m, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_quoted(line);
    require(f.size() == 9, ErrorCode::parse_error, "metrics CSV: wrong field count");
    const auto h = static_cast<std::size_t>(csv::parse_int(f[4], "metrics CSV"));
    bool found = false;
    for (auto& s : base.scenarios)
      if (s.label == f[0])
        for (auto& hm : s.horizons)
          if (hm.horizon == h) {
            hm.n = static_cast<std::size_t>(csv::parse_int(f[5], "metrics CSV"));
            hm.mape = csv::parse_double(f[6], "metrics CSV");
            hm.rmse = csv::parse_double(f[7], "metrics CSV");
            hm.rmsre = csv::parse_double(f[8], "metrics CSV");
            found = true;
          }
    require(found, ErrorCode::parse_error, "metrics CSV: unknown scenario/horizon " + f[0]);
  }
  std::getline(im, line);
  std::size_t k = 0;
  while (std::getline(im, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_quoted(line);
    require(f.size() == 9 && k < base.improvements.size(), ErrorCode::parse_error, "improvements CSV: malformed row");
    auto& row = base.improvements[k++];
    row.baseline_value = csv::parse_double(f[6], "improvements CSV");
    row.candidate_value = csv::parse_double(f[7], "improvements CSV");
    row.improvement_pct = csv::parse_double(f[8], "improvements CSV");
  }
  return base;
}

enum class ReportFormat { text, csv, json, all };

/// Writes report.txt, metrics.csv, improvements.csv, forecasts.csv and
/// report.json (as selected) into `dir`.
inline std::vector<std::string> emit_report(const ForecastReport& r, const std::string& dir, ReportFormat format = ReportFormat::all) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const char* name, const std::string& body) {
    const auto p = (std::filesystem::path(dir) / name).string();
    csv::write_text_file(p, body);
    written.push_back(p);
  };
  if (format == ReportFormat::text || format == ReportFormat::all) put("report.txt", report_text(r));
  if (format == ReportFormat::csv || format == ReportFormat::all) {
    put("metrics.csv", metrics_csv(r));
    put("improvements.csv", improvements_csv(r));
    put("forecasts.csv", forecasts_csv(r));
  }
  if (format == ReportFormat::json || format == ReportFormat::all) put("report.json", report_json(r).dump(2) + "\n");
  return written;
}

}  // namespace ewtf::pipeline
