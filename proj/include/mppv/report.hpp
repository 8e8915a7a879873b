#pragma once
// Report rendering. One VerificationReport, three renderings: JSON for
// machines, CSV (fixed columns: check_id, assertion_tag, statistic,
// threshold, verdict) for CI diffing, aligned text for eyes. All three are
// deterministic byte-for-byte for a fixed config and seed: keys are emitted
// in declaration order and floats are printed with round-trip precision.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mppv/errors.hpp"
#include "mppv/verify.hpp"

namespace mppv {

namespace detail {

inline std::string round_trip(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const VerificationReport& rep) {
  nlohmann::ordered_json root;
  root["scenario"] = rep.scenario_name;
  root["version"] = rep.version;
  root["master_seed"] = rep.master_seed;
  root["control"] = rep.control;
  root["overall"] = rep.overall_pass() ? "pass" : "fail";
  nlohmann::ordered_json tol;
  tol["exact_identity"] = rep.tolerances.exact_identity;
  tol["z_threshold"] = rep.tolerances.z_threshold;
  tol["coverage"] = rep.tolerances.coverage;
  tol["pit_p_min"] = rep.tolerances.pit_p_min;
  tol["control_z"] = rep.tolerances.control_z;
  tol["rate_identity"] = rep.tolerances.rate_identity;
  root["tolerances"] = std::move(tol);
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks) {
    nlohmann::ordered_json row;
    row["check_id"] = c.check_id;
    row["assertion_tag"] = c.assertion_tag;
    row["statistic"] = c.statistic;
    row["threshold"] = c.threshold;
    row["verdict"] = verdict_name(c.verdict);
    row["note"] = c.note;
    checks.push_back(std::move(row));
  }
  root["checks"] = std::move(checks);
  return root;
}

inline std::string report_to_csv(const VerificationReport& rep) {
  std::string out = "check_id,assertion_tag,statistic,threshold,verdict\n";
  for (const auto& c : rep.checks) {
    out += c.check_id;
    out += ',';
    out += c.assertion_tag;
    out += ',';
    out += detail::round_trip(c.statistic);
    out += ',';
    out += detail::round_trip(c.threshold);
    out += ',';
    out += verdict_name(c.verdict);
    out += '\n';
  }
  return out;
}

inline std::string report_to_text(const VerificationReport& rep) {
  std::string out = "scenario " + rep.scenario_name + "  seed " +
                    std::to_string(rep.master_seed) + (rep.control ? "  [control]" : "") +
                    "  overall: " + (rep.overall_pass() ? "PASS" : "FAIL") + "\n";
  std::size_t id_width = 8;
  for (const auto& c : rep.checks) id_width = std::max(id_width, c.check_id.size());
  char line[160];
  std::snprintf(line, sizeof(line), "%-*s  %-10s  %12s  %12s  %-7s  %s\n",
                static_cast<int>(id_width), "check_id", "tag", "statistic", "threshold",
                "verdict", "note");
  out += line;
  for (const auto& c : rep.checks) {
    std::snprintf(line, sizeof(line), "%-*s  %-10s  %12.6g  %12.6g  %-7s  ",
                  static_cast<int>(id_width), c.check_id.c_str(), c.assertion_tag.c_str(),
                  c.statistic, c.threshold, std::string(verdict_name(c.verdict)).c_str());
    out += line;
    out += c.note;
    out += '\n';
  }
  return out;
}

// Writes <name>.report.<ext> per requested format into dir (created if
// absent). Returns the paths written, in format order.
inline std::vector<std::string> write_report_files(const VerificationReport& rep,
                                                   const std::string& dir,
                                                   const std::vector<std::string>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir.empty() ? "." : dir, ec);
  if (ec) throw ConfigError("report: cannot create output directory '" + dir + "'");
  std::vector<std::string> written;
  for (const auto& format : formats) {
    std::string ext, payload;
    if (format == "json") {
      ext = "json";
      payload = report_to_json(rep).dump(2);
      payload += '\n';
    } else if (format == "csv") {
      ext = "csv";
      payload = report_to_csv(rep);
    } else if (format == "text") {
      ext = "txt";
      payload = report_to_text(rep);
    } else {
      throw ConfigError("report: unknown format '" + format + "'");
    }
    const std::filesystem::path path =
        std::filesystem::path(dir.empty() ? "." : dir) / (rep.scenario_name + ".report." + ext);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("report: cannot write '" + path.string() + "'");
    file << payload;
    written.push_back(path.string());
  }
  return written;
}

}  // namespace mppv
