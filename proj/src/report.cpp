#include "qmlab/report.hpp"

#include <sstream>

namespace qmlab {

BoundReport make_bound(std::string proposition, double lhs, double rhs, double scale,
                       double tolerance) {
  BoundReport r;
  r.proposition = std::move(proposition);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.scale = scale;
  r.tolerance = tolerance;
  r.evaluate();
  return r;
}

BoundReport vacuous_bound(std::string proposition, std::string note) {
  BoundReport r;
  r.proposition = std::move(proposition);
  r.vacuous = true;
  r.note = std::move(note);
  r.evaluate();
  return r;
}

std::string instance_digest(const std::vector<std::string>& parts) {
  std::string joined;
  for (const auto& p : parts) {
    joined += p;
    joined += '\n';
  }
  return hex64(fnv1a(joined));
}

Json report_to_json(const BoundReport& r) {
  Json j;
  j["proposition-id"] = r.proposition;
  j["seed"] = r.seed;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["scale"] = r.scale;
  j["normalized-slack"] = r.normalized_slack();
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["vacuous"] = r.vacuous;
  j["instance-digest"] = r.digest;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.aux.empty()) {
    Json aux;
    for (const auto& [k, v] : r.aux) aux[k] = v;
    j["aux"] = aux;
  }
  return j;
}

BoundReport report_from_json(const Json& j) {
  BoundReport r;
  r.proposition = j.at("proposition-id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.slack = j.at("slack").get<double>();
  r.scale = j.at("scale").get<double>();
  r.tolerance = j.value("tolerance", 1e-8);
  r.pass = j.at("pass").get<bool>();
  r.vacuous = j.value("vacuous", false);
  r.digest = j.value("instance-digest", std::string());
  r.note = j.value("note", std::string());
  if (j.contains("aux"))
    for (auto it = j["aux"].begin(); it != j["aux"].end(); ++it) r.aux[it.key()] = it.value().get<double>();
  return r;
}

std::string report_csv_header() {
  return "proposition-id,seed,lhs,rhs,slack,scale,normalized-slack,pass,vacuous,instance-digest";
}

std::string report_csv_row(const BoundReport& r) {
  std::ostringstream out;
  out << r.proposition << ',' << r.seed << ',' << format_double(r.lhs) << ',' << format_double(r.rhs)
      << ',' << format_double(r.slack) << ',' << format_double(r.scale) << ','
      << format_double(r.normalized_slack()) << ',' << (r.pass ? "true" : "false") << ','
      << (r.vacuous ? "true" : "false") << ',' << r.digest;
  return out.str();
}

}  // namespace qmlab
