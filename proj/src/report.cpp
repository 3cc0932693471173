#include "nstab/report.hpp"

#include <cmath>
#include <cstdio>

namespace nstab {
namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string clock_name(Clock c) { return c == Clock::kTime ? "t" : "eta"; }

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json to_json(const BoundSpec& spec) {
  json j;
  j["theorem"] = theorem_name(spec.theorem);
  j["r"] = spec.r;
  j["rho"] = opt(spec.rho);
  j["lambda"] = opt(spec.lambda);
  j["c"] = spec.c;
  j["constant"] = spec.constant;
  j["c2"] = spec.c2;
  j["clock"] = clock_name(spec.clock);
  return j;
}

json to_json(const BoundReport& report) {
  json j;
  j["spec"] = to_json(report.spec);
  j["model"] = report.model;
  j["tolerance"] = report.tolerance;
  json rows = json::array();
  for (const auto& r : report.instances) {
    json row;
    row["function_id"] = r.function_id;
    row["t"] = r.t;
    row["eta"] = r.eta;
    row["lhs"] = r.lhs;
    row["rhs"] = r.rhs;
    row["ratio"] = opt(r.ratio);
    row["vacuous"] = r.vacuous;
    row["asserted"] = r.asserted;
    row["passed"] = r.passed;
    if (r.empirical_constant) row["empirical_constant"] = *r.empirical_constant;
    if (r.theorem_rhs) {
      row["theorem_rhs"] = *r.theorem_rhs;
      row["theorem_ratio"] = opt(r.theorem_ratio);
      row["verbatim_violation"] = r.verbatim_violation;
    }
    rows.push_back(std::move(row));
  }
  j["instances"] = std::move(rows);
  const auto& s = report.summary;
  json sum;
  sum["instance_count"] = s.instance_count;
  sum["vacuous_count"] = s.vacuous_count;
  sum["asserted_count"] = s.asserted_count;
  sum["failure_count"] = s.failure_count;
  sum["max_ratio"] = opt(s.max_ratio);
  sum["argmax"] = s.max_ratio ? json{{"function_id", s.argmax_function}, {"t", s.argmax_t}}
                              : json(nullptr);
  sum["min_empirical_constant"] = opt(s.min_empirical_constant);
  if (is_verbatim_audit(report.spec.theorem)) {
    sum["verbatim_violations"] = s.verbatim_violations;
    sum["max_theorem_ratio"] = opt(s.max_theorem_ratio);
  }
  sum["rho_used"] = opt(s.rho_used);
  sum["lambda_used"] = opt(s.lambda_used);
  sum["passed"] = report.passed();
  j["summary"] = std::move(sum);
  return j;
}

json to_json(const JuntaResult& result) {
  json j;
  j["S"] = result.coordinates;
  j["junta_size"] = result.coordinates.size();
  j["t"] = result.t;
  j["eta_threshold"] = result.eta_threshold;
  j["l1_error"] = result.l1_error;
  j["l2_tail"] = result.l2_tail;
  j["rounded"] = result.rounded;
  if (result.table) j["g"] = json(std::vector<double>(result.table->values().begin(),
                                                     result.table->values().end()));
  if (result.expansion) j["g"] = result.expansion->coefficients();
  if (result.lemma_bound) {
    j["lemma_bound"] = *result.lemma_bound;
    j["lemma_holds"] = result.lemma_holds.value_or(false);
  }
  return j;
}

json to_json(const FriedgutResult& result) {
  json j;
  j["found"] = result.found;
  j["junta_size"] = result.junta_size;
  j["achieved_error"] = result.achieved_error;
  j["total_influence"] = result.total_influence;
  j["epsilon"] = result.epsilon;
  j["best"] = result.best ? to_json(*result.best) : json(nullptr);
  return j;
}

json junta_report(const std::string& model, const json& spec, const JuntaResult& result) {
  json j;
  j["spec"] = spec;
  j["model"] = model;
  j["instances"] = json::array({to_json(result)});
  j["summary"] = {{"junta_size", result.coordinates.size()},
                  {"l1_error", result.l1_error},
                  {"l2_tail", result.l2_tail},
                  {"passed", result.lemma_holds.value_or(true)}};
  return j;
}

json friedgut_report(const std::string& model, const json& spec, const FriedgutResult& result) {
  json j;
  j["spec"] = spec;
  j["model"] = model;
  j["instances"] = json::array({to_json(result)});
  j["summary"] = {{"junta_size", result.junta_size},
                  {"achieved_error", result.achieved_error},
                  {"total_influence", result.total_influence},
                  {"epsilon", result.epsilon},
                  {"passed", result.found}};
  return j;
}

void write_csv(std::ostream& out, const BoundReport& report) {
  out << "function_id,t,eta,lhs,rhs,ratio,vacuous,asserted,passed,empirical_constant,"
         "theorem_rhs,theorem_ratio,verbatim_violation\n";
  for (const auto& r : report.instances) {
    out << r.function_id << ',' << format_double(r.t) << ',' << format_double(r.eta) << ','
        << format_double(r.lhs) << ',' << format_double(r.rhs) << ',' << cell(r.ratio) << ','
        << (r.vacuous ? 1 : 0) << ',' << (r.asserted ? 1 : 0) << ',' << (r.passed ? 1 : 0) << ','
        << cell(r.empirical_constant) << ',' << cell(r.theorem_rhs) << ','
        << cell(r.theorem_ratio) << ',' << (r.verbatim_violation ? 1 : 0) << '\n';
  }
}

}  // namespace nstab
