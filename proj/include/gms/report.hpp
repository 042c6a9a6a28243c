#pragma once

// Check reports and their serialization. Every inequality checker in the
// suite returns an InequalityReport; the verdict is a pure function of
// (lhs, rhs, errors) so that scenario sweeps can be audited after the fact.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gms/common.hpp"

namespace gms {

enum class Verdict { Pass, Violation, Inconclusive };

std::string to_string(Verdict v);

// pass          iff margin >= -3 (lhs_error + rhs_error)
// violation     iff margin <  -3 (lhs_error + rhs_error) and both error
//               estimates converged
// inconclusive  otherwise
Verdict classify(double margin, double lhs_error, double rhs_error, bool errors_converged);

struct InequalityReport {
  std::string scenario;
  std::map<std::string, double> params;  // sorted keys -> stable serialization
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  bool errors_converged = true;
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;  // informational; excluded from determinism checks
  std::string note;

  double margin() const { return rhs - lhs; }
  void finalize();  // sets verdict from the invariant above
};

InequalityReport make_report(std::string scenario, double lhs, double rhs, double lhs_error,
                             double rhs_error, bool converged = true);

// Growth-table row for strictness witnesses and the failure demonstration.
struct GrowthRow {
  double level = 0.0;     // 1-based level index
  double param = 0.0;     // epsilon / truncation radius / cap
  double lq_norm = 0.0;
  double xpq_norm = 0.0;  // companion norm (mixed norm or L^p), kind-dependent
  double ratio = 0.0;     // lq_norm relative to the previous level
};

// Serialization. JSON is full fidelity (nlohmann, insertion-ordered keys);
// CSV is the flat summary `scenario,p,q,t,lhs,rhs,margin,verdict` with blank
// fields for absent parameters.
std::string reports_to_json(const std::vector<InequalityReport>& reports);
std::vector<InequalityReport> reports_from_json(const std::string& text);
std::string reports_to_csv(const std::vector<InequalityReport>& reports);

std::string growth_to_csv(const std::vector<GrowthRow>& rows);

// Minimal log-log SVG plot of the two norm columns against `param`.
std::string growth_to_svg(const std::vector<GrowthRow>& rows, const std::string& title);

// Exit-code aggregation: 0 all pass, 1 any violation, 2 inconclusive only.
int aggregate_exit_code(const std::vector<InequalityReport>& reports);

void write_file(const std::string& path, const std::string& content);

}  // namespace gms
