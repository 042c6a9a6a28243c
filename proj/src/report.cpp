#include "gms/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gms {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Violation: return "violation";
    default: return "inconclusive";
  }
}

Verdict classify(double margin, double lhs_error, double rhs_error, bool errors_converged) {
  const double budget = 3.0 * (lhs_error + rhs_error);
  if (!std::isfinite(margin)) return Verdict::Inconclusive;
  if (margin >= -budget) return Verdict::Pass;
  return errors_converged ? Verdict::Violation : Verdict::Inconclusive;
}

void InequalityReport::finalize() {
  verdict = classify(margin(), lhs_error, rhs_error, errors_converged);
}

InequalityReport make_report(std::string scenario, double lhs, double rhs, double lhs_error,
                             double rhs_error, bool converged) {
  InequalityReport r;
  r.scenario = std::move(scenario);
  r.lhs = lhs;
  r.rhs = rhs;
  r.lhs_error = lhs_error;
  r.rhs_error = rhs_error;
  r.errors_converged = converged;
  r.finalize();
  return r;
}

static ordered_json report_to_json(const InequalityReport& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : r.params) p[k] = v;
  j["params"] = p;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["lhs_error"] = r.lhs_error;
  j["rhs_error"] = r.rhs_error;
  j["margin"] = r.margin();
  j["errors_converged"] = r.errors_converged;
  j["verdict"] = to_string(r.verdict);
  j["seed"] = r.seed;
  j["runtime_ms"] = r.runtime_ms;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::string reports_to_json(const std::vector<InequalityReport>& reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2) + "\n";
}

std::vector<InequalityReport> reports_from_json(const std::string& text) {
  ordered_json arr = ordered_json::parse(text);
  std::vector<InequalityReport> out;
  for (const auto& j : arr) {
    InequalityReport r;
    r.scenario = j.at("scenario").get<std::string>();
    for (const auto& [k, v] : j.at("params").items()) r.params[k] = v.get<double>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.lhs_error = j.at("lhs_error").get<double>();
    r.rhs_error = j.at("rhs_error").get<double>();
    r.errors_converged = j.at("errors_converged").get<bool>();
    const std::string v = j.at("verdict").get<std::string>();
    r.verdict = v == "pass" ? Verdict::Pass
                            : (v == "violation" ? Verdict::Violation : Verdict::Inconclusive);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.runtime_ms = j.at("runtime_ms").get<double>();
    if (j.contains("note")) r.note = j.at("note").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

static std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string reports_to_csv(const std::vector<InequalityReport>& reports) {
  std::ostringstream os;
  os << "scenario,p,q,t,lhs,rhs,margin,verdict\n";
  for (const auto& r : reports) {
    auto field = [&](const char* key) -> std::string {
      auto it = r.params.find(key);
      return it == r.params.end() ? std::string() : fmt(it->second);
    };
    os << r.scenario << ',' << field("p") << ',' << field("q") << ',' << field("t") << ','
       << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.margin()) << ','
       << to_string(r.verdict) << '\n';
  }
  return os.str();
}

std::string growth_to_csv(const std::vector<GrowthRow>& rows) {
  std::ostringstream os;
  os << "level,param,lq_norm,xpq_norm,ratio\n";
  for (const auto& g : rows)
    os << fmt(g.level) << ',' << fmt(g.param) << ',' << fmt(g.lq_norm) << ',' << fmt(g.xpq_norm)
       << ',' << fmt(g.ratio) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// log-log SVG plot

namespace {

struct Axis {
  double lo, hi;  // log10 range
  double map(double v, double px0, double px1) const {
    double u = (std::log10(v) - lo) / (hi - lo + 1e-300);
    return px0 + u * (px1 - px0);
  }
};

Axis axis_for(std::vector<double> vals) {
  double lo = 1e300, hi = -1e300;
  for (double v : vals) {
    if (v <= 0 || !std::isfinite(v)) continue;
    lo = std::min(lo, std::log10(v));
    hi = std::max(hi, std::log10(v));
  }
  if (lo > hi) { lo = 0; hi = 1; }
  lo = std::floor(lo);
  hi = std::ceil(hi + 1e-9);
  if (hi == lo) hi = lo + 1;
  return {lo, hi};
}

}  // namespace

std::string growth_to_svg(const std::vector<GrowthRow>& rows, const std::string& title) {
  const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  std::vector<double> xs, ys;
  for (const auto& g : rows) {
    xs.push_back(g.param);
    ys.push_back(g.lq_norm);
    ys.push_back(g.xpq_norm);
  }
  Axis ax = axis_for(xs), ay = axis_for(ys);
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='15'>" << title
     << "</text>\n";
  // frame
  os << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
     << H - mt - mb << "' fill='none' stroke='black'/>\n";
  // decade ticks
  for (int d = int(ax.lo); d <= int(ax.hi); ++d) {
    double px = ax.map(std::pow(10.0, d), ml, W - mr);
    os << "<line x1='" << px << "' y1='" << H - mb << "' x2='" << px << "' y2='" << H - mb + 5
       << "' stroke='black'/>\n";
    os << "<text x='" << px << "' y='" << H - mb + 20
       << "' text-anchor='middle' font-size='11'>1e" << d << "</text>\n";
  }
  for (int d = int(ay.lo); d <= int(ay.hi); ++d) {
    double py = H - mb - (ay.map(std::pow(10.0, d), 0, H - mt - mb));
    os << "<line x1='" << ml - 5 << "' y1='" << py << "' x2='" << ml << "' y2='" << py
       << "' stroke='black'/>\n";
    os << "<text x='" << ml - 8 << "' y='" << py + 4 << "' text-anchor='end' font-size='11'>1e"
       << d << "</text>\n";
  }
  auto polyline = [&](const char* color, bool second) {
    std::ostringstream p;
    for (const auto& g : rows) {
      double v = second ? g.xpq_norm : g.lq_norm;
      if (v <= 0) continue;
      double px = ax.map(g.param, ml, W - mr);
      double py = H - mb - ay.map(v, 0, H - mt - mb);
      p << px << ',' << py << ' ';
    }
    os << "<polyline points='" << p.str() << "' fill='none' stroke='" << color
       << "' stroke-width='2'/>\n";
  };
  polyline("#c0392b", false);
  polyline("#2980b9", true);
  os << "<text x='" << W - mr - 10 << "' y='" << mt + 18
     << "' text-anchor='end' font-size='12' fill='#c0392b'>lq_norm</text>\n";
  os << "<text x='" << W - mr - 10 << "' y='" << mt + 34
     << "' text-anchor='end' font-size='12' fill='#2980b9'>xpq_norm</text>\n";
  os << "</svg>\n";
  return os.str();
}

int aggregate_exit_code(const std::vector<InequalityReport>& reports) {
  bool any_violation = false, any_inconclusive = false;
  for (const auto& r : reports) {
    any_violation |= r.verdict == Verdict::Violation;
    any_inconclusive |= r.verdict == Verdict::Inconclusive;
  }
  if (any_violation) return 1;
  if (any_inconclusive) return 2;
  return 0;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path);
  os << content;
}

}  // namespace gms
