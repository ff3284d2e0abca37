#pragma once

// Flat result rows: normalized coefficients, a separator 0, the deviation of
// the largest root magnitude from 1, the second-largest root magnitude, and c.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdforge/charpoly.hpp"
#include "fdforge/formula.hpp"
#include "fdforge/rational.hpp"
#include "fdforge/search.hpp"

namespace fdforge {

struct TpolyRecord {
  int k = 0;
  int s = 0;
  std::vector<double> p;
  double max_dev = 0.0;
  double second_mag = 0.0;
  double c = 0.0;
  std::vector<double> seed;
  bool convergent = false;
  // Present when the record came from the exact path.
  std::optional<std::vector<Rational>> p_exact;
  std::optional<Rational> c_exact;

  friend bool operator==(const TpolyRecord&, const TpolyRecord&) = default;
};

inline TpolyRecord make_record(const DifferenceFormula& f, const RootReport& report, std::vector<double> seed) {
  return TpolyRecord{f.dims.k, f.dims.s, f.p, report.max_deviation, report.second_magnitude, f.c, std::move(seed),
                     report.convergent, std::nullopt, std::nullopt};
}

inline TpolyRecord make_record(const ExactFormula& f, std::vector<double> seed) {
  const DifferenceFormula approx = to_float(f);
  TpolyRecord rec = make_record(approx, analyze(approx), std::move(seed));
  rec.p_exact = f.p;
  rec.c_exact = f.c;
  return rec;
}

inline TpolyRecord make_record(const Candidate& cand, bool exact) {
  if (exact) return make_record(cand.exact, cand.seed_final);
  return make_record(cand.formula, cand.report, cand.seed_final);
}

namespace detail {
inline std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}
}  // namespace detail

/// One text row. Float mode prints four decimals; exact mode prints coefficients
/// and c as lowest-term fractions and the second magnitude as a close fraction.
inline std::string format_tpoly(const TpolyRecord& rec, bool exact) {
  std::ostringstream out;
  const bool use_exact = exact && rec.p_exact && rec.c_exact;
  for (std::size_t i = 0; i < rec.p.size(); ++i) {
    if (i) out << ' ';
    out << (use_exact ? to_string((*rec.p_exact)[i]) : detail::fixed4(rec.p[i]));
  }
  out << " 0 " << detail::fixed4(rec.max_dev) << ' ';
  if (use_exact) {
    out << approximate_fraction_string(rec.second_mag) << ' ' << to_string(*rec.c_exact);
  } else {
    out << detail::fixed4(rec.second_mag) << ' ' << detail::fixed4(rec.c);
  }
  return out.str();
}

inline std::string csv_header(std::size_t coefficients) {
  std::ostringstream out;
  out << "k,s";
  for (std::size_t i = 0; i < coefficients; ++i) out << ",p" << i + 1;
  out << ",separator,max_dev,second_mag,c,convergent";
  return out.str();
}

inline std::string format_csv(const TpolyRecord& rec) {
  std::ostringstream out;
  out.precision(17);
  out << rec.k << ',' << rec.s;
  for (double v : rec.p) out << ',' << v;
  out << ",0," << rec.max_dev << ',' << rec.second_mag << ',' << rec.c << ',' << (rec.convergent ? "true" : "false");
  return out.str();
}

inline nlohmann::json to_json(const TpolyRecord& rec) {
  return nlohmann::json{{"k", rec.k},
                        {"s", rec.s},
                        {"p", rec.p},
                        {"c", rec.c},
                        {"max_dev", rec.max_dev},
                        {"second_mag", rec.second_mag},
                        {"seed", rec.seed},
                        {"convergent", rec.convergent}};
}

inline TpolyRecord record_from_json(const nlohmann::json& j) {
  TpolyRecord rec;
  rec.k = j.at("k").get<int>();
  rec.s = j.at("s").get<int>();
  rec.p = j.at("p").get<std::vector<double>>();
  rec.c = j.at("c").get<double>();
  rec.max_dev = j.at("max_dev").get<double>();
  rec.second_mag = j.at("second_mag").get<double>();
  rec.seed = j.at("seed").get<std::vector<double>>();
  rec.convergent = j.at("convergent").get<bool>();
  return rec;
}

/// Single JSON-lines row.
inline std::string format_json_line(const TpolyRecord& rec) { return to_json(rec).dump(); }

}  // namespace fdforge
