#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fdforge/fdforge.hpp"

namespace fdforge::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) items.push_back(item);
  if (items.empty()) throw UsageError("empty coefficient list");
  return items;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> values;
  try {
    for (const auto& item : split_list(text)) values.push_back(parse_rational(item));
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  return values;
}

std::vector<double> to_doubles(const std::vector<Rational>& values) {
  std::vector<double> out;
  for (const auto& v : values) {
    const double d = to_double(v);
    if (!std::isfinite(d)) throw UsageError("value out of double range");
    out.push_back(d);
  }
  return out;
}

Dimensions make_dims(int k, int s, bool allow_large_k) {
  try {
    return Dimensions::create(k, s, allow_large_k ? std::numeric_limits<int>::max() : kDefaultMaxK);
  } catch (const InvalidDimensions& e) {
    throw UsageError(e.what());
  }
}

unsigned thread_cap_from_env() {
  const char* env = std::getenv("FD_FORGE_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) return 1;
  return static_cast<unsigned>(std::min<unsigned long>(v, 1024));
}

std::string complex_string(const Complex& z) {
  std::ostringstream out;
  out << std::setprecision(12) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return out.str();
}

std::string rational_list(const std::vector<Rational>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? " " : "") + to_string(values[i]);
  return out;
}

std::string double_list(const std::vector<double>& values) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << values[i];
  return out.str();
}

void print_report(std::ostream& out, const RootReport& report) {
  out << "roots (descending magnitude):\n";
  for (std::size_t i = 0; i < report.roots.size(); ++i) {
    out << "  " << std::setw(2) << i + 1 << "  " << std::setw(40) << std::left << complex_string(report.roots[i])
        << std::right << " |z| = " << std::setprecision(15) << std::abs(report.roots[i]) << '\n';
  }
  out << std::setprecision(15);
  out << "max magnitude:    " << report.max_magnitude << '\n';
  out << "max deviation:    " << report.max_deviation << '\n';
  out << "second magnitude: " << report.second_magnitude << '\n';
  out << "on unit circle:   " << report.on_circle.size() << '\n';
  out << "verdict:          " << (report.convergent ? "convergent" : "non-convergent") << '\n';
}

nlohmann::json report_json(const RootReport& report) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& z : report.roots) roots.push_back({{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
  return {{"roots", roots},
          {"max_magnitude", report.max_magnitude},
          {"max_dev", report.max_deviation},
          {"second_mag", report.second_magnitude},
          {"on_circle", report.on_circle},
          {"convergent", report.convergent}};
}

// ---------------------------------------------------------------------------
// discover

struct DiscoverArgs {
  int runs = 1;
  int restarts = 1;
  int k = 2;
  int s = 2;
  std::uint64_t rng_seed = 0;
  std::string init_seed;
  std::string output;
  std::string format = "table";
  bool rational = false;
  bool allow_large_k = false;
  double perturb_scale = 0.1;
  int nm_max_iter = 2000;
};

void print_plateau_histogram(std::ostream& err, const std::vector<double>& plateaus) {
  const std::vector<std::pair<double, std::string>> bins = {
      {1.001, "[1, 1.001)"}, {1.01, "[1.001, 1.01)"}, {1.1, "[1.01, 1.1)"},
      {2.0, "[1.1, 2)"},     {kSeedPenalty, "[2, penalty)"}};
  std::vector<int> counts(bins.size() + 1, 0);
  for (double v : plateaus) {
    std::size_t b = 0;
    while (b < bins.size() && !(v < bins[b].first)) ++b;
    ++counts[b];
  }
  err << "failure plateaus (best max|root| of runs without a convergent formula):\n";
  for (std::size_t b = 0; b < bins.size(); ++b) err << "  " << std::setw(14) << bins[b].second << "  " << counts[b] << '\n';
  err << "  " << std::setw(14) << "penalty" << "  " << counts.back() << '\n';
}

int cmd_discover(const DiscoverArgs& a, std::ostream& out, std::ostream& err) {
  if (a.runs < 1 || a.restarts < 1) throw UsageError("--runs and --restarts must be at least 1");
  SearchConfig cfg;
  cfg.runs = a.runs;
  cfg.restarts = a.restarts;
  cfg.dims = make_dims(a.k, a.s, a.allow_large_k);
  cfg.rng_seed = a.rng_seed;
  cfg.perturb_scale = a.perturb_scale;
  cfg.nm_max_iter = a.nm_max_iter;
  cfg.threads = thread_cap_from_env();
  if (!a.init_seed.empty()) {
    cfg.init_seed = to_doubles(parse_rational_list(a.init_seed));
    if (cfg.init_seed->size() != static_cast<std::size_t>(a.s))
      throw UsageError("--init-seed must have exactly s entries");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (auto warning = dimension_warning(cfg.dims)) err << "warning: " << *warning << '\n';

  const SearchResult result = discover(cfg);

  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << a.output << " for writing\n";
      return kExitFailure;
    }
  }
  std::ostream& sink = a.output.empty() ? out : file;

  if (a.format == "table") {
    sink << "# k=" << cfg.dims.k << " s=" << cfg.dims.s << " truncation_error_order=" << cfg.dims.order()
         << " fields: p[1.." << cfg.dims.degree() + 1 << "] 0 max_dev second_mag c\n";
  } else if (a.format == "csv") {
    sink << csv_header(static_cast<std::size_t>(cfg.dims.degree() + 1)) << '\n';
  }
  for (const auto& cand : result.candidates) {
    const TpolyRecord rec = make_record(cand, a.rational);
    if (a.format == "json") {
      sink << format_json_line(rec) << '\n';
    } else if (a.format == "csv") {
      sink << format_csv(rec) << '\n';
    } else {
      sink << format_tpoly(rec, a.rational) << '\n';
    }
  }
  sink.flush();

  err << "searches: " << result.attempts << '\n';
  err << "convergent formulas: " << result.candidates.size() << '\n';
  print_plateau_histogram(err, result.failure_plateaus);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string poly;
  std::string seed;
  int k = 0;
  int s = 0;
  bool json = false;
  bool allow_large_k = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.poly.empty() == a.seed.empty()) throw UsageError("pass exactly one of --poly or --seed");
  if (!a.poly.empty()) {
    const auto coeffs = to_doubles(parse_rational_list(a.poly));
    if (coeffs.size() < 2 || coeffs.front() == 0.0)
      throw UsageError("polynomial needs degree >= 1 and a nonzero leading coefficient");
    const RootReport report = analyze(coeffs);
    if (a.json) {
      out << report_json(report).dump() << '\n';
    } else {
      print_report(out, report);
    }
    return kExitOk;
  }

  const Dimensions dims = make_dims(a.k, a.s, a.allow_large_k);
  if (auto warning = dimension_warning(dims)) err << "warning: " << *warning << '\n';
  const auto seed = parse_rational_list(a.seed);
  if (seed.size() != static_cast<std::size_t>(dims.s)) throw UsageError("--seed must have exactly s entries");
  ExactFormula exact;
  try {
    exact = seed_to_formula(dims, std::span<const Rational>(seed));
  } catch (const NonNormalizableSeed& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const InvalidSeed& e) {
    throw UsageError(e.what());
  }
  const DifferenceFormula approx = to_float(exact);
  const RootReport report = analyze(approx);
  if (a.json) {
    nlohmann::json j = report_json(report);
    j["k"] = dims.k;
    j["s"] = dims.s;
    j["p"] = approx.p;
    j["c"] = approx.c;
    std::vector<std::string> p_exact;
    for (const auto& v : exact.p) p_exact.push_back(to_string(v));
    j["p_exact"] = p_exact;
    j["c_exact"] = to_string(exact.c);
    out << j.dump() << '\n';
    return kExitOk;
  }
  out << "dimensions:       " << to_string(dims) << " (truncation error order " << dims.order() << ")\n";
  out << "p (float):        " << double_list(approx.p) << '\n';
  out << "c (float):        " << std::setprecision(17) << approx.c << '\n';
  out << "p (exact):        " << rational_list(exact.p) << '\n';
  out << "c (exact):        " << to_string(exact.c) << '\n';
  out << "TPOLY:            " << format_tpoly(make_record(exact, to_doubles(seed)), false) << '\n';
  out << "TPOLY (exact):    " << format_tpoly(make_record(exact, to_doubles(seed)), true) << '\n';
  print_report(out, report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate-known

struct ValidateArgs {
  bool json = false;
  std::string corrupt;
};

int cmd_validate_known(const ValidateArgs& a, std::ostream& out, std::ostream&) {
  std::vector<KnownFormula> entries = catalog();
  if (!a.corrupt.empty()) {
    if (a.corrupt.size() != 1) throw UsageError("--corrupt takes a single catalog label");
    auto it = std::find_if(entries.begin(), entries.end(), [&](const KnownFormula& e) { return e.label == a.corrupt[0]; });
    if (it == entries.end()) throw UsageError("unknown catalog label " + a.corrupt);
    it->char_poly.back() += 1;
  }

  std::vector<KnownFormulaCheck> checks;
  for (const auto& entry : entries) checks.push_back(check_known_formula(entry));
  const auto passed = std::count_if(checks.begin(), checks.end(), [](const KnownFormulaCheck& c) { return c.pass(); });

  if (a.json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : checks) {
      rows.push_back({{"label", std::string(1, c.label)},
                      {"root_at_one", c.root_at_one},
                      {"consistent", c.consistent},
                      {"convergent", c.convergent},
                      {"claimed_order", c.order.claimed_order},
                      {"fitted_slope", c.order.fitted_slope},
                      {"order_pass", c.order.pass},
                      {"max_error_tau", c.coarse.max_error},
                      {"max_error_tau_half", c.fine.max_error},
                      {"simulation_pass", c.simulation_pass},
                      {"pass", c.pass()}});
    }
    out << nlohmann::json{{"formulas", rows}, {"passed", passed}, {"total", checks.size()}}.dump() << '\n';
  } else {
    out << "label  p(1)=0  p'(1)=c  convergent  claimed  slope   order  err(tau)    err(tau/2)  sim   result\n";
    for (const auto& c : checks) {
      char line[256];
      std::snprintf(line, sizeof line, "%-5c  %-6s  %-7s  %-10s  %7d  %6.3f  %-5s  %10.3e  %10.3e  %-4s  %s\n",
                    c.label, c.root_at_one ? "yes" : "no", c.consistent ? "yes" : "no", c.convergent ? "yes" : "no",
                    c.order.claimed_order, c.order.fitted_slope, c.order.pass ? "ok" : "FAIL", c.coarse.max_error,
                    c.fine.max_error, c.simulation_pass ? "ok" : "FAIL", c.pass() ? "PASS" : "FAIL");
      out << line;
    }
    out << passed << "/" << checks.size() << " pass\n";
  }
  return passed == static_cast<long>(checks.size()) ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// order-check

struct OrderArgs {
  std::string label;
  std::string seed;
  int k = 0;
  int s = 0;
  int claimed = 0;
  bool json = false;
  bool allow_large_k = false;
};

int cmd_order_check(const OrderArgs& a, std::ostream& out, std::ostream&) {
  if (a.label.empty() == a.seed.empty()) throw UsageError("pass exactly one of --label or --seed");
  ExactFormula f;
  int claimed = a.claimed;
  std::string id;
  if (!a.label.empty()) {
    if (a.label.size() != 1) throw UsageError("--label takes a single catalog label");
    try {
      const auto& entry = known_formula(a.label[0]);
      f = entry.formula();
      if (claimed == 0) claimed = entry.claimed_order;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    id = a.label;
  } else {
    const Dimensions dims = make_dims(a.k, a.s, a.allow_large_k);
    const auto seed = parse_rational_list(a.seed);
    if (seed.size() != static_cast<std::size_t>(dims.s)) throw UsageError("--seed must have exactly s entries");
    try {
      f = seed_to_formula(dims, std::span<const Rational>(seed));
    } catch (const NonNormalizableSeed& e) {
      throw UsageError(e.what());
    }
    if (claimed == 0) claimed = dims.order();
    id = "seed(" + a.seed + ")";
  }
  if (claimed < 2) throw UsageError("--claimed must be at least 2");

  const OrderCheckResult r = empirical_order(f, claimed, id);
  if (a.json) {
    out << nlohmann::json{{"formula", r.formula_id},     {"taus", r.taus},
                          {"residuals", r.residuals},     {"fitted_slope", r.fitted_slope},
                          {"claimed_order", r.claimed_order}, {"points_used", r.points_used},
                          {"underflow", r.underflow},     {"pass", r.pass}}
               .dump()
        << '\n';
  } else {
    out << "formula " << r.formula_id << ", x = e^t at t = 0\n";
    out << "      tau        |residual|\n";
    for (std::size_t i = 0; i < r.taus.size(); ++i) {
      char line[96];
      std::snprintf(line, sizeof line, "  %10.6f  %14.6e\n", r.taus[i], r.residuals[i]);
      out << line;
    }
    out << std::setprecision(4) << std::fixed << "fitted slope " << r.fitted_slope << " over " << r.points_used
        << " points, claimed order " << r.claimed_order << (r.underflow ? " (residual underflow)" : "") << ": "
        << (r.pass ? "pass" : "FAIL") << '\n';
    out.unsetf(std::ios::fixed);
  }
  return r.pass ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Construct, analyze, and discover convergent look-ahead finite difference formulas"};
  app.name(args.empty() ? "fd-forge" : args.front());
  app.require_subcommand(1);

  DiscoverArgs discover_args;
  auto* discover_cmd = app.add_subcommand("discover", "search seed space for convergent formulas");
  discover_cmd->add_option("--runs", discover_args.runs, "outer loop runs")->required();
  discover_cmd->add_option("--restarts", discover_args.restarts, "minimizer calls per outer run")->required();
  discover_cmd->add_option("--k", discover_args.k, "eliminated derivative columns")->required();
  discover_cmd->add_option("--s", discover_args.s, "seed length")->required();
  discover_cmd->add_option("--rng-seed", discover_args.rng_seed, "generator seed");
  discover_cmd->add_option("--init-seed", discover_args.init_seed, "comma-separated start seed for the first run");
  discover_cmd->add_option("--output", discover_args.output, "write records to this file instead of stdout");
  discover_cmd->add_option("--format", discover_args.format, "record format")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  discover_cmd->add_flag("--rational", discover_args.rational, "exact formulas and fraction output");
  discover_cmd->add_flag("--allow-large-k", discover_args.allow_large_k, "permit k above the default limit");
  discover_cmd->add_option("--perturb-scale", discover_args.perturb_scale, "relative restart perturbation")
      ->check(CLI::NonNegativeNumber);
  discover_cmd->add_option("--nm-max-iter", discover_args.nm_max_iter, "Nelder-Mead iteration cap")
      ->check(CLI::PositiveNumber);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "roots and root condition of a polynomial or seed");
  analyze_cmd->add_option("--poly", analyze_args.poly, "comma-separated coefficients, highest power first");
  analyze_cmd->add_option("--seed", analyze_args.seed, "comma-separated seed");
  analyze_cmd->add_option("--k", analyze_args.k, "eliminated derivative columns (with --seed)");
  analyze_cmd->add_option("--s", analyze_args.s, "seed length (with --seed)");
  analyze_cmd->add_flag("--json", analyze_args.json, "machine-readable output");
  analyze_cmd->add_flag("--allow-large-k", analyze_args.allow_large_k, "permit k above the default limit");

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate-known", "self-check the catalog of known formulas");
  validate_cmd->add_flag("--json", validate_args.json, "machine-readable output");
  validate_cmd->add_option("--corrupt", validate_args.corrupt, "test mode: corrupt the entry with this label");

  OrderArgs order_args;
  auto* order_cmd = app.add_subcommand("order-check", "measure the truncation order on x = e^t");
  order_cmd->add_option("--label", order_args.label, "catalog label A..F");
  order_cmd->add_option("--seed", order_args.seed, "comma-separated seed");
  order_cmd->add_option("--k", order_args.k, "eliminated derivative columns (with --seed)");
  order_cmd->add_option("--s", order_args.s, "seed length (with --seed)");
  order_cmd->add_option("--claimed", order_args.claimed, "claimed order (defaults to the catalog or k+2)");
  order_cmd->add_flag("--json", order_args.json, "machine-readable output");
  order_cmd->add_flag("--allow-large-k", order_args.allow_large_k, "permit k above the default limit");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (discover_cmd->parsed()) return cmd_discover(discover_args, out, err);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_args, out, err);
    if (validate_cmd->parsed()) return cmd_validate_known(validate_args, out, err);
    if (order_cmd->parsed()) return cmd_order_check(order_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace fdforge::cli
