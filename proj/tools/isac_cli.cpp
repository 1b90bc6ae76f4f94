// isac: command-line front end over the C interface.
//
//   isac solve --config FILE [--seed N] [--out FILE] [--full-check] [--allow-infeasible]
//   isac sweep --config FILE --out FILE.csv
//   isac feasibility --config FILE
//   isac verify [--full]
//
// Exit codes: 0 success, 1 usage/config/solver error, 2 infeasible scenario,
// 3 a check did not pass (failed invariant, failed oracle, errored sweep trial).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

#include "isac/isac.h"

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Sweep {
  std::string parameter;  // "K" or "Nt"
  std::vector<int> values;
};

struct RunConfig {
  int n_tx = 64;
  int n_users = 8;
  double p_t_dbm = 20.0;
  std::vector<double> gamma_db{10.0};  // one entry broadcasts to every user
  double sigma2_dbm = 0.0;
  std::optional<double> tau;
  double delta = 1e-4;
  double tol = 1e-9;
  long max_iters = 200'000;
  int trials = 1;
  std::uint64_t base_seed = 1;
  std::optional<Sweep> sweep;
  // Explicit channel, n_tx rows of n_users [re, im] entries. Replaces the
  // seeded draw; not allowed together with a sweep.
  std::optional<std::vector<double>> channel;
};

struct Point {
  int n_tx;
  int n_users;
};

double from_db(double x) { return std::pow(10.0, x / 10.0); }

std::string where(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number, got " + std::string(j.type_name()));
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad_field(field, "must be finite");
  return v;
}

long integer(const json& j, const std::string& field, long min_value) {
  if (!j.is_number_integer()) bad_field(field, "expected an integer, got " + j.dump());
  const long v = j.get<long>();
  if (v < min_value) bad_field(field, "must be >= " + std::to_string(min_value));
  return v;
}

double positive(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!(v > 0.0)) bad_field(field, "must be > 0");
  return v;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + where(text, e.byte) + ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw ConfigError(path + ": top level must be an object");

  RunConfig c;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "n_tx") {
      c.n_tx = static_cast<int>(integer(v, key, 2));
    } else if (key == "n_users") {
      c.n_users = static_cast<int>(integer(v, key, 1));
    } else if (key == "p_t_dbm") {
      c.p_t_dbm = number(v, key);
    } else if (key == "gamma_db") {
      c.gamma_db.clear();
      if (v.is_array()) {
        if (v.empty()) bad_field(key, "per-user list must not be empty");
        for (std::size_t i = 0; i < v.size(); ++i)
          c.gamma_db.push_back(number(v[i], key + "[" + std::to_string(i) + "]"));
      } else {
        c.gamma_db.push_back(number(v, key));
      }
    } else if (key == "sigma2_dbm") {
      c.sigma2_dbm = number(v, key);
    } else if (key == "tau") {
      if (!v.is_null()) c.tau = positive(v, key);
    } else if (key == "delta") {
      c.delta = positive(v, key);
    } else if (key == "tol") {
      c.tol = positive(v, key);
    } else if (key == "max_iters") {
      c.max_iters = integer(v, key, 1);
    } else if (key == "trials") {
      c.trials = static_cast<int>(integer(v, key, 1));
    } else if (key == "base_seed") {
      if (!v.is_number_unsigned()) bad_field(key, "expected a non-negative integer");
      c.base_seed = v.get<std::uint64_t>();
    } else if (key == "sweep") {
      if (v.is_null()) continue;
      if (!v.is_object()) bad_field(key, "expected an object {parameter, values}");
      Sweep s;
      if (!v.contains("parameter") || !v["parameter"].is_string())
        bad_field("sweep.parameter", "expected \"K\" or \"Nt\"");
      s.parameter = v["parameter"].get<std::string>();
      if (s.parameter != "K" && s.parameter != "Nt")
        bad_field("sweep.parameter", "expected \"K\" or \"Nt\", got \"" + s.parameter + "\"");
      if (!v.contains("values") || !v["values"].is_array() || v["values"].empty())
        bad_field("sweep.values", "expected a non-empty list of positive integers");
      for (std::size_t i = 0; i < v["values"].size(); ++i) {
        const std::string f = "sweep.values[" + std::to_string(i) + "]";
        s.values.push_back(static_cast<int>(integer(v["values"][i], f, 1)));
        if (i > 0 && s.values[i] <= s.values[i - 1]) bad_field(f, "values must be strictly increasing");
      }
      for (auto jt = v.begin(); jt != v.end(); ++jt)
        if (jt.key() != "parameter" && jt.key() != "values")
          bad_field("sweep." + jt.key(), "unknown field");
      c.sweep = s;
    } else if (key == "channel") {
      if (!v.is_array()) bad_field(key, "expected n_tx rows of [re, im] pairs");
      std::vector<double> rows;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array()) bad_field(key + "[" + std::to_string(i) + "]", "expected a row");
        for (std::size_t j = 0; j < v[i].size(); ++j) {
          const std::string f = key + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
          const json& e = v[i][j];
          if (!e.is_array() || e.size() != 2) bad_field(f, "expected [re, im]");
          rows.push_back(number(e[0], f));
          rows.push_back(number(e[1], f));
        }
        if (v[i].size() != v[0].size()) bad_field(key, "rows have different lengths");
      }
      c.channel = rows;
    } else {
      bad_field(key, "unknown field");
    }
  }

  if (c.sweep && c.gamma_db.size() > 1 && c.sweep->parameter == "K")
    bad_field("gamma_db", "a per-user list cannot be combined with a K sweep");
  if (c.sweep && c.channel) bad_field("channel", "cannot be combined with a sweep");
  const auto check_point = [&](int nt, int k) {
    if (nt <= k) {
      std::ostringstream os;
      os << "need n_tx > n_users, got n_tx=" << nt << ", n_users=" << k;
      bad_field(c.sweep ? "sweep.values" : "n_tx", os.str());
    }
    if (c.gamma_db.size() > 1 && static_cast<int>(c.gamma_db.size()) != k)
      bad_field("gamma_db", "has " + std::to_string(c.gamma_db.size()) + " entries for " +
                                std::to_string(k) + " users");
  };
  if (c.sweep) {
    for (int v : c.sweep->values)
      c.sweep->parameter == "K" ? check_point(c.n_tx, v) : check_point(v, c.n_users);
  } else {
    check_point(c.n_tx, c.n_users);
  }
  if (c.channel && c.channel->size() != static_cast<std::size_t>(2 * c.n_tx * c.n_users))
    bad_field("channel", "expected " + std::to_string(c.n_tx) + " rows of " +
                             std::to_string(c.n_users) + " entries");
  return c;
}

std::vector<Point> sweep_points(const RunConfig& c) {
  if (!c.sweep) return {{c.n_tx, c.n_users}};
  std::vector<Point> pts;
  for (int v : c.sweep->values)
    pts.push_back(c.sweep->parameter == "K" ? Point{c.n_tx, v} : Point{v, c.n_users});
  return pts;
}

std::uint64_t trial_seed(const RunConfig& c, int trial) {
  return c.base_seed ^ static_cast<std::uint64_t>(trial);
}

// Owns a C handle and frees it on scope exit.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (p) Free(p);
  }
};
using ScenarioHandle = Handle<isac_scenario, isac_scenario_destroy>;
using ResultHandle = Handle<isac_result, isac_result_destroy>;

struct ApiError : std::runtime_error {
  isac_status status;
  ApiError(isac_status s, const std::string& m) : std::runtime_error(m), status(s) {}
};

void check(isac_status s, const char* what) {
  if (s != ISAC_OK)
    throw ApiError(s, std::string(what) + ": " + isac_status_string(s) + ": " + isac_last_error());
}

void make_scenario(const RunConfig& c, Point pt, std::uint64_t seed, ScenarioHandle& out) {
  std::vector<double> gamma(static_cast<std::size_t>(pt.n_users),
                            from_db(c.gamma_db.front()));
  if (c.gamma_db.size() > 1)
    std::transform(c.gamma_db.begin(), c.gamma_db.end(), gamma.begin(), from_db);
  check(isac_scenario_create(pt.n_tx, pt.n_users, from_db(c.p_t_dbm), gamma.data(),
                             from_db(c.sigma2_dbm), &out.p),
        "scenario");
  if (c.channel) {
    // Config rows are antennas; the C interface wants column-major.
    std::vector<double> h(c.channel->size());
    for (int i = 0; i < pt.n_tx; ++i)
      for (int k = 0; k < pt.n_users; ++k)
        for (int part = 0; part < 2; ++part)
          h[2 * (k * pt.n_tx + i) + part] = (*c.channel)[2 * (i * pt.n_users + k) + part];
    check(isac_scenario_set_channel(out.p, h.data()), "channel");
  } else {
    check(isac_scenario_generate_channel(out.p, seed), "channel");
  }
}

isac_solver_options solver_options(const RunConfig& c, bool full_check) {
  isac_solver_options o;
  isac_solver_options_default(&o);
  if (c.tau) o.tau = *c.tau;
  o.delta = c.delta;
  o.tol_violation = c.tol;
  o.max_iterations = c.max_iters;
  o.full_check = full_check ? 1 : 0;
  return o;
}

// ---- result rows -----------------------------------------------------------

const char* const kColumns[] = {"trial",          "seed",          "n_tx",
                                "n_users",        "feasible",      "degenerate",
                                "crb_objective",  "iterations",    "setup_seconds",
                                "iter_seconds_total", "final_violation", "min_sinr_margin"};

struct ResultRow {
  std::string trial;  // index, or "mean" / "median" on aggregate rows
  std::optional<std::uint64_t> seed;
  int n_tx = 0;
  int n_users = 0;
  std::optional<bool> feasible;
  std::optional<bool> degenerate;
  std::optional<double> crb_objective;
  std::optional<double> iterations;
  std::optional<double> setup_seconds;
  std::optional<double> iter_seconds_total;
  std::optional<double> final_violation;
  std::optional<double> min_sinr_margin;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, bool>) {
    return *v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, double>) {
    return fmt(*v);
  } else {
    return std::to_string(*v);
  }
}

std::string csv_header() {
  std::string out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out += (i ? "," : "") + std::string(kColumns[i]);
  return out + "\r\n";
}

std::string csv_line(const ResultRow& r) {
  const std::string cells[] = {r.trial,
                               cell(r.seed),
                               std::to_string(r.n_tx),
                               std::to_string(r.n_users),
                               cell(r.feasible),
                               cell(r.degenerate),
                               cell(r.crb_objective),
                               cell(r.iterations),
                               cell(r.setup_seconds),
                               cell(r.iter_seconds_total),
                               cell(r.final_violation),
                               cell(r.min_sinr_margin)};
  std::string out;
  for (std::size_t i = 0; i < std::size(cells); ++i) out += (i ? "," : "") + csv_field(cells[i]);
  return out + "\r\n";
}

ResultRow row_from(const isac_result* r, int trial, std::uint64_t seed, Point pt) {
  ResultRow row;
  row.trial = std::to_string(trial);
  row.seed = seed;
  row.n_tx = pt.n_tx;
  row.n_users = pt.n_users;
  row.feasible = isac_result_feasible(r) != 0;
  row.setup_seconds = isac_result_setup_seconds(r);
  row.iter_seconds_total = isac_result_iter_seconds(r);
  if (*row.feasible) {
    row.degenerate = isac_result_degenerate(r) != 0;
    row.crb_objective = isac_result_objective(r);
    row.iterations = static_cast<double>(isac_result_iterations(r));
    row.final_violation = isac_result_final_violation(r);
    row.min_sinr_margin = isac_result_min_sinr_margin(r);
  }
  return row;
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> median_of(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Mean and median over the trials of one sweep point; cells without data stay empty.
std::vector<ResultRow> aggregate(const std::vector<ResultRow>& rows, Point pt) {
  std::vector<double> crb, iters, setup, secs, viol, margin;
  auto take = [](std::vector<double>& dst, const std::optional<double>& v) {
    if (v) dst.push_back(*v);
  };
  for (const auto& r : rows) {
    take(crb, r.crb_objective);
    take(iters, r.iterations);
    take(setup, r.setup_seconds);
    take(secs, r.iter_seconds_total);
    take(viol, r.final_violation);
    take(margin, r.min_sinr_margin);
  }
  std::vector<ResultRow> out(2);
  out[0].trial = "mean";
  out[1].trial = "median";
  for (auto& a : out) {
    a.n_tx = pt.n_tx;
    a.n_users = pt.n_users;
  }
  out[0].crb_objective = mean_of(crb);
  out[0].iterations = mean_of(iters);
  out[0].setup_seconds = mean_of(setup);
  out[0].iter_seconds_total = mean_of(secs);
  out[0].final_violation = mean_of(viol);
  out[0].min_sinr_margin = mean_of(margin);
  out[1].crb_objective = median_of(crb);
  out[1].iterations = median_of(iters);
  out[1].setup_seconds = median_of(setup);
  out[1].iter_seconds_total = median_of(secs);
  out[1].final_violation = median_of(viol);
  out[1].min_sinr_margin = median_of(margin);
  return out;
}

// ---- invariants checked by solve --full-check ---------------------------------

struct Invariant {
  const char* name;
  double value;
  double limit;
  bool upper;       // value must be <= limit (else >= limit)
  bool structural;  // null-space structure; the degenerate witness need not have it
};

std::vector<Invariant> invariants(const isac_diagnostics& d) {
  return {
      {"min_sinr_margin", d.min_sinr_margin, -1e-6, false, false},
      {"power_residual", d.power_residual, 1e-8, true, false},
      {"sensing_min_eig", d.sensing_min_eig, -1e-8, false, false},
      {"decomposition_gap", d.decomposition_gap, 1e-8, true, false},
      {"null_leakage", d.null_leakage, 1e-8, true, true},
      {"structure_gap", d.structure_gap, 1e-6, true, true},
      {"objective_gap", d.objective_gap, 1e-6, true, false},
      {"rank_one_gap", d.rank_one_gap, 1e-8, true, false},
  };
}

// ---- subcommands -----------------------------------------------------------

struct SolveArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "solution.json";
  bool full_check = false;
  bool allow_infeasible = false;
};

int cmd_solve(const SolveArgs& a) {
  const RunConfig c = parse_config(a.config);
  if (c.sweep) throw ConfigError("solve takes a single scenario; use sweep for 'sweep' configs");
  const Point pt{c.n_tx, c.n_users};
  const std::uint64_t seed = a.seed ? *a.seed : trial_seed(c, 0);

  ScenarioHandle sc;
  make_scenario(c, pt, seed, sc);
  const isac_solver_options opt = solver_options(c, a.full_check);
  ResultHandle res;
  const isac_status st = isac_solve(sc.p, &opt, &res.p);
  if (st != ISAC_OK && st != ISAC_ERR_INFEASIBLE) check(st, "solve");

  char* doc = nullptr;
  check(isac_result_json(res.p, &doc), "json");
  {
    std::ofstream out(a.out);
    out << doc << '\n';
    isac_string_free(doc);
    if (!out) throw std::runtime_error("cannot write '" + a.out + "'");
  }
  std::cout << csv_header() << csv_line(row_from(res.p, 0, seed, pt));

  if (st == ISAC_ERR_INFEASIBLE) {
    const double p_low = isac_result_p_low(res.p);
    std::cerr << "infeasible: power budget " << fmt(from_db(c.p_t_dbm)) << " mW ("
              << c.p_t_dbm << " dBm) is below p_low = " << fmt(p_low) << " mW ("
              << 10.0 * std::log10(p_low) << " dBm)\n";
    return a.allow_infeasible ? 0 : 2;
  }
  if (!isac_result_converged(res.p))
    std::cerr << "warning: iteration cap reached with violation "
              << isac_result_final_violation(res.p) << "\n";

  if (a.full_check) {
    isac_diagnostics d;
    check(isac_result_diagnostics(res.p, &d), "diagnostics");
    // The witness R_W = (P_T/Nt) I is optimal without the null-space structure.
    const bool witness = std::string(isac_result_origin(res.p)) == "degenerate_witness";
    int failed = 0;
    for (const auto& inv : invariants(d)) {
      if (witness && inv.structural) {
        std::cerr << "n/a  " << inv.name << " = " << inv.value << " (degenerate witness)\n";
        continue;
      }
      const bool ok = inv.upper ? inv.value <= inv.limit : inv.value >= inv.limit;
      std::cerr << (ok ? "ok   " : "FAIL ") << inv.name << " = " << inv.value
                << (inv.upper ? " <= " : " >= ") << inv.limit << "\n";
      failed += ok ? 0 : 1;
    }
    if (failed) return 3;
  }
  return isac_result_converged(res.p) ? 0 : 3;
}

int cmd_sweep(const std::string& config, const std::string& out_path) {
  const RunConfig c = parse_config(config);
  const isac_solver_options opt = solver_options(c, false);
  std::string csv = csv_header();
  int errors = 0;
  for (const Point pt : sweep_points(c)) {
    std::vector<ResultRow> rows;
    for (int t = 0; t < c.trials; ++t) {
      const std::uint64_t seed = trial_seed(c, t);
      ResultRow row;
      row.trial = std::to_string(t);
      row.seed = seed;
      row.n_tx = pt.n_tx;
      row.n_users = pt.n_users;
      try {
        ScenarioHandle sc;
        make_scenario(c, pt, seed, sc);
        ResultHandle res;
        const isac_status st = isac_solve(sc.p, &opt, &res.p);
        if (st != ISAC_OK && st != ISAC_ERR_INFEASIBLE) check(st, "solve");
        row = row_from(res.p, t, seed, pt);
      } catch (const std::exception& e) {
        // The row keeps its identifying cells and nothing else.
        ++errors;
        std::cerr << "trial " << t << " (n_tx=" << pt.n_tx << ", n_users=" << pt.n_users
                  << ", seed=" << seed << ") failed: " << e.what() << "\n";
      }
      std::cerr << "n_tx=" << pt.n_tx << " n_users=" << pt.n_users << " trial " << t << " done\n";
      rows.push_back(row);
      csv += csv_line(row);
    }
    for (const auto& a : aggregate(rows, pt)) csv += csv_line(a);
  }
  std::ofstream out(out_path, std::ios::binary);
  out << csv;
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  return errors ? 3 : 0;
}

int cmd_feasibility(const std::string& config) {
  const RunConfig c = parse_config(config);
  std::cout << "n_tx,n_users,trial,seed,p_low_mw,p_low_dbm,p_t_mw,feasible\r\n";
  for (const Point pt : sweep_points(c)) {
    for (int t = 0; t < c.trials; ++t) {
      const std::uint64_t seed = trial_seed(c, t);
      ScenarioHandle sc;
      make_scenario(c, pt, seed, sc);
      double p_low = 0.0;
      int feasible = 0;
      check(isac_feasibility(sc.p, &p_low, &feasible), "feasibility");
      std::cout << pt.n_tx << ',' << pt.n_users << ',' << t << ',' << seed << ',' << fmt(p_low)
                << ',' << fmt(10.0 * std::log10(p_low)) << ',' << fmt(from_db(c.p_t_dbm)) << ','
                << (feasible ? "true" : "false") << "\r\n";
    }
  }
  return 0;
}

int cmd_verify(bool full, bool flip) {
  Handle<isac_verify_report, isac_verify_destroy> rep;
  check(isac_verify(full ? 1 : 0, flip ? 1 : 0, &rep.p), "verify");
  int failed = 0;
  for (int i = 0; i < isac_verify_count(rep.p); ++i) {
    const char* name = nullptr;
    double measured = 0.0, threshold = 0.0;
    int passed = 0;
    check(isac_verify_item(rep.p, i, &name, &measured, &threshold, &passed), "verify");
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-44s %.3e <= %.1e", passed ? "PASS" : "FAIL", name,
                  measured, threshold);
    std::cout << line << "\n";
    failed += passed ? 0 : 1;
  }
  std::cout << (failed ? std::to_string(failed) + " check(s) failed" : "all checks passed") << "\n";
  return failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-CRB ISAC beamforming solver"};
  app.set_version_flag("--version", std::string(isac_version()));
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one scenario and write the solution JSON");
  solve->add_option("--config", solve_args.config, "JSON run configuration")->required();
  std::uint64_t seed = 0;
  auto* seed_opt = solve->add_option("--seed", seed, "Channel seed (default: base_seed)");
  solve->add_option("--out", solve_args.out, "Solution JSON path")->capture_default_str();
  solve->add_flag("--full-check", solve_args.full_check, "Dense invariant checks on the result");
  solve->add_flag("--allow-infeasible", solve_args.allow_infeasible,
                  "Exit 0 on an infeasible scenario");

  std::string sweep_config, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run trials over a parameter sweep into a CSV file");
  sweep->add_option("--config", sweep_config, "JSON run configuration")->required();
  sweep->add_option("--out", sweep_out, "CSV output path")->required();

  std::string feas_config;
  auto* feas = app.add_subcommand("feasibility", "Minimum required power per trial");
  feas->add_option("--config", feas_config, "JSON run configuration")->required();

  bool full = false, flip = false;
  auto* verify = app.add_subcommand("verify", "Run the oracle verification suite");
  verify->add_flag("--full", full, "Larger instance set");
  verify->add_flag("--flip-z-sign", flip, "Debug: reverse the Z-step sign (checks should fail)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      if (*seed_opt) solve_args.seed = seed;
      return cmd_solve(solve_args);
    }
    if (*sweep) return cmd_sweep(sweep_config, sweep_out);
    if (*feas) return cmd_feasibility(feas_config);
    if (*verify) return cmd_verify(full, flip);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
