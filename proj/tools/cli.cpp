#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "walklab/bsm.hpp"
#include "walklab/conjugate.hpp"
#include "walklab/counterexample.hpp"
#include "walklab/discrete_duals.hpp"
#include "walklab/dp.hpp"
#include "walklab/errors.hpp"
#include "walklab/esscher.hpp"
#include "walklab/io.hpp"
#include "walklab/prop1b.hpp"
#include "walklab/rv_lattice.hpp"

namespace walklab::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kFields = {"rv",     "utility",  "n",          "y",
                                          "x",      "gamma",    "kmax",       "lambda-grid",
                                          "out",    "format",   "merge-tol",  "quad-order",
                                          "scan-y", "z0"};

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;
  bool seedless = false;

  std::optional<std::string> get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
  std::string get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s) {
  const std::string t = trim(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + s + "'");
  }
  if (used != t.size()) throw ValidationError("not a number: '" + s + "'");
  return v;
}

// Config values may be JSON strings, numbers, arrays or objects; everything is
// normalized to the flag text form.
std::string config_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ',';
      out += e.is_string() ? e.get<std::string>() : e.dump();
    }
    return out;
  }
  return v.dump();
}

void merge_config(RunConfig& cfg, const std::string& path) {
  json j;
  try {
    j = json::parse(read_json_arg(path));
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config '" + path + "': expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "command") continue;
    if (flag == "seedless") {
      cfg.seedless = cfg.seedless || value.get<bool>();
      continue;
    }
    if (std::find(kFields.begin(), kFields.end(), flag) == kFields.end()) {
      throw ValidationError("config '" + path + "': unknown key '" + key + "'");
    }
    if (!cfg.values.count(flag)) cfg.values[flag] = config_text(value);
  }
}

FiniteRV load_rv(const RunConfig& cfg, const std::string& fallback) {
  const std::string spec = cfg.get_or("rv", fallback);
  if (spec == "symmetric") return FiniteRV::symmetric_binomial();
  if (spec == "asymmetric") return FiniteRV::asymmetric_binomial();
  if (spec == "trinomial") return FiniteRV::trinomial();
  return parse_rv(read_json_arg(spec));
}

UtilitySpec load_utility(const RunConfig& cfg, const std::string& fallback) {
  return parse_utility(read_json_arg(cfg.get_or("utility", fallback)));
}

std::vector<int> int_list(const RunConfig& cfg, const std::string& key, const std::string& fallback) {
  auto v = parse_int_list(cfg.get_or(key, fallback));
  for (int n : v) {
    if (n < 1) throw ValidationError("--" + key + ": values must be >= 1");
  }
  return v;
}

std::vector<double> positive_range(const RunConfig& cfg, const std::string& key,
                                   const std::string& fallback) {
  auto v = parse_range(cfg.get_or(key, fallback));
  for (double x : v) {
    if (!(x > 0.0)) throw ValidationError("--" + key + ": values must be positive");
  }
  return v;
}

double merge_tol(const RunConfig& cfg) {
  const double t = parse_number(cfg.get_or("merge-tol", format_double(kDefaultMergeTol)));
  if (!(t >= 0.0)) throw ValidationError("--merge-tol must be >= 0");
  return t;
}

int quad_order(const RunConfig& cfg) {
  const double q = parse_number(cfg.get_or("quad-order", std::to_string(kDefaultQuadOrder)));
  if (!(q >= 2.0) || q != std::floor(q)) throw ValidationError("--quad-order must be an integer >= 2");
  return static_cast<int>(q);
}

std::string f(double x) { return format_double(x); }

struct Output {
  std::string content;
  std::string summary;
};

Output cmd_rv_check(const RunConfig& cfg) {
  const auto rv = load_rv(cfg, "symmetric");
  const auto ns = int_list(cfg, "n", "1,4,16,64");
  const auto mom = moments(rv);
  const double tol = merge_tol(cfg);
  CsvTable t({"n", "points", "mass", "mean", "second_moment", "mass_residual", "zeta_third_moment"});
  bool ok = true;
  for (int n : ns) {
    const auto d = terminal_distribution(rv, n, tol);
    ok = ok && d.mass_residual() <= 1e-9 && std::abs(d.mean()) <= 1e-8 &&
         std::abs(d.second_moment() - 1.0) <= 1e-7;
    t.add_row({std::to_string(n), std::to_string(d.size()), f(d.total_mass()), f(d.mean()),
               f(d.second_moment()), f(d.mass_residual()), f(mom.third)});
  }
  return {t.str(), "rv-check: " + std::to_string(ns.size()) + " lattices, invariants " +
                       (ok ? "hold" : "VIOLATED")};
}

Output cmd_esscher(const RunConfig& cfg) {
  const auto rv = load_rv(cfg, "asymmetric");
  const auto ns = int_list(cfg, "n", "1,4,16,64");
  const double third = moments(rv).third;
  CsvTable t({"n", "a_n", "b_n", "asymptotic_a", "scaled_residual"});
  for (int n : ns) {
    const auto p = solve_esscher(rv, n);
    const double scaled = std::sqrt(static_cast<double>(n)) * (p.a - 0.5) - third / 24.0;
    t.add_row({std::to_string(n), f(p.a), f(p.b), f(asymptotic_a(rv, n)), f(scaled)});
  }
  return {t.str(), "esscher: " + std::to_string(ns.size()) + " rows"};
}

Output cmd_lemma1(const RunConfig& cfg) {
  const auto rv = load_rv(cfg, "symmetric");
  const auto ns = int_list(cfg, "n", "100,1000,10000");
  const auto gammas = parse_range(cfg.get_or("gamma", "0.5,1,2"));
  CsvTable t({"n", "gamma", "L_pow_n", "exp_half_gamma_sq", "rel_gap", "bound_gamma4_over_8n"});
  double worst = 0.0;
  for (int n : ns) {
    for (double g : gammas) {
      const auto m = mgf_convergence(rv, g, n);
      const double gap = std::expm1(m.log_discrete - m.log_limit);
      worst = std::max(worst, std::abs(gap));
      t.add_row({std::to_string(n), f(g), f(m.discrete), f(m.limit), f(gap),
                 f(std::pow(g, 4) / (8.0 * n))});
    }
  }
  return {t.str(), "lemma1: max |ratio - 1| = " + f(worst)};
}

Output cmd_dual_curve(const RunConfig& cfg) {
  const auto rv = load_rv(cfg, "symmetric");
  const auto u = load_utility(cfg, R"({"family":"power_conjugate","alpha":1,"beta":1})");
  const auto ns = int_list(cfg, "n", "16,64,256,1024");
  const auto ys = positive_range(cfg, "y", "0.5,1,2");
  auto rows = dual_curve(rv, ns, u, ys, merge_tol(cfg));
  if (const int q = quad_order(cfg); q != kDefaultQuadOrder) {
    for (auto& r : rows) {
      r.v_bsm = v_bsm(u, r.y, q);
      r.gap_Z = std::abs(r.v_n_Z - r.v_bsm);
    }
  }
  CsvTable t({"n", "y", "v_n_Z", "v_n_Zn", "v_bsm", "gap_Z", "gap_Zn"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.n), f(r.y), f(r.v_n_Z), f(r.v_n_Zn), f(r.v_bsm), f(r.gap_Z),
               f(r.gap_Zn)});
  }
  return {t.str(), "dual-curve: " + std::to_string(rows.size()) + " rows"};
}

Output cmd_dp(const RunConfig& cfg) {
  const auto rv = load_rv(cfg, "symmetric");
  const auto u = load_utility(cfg, R"({"family":"crra","gamma":0.3333333333333333})");
  const auto ns = int_list(cfg, "n", "16,64,256");
  const auto xs = positive_range(cfg, "x", "1");
  CsvTable t({"n", "x", "u_dp", "theta_star", "mass_outside_grid"});
  const auto* crra = std::get_if<Crra>(&u.family());
  for (int n : ns) {
    for (double x : xs) {
      if (crra && u.shift() == 0.0) {
        const auto r = crra_dp(rv, n, crra->gamma);
        t.add_row({std::to_string(n), f(x), f(r.value_at(x)), f(r.theta_star), f(0.0)});
      } else {
        WealthGridSpec g;
        g.anchor = x;
        const auto r = general_dp(rv, n, u, g);
        t.add_row({std::to_string(n), f(x), f(r.value_at(x)),
                   f(r.theta_policy.front()[(g.points - 1) / 2]), f(r.mass_outside_grid)});
      }
    }
  }
  return {t.str(), "dp: " + std::to_string(ns.size() * xs.size()) + " rows (" + u.family_name() + ")"};
}

Output cmd_relax_compare(const RunConfig& cfg) {
  const auto rv = load_rv(cfg, "trinomial");
  const auto u = load_utility(cfg, R"({"family":"crra","gamma":0.3333333333333333})");
  const auto ns = int_list(cfg, "n", "2,4,8");
  const auto xs = positive_range(cfg, "x", "0.5,1,2");
  CsvTable t({"n", "x", "u_dp", "u_relaxed", "theta_star", "gap"});
  int violations = 0;
  for (int n : ns) {
    for (double x : xs) {
      const auto c = verify_relaxation(rv, n, u, x);
      if (!c.ok) ++violations;
      t.add_row({std::to_string(n), f(x), f(c.u_dp), f(c.u_relaxed), f(c.theta_star),
                 f(c.u_relaxed - c.u_dp)});
    }
  }
  return {t.str(), "relax-compare: " + std::to_string(ns.size() * xs.size()) + " cells, " +
                       std::to_string(violations) + " violations of u_dp <= u_relaxed"};
}

Output cmd_counterex(const RunConfig& cfg) {
  const auto rv = load_rv(cfg, "asymmetric");
  const auto grid = parse_range(cfg.get_or("lambda-grid", "0.1:1.0:0.1"));
  const double kmax = parse_number(cfg.get_or("kmax", "5"));
  if (!(kmax >= 1.0) || kmax != std::floor(kmax)) throw ValidationError("--kmax must be an integer >= 1");
  auto cert = build_certificate(rv, grid, static_cast<int>(kmax));
  cert.rv_id = cfg.get_or("rv", "asymmetric");
  if (cert.rv_id.find('{') != std::string::npos) cert.rv_id = "inline";
  const double v1 = std::exp(log_series_v_bsm(cert, 1.0));
  std::ostringstream summary;
  summary << "counterex: lambda0=" << f(cert.lambda0) << " (smallest accepted "
          << f(cert.lambda0_smallest) << "), " << cert.records.size()
          << " records, series v(1)=" << f(v1);
  if (cfg.get_or("format", "json") == "csv") {
    CsvTable t({"k", "n_k", "alpha_k", "log_beta_k", "log2_M", "log_x_k", "y_k"});
    for (const auto& r : cert.records) {
      t.add_row({std::to_string(r.k), std::to_string(r.n_k), f(r.alpha_k), f(r.log_beta_k),
                 f(r.log2_M), f(r.log_x_k), f(r.y_k)});
    }
    return {t.str(), summary.str()};
  }
  return {certificate_to_json(cert), summary.str()};
}

Output cmd_prop1b(const RunConfig& cfg) {
  const auto ys = positive_range(cfg, "scan-y", "0.70:0.86:0.02");
  const double z0 = cfg.get("z0") ? parse_number(*cfg.get("z0")) : default_z0();
  const auto eps = default_epsilons();
  CsvTable t({"y", "epsilon", "I_eps", "slope", "classification"});
  std::ostringstream summary;
  summary << "prop1b: z0=" << f(z0) << ";";
  for (double y : ys) {
    const auto s = divergence_scan(y, z0, eps);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      t.add_row({f(y), f(eps[i]), f(s.truncated_integrals[i]), f(s.slope), to_string(s.classification)});
    }
    summary << ' ' << f(y) << '=' << to_string(s.classification);
  }
  return {t.str(), summary.str()};
}

const std::map<std::string, std::pair<std::string, std::function<Output(const RunConfig&)>>>&
commands() {
  static const std::map<std::string, std::pair<std::string, std::function<Output(const RunConfig&)>>>
      table = {
          {"rv-check", {"terminal lattice invariants per n", cmd_rv_check}},
          {"esscher", {"Esscher parameters a_n, b_n per n", cmd_esscher}},
          {"lemma1", {"L(gamma/sqrt n)^n against exp(gamma^2/2)", cmd_lemma1}},
          {"dual-curve", {"discrete and continuous dual values over n and y", cmd_dual_curve}},
          {"dp", {"dynamic-programming value u_n(x)", cmd_dp}},
          {"relax-compare", {"u_n(x) against the relaxed complete-market value", cmd_relax_compare}},
          {"counterex", {"growth certificate of the divergent counterexample", cmd_counterex}},
          {"prop1b", {"divergence scan of the density-reciprocal dual", cmd_prop1b}},
      };
  return table;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ValidationError("empty range");
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("range must be start:stop:step, got '" + text + "'");
    const double a = parse_number(parts[0]);
    const double b = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || b < a) throw ValidationError("range '" + text + "' is empty or has step <= 0");
    const auto count = static_cast<long long>(std::floor((b - a) / step + 1e-9));
    if (count > 10'000'000) throw ValidationError("range '" + text + "' is too long");
    for (long long i = 0; i <= count; ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
  }
  std::stringstream ss(t);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number(p));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ValidationError("list '" + text + "' must be strictly increasing");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_range(text)) {
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ValidationError("not an integer: " + format_double(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"walklab: random-walk market utility-maximization laboratory"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::map<std::string, std::string> flag_values;
  std::string config_path;
  bool seedless = false;
  for (const auto& field : kFields) {
    app.add_option_function<std::string>(
        "--" + field, [&flag_values, field](const std::string& v) { flag_values[field] = v; },
        field == "rv"            ? "innovation: JSON file, inline JSON, or symmetric|asymmetric|trinomial"
        : field == "utility"     ? "utility: JSON file or inline JSON"
        : field == "out"         ? "output path (written atomically)"
        : field == "format"      ? "csv or json"
                                 : "value, list a,b,c or range start:stop:step");
  }
  app.add_option("--config", config_path, "JSON file of defaults; flags override");
  app.add_flag("--seedless", seedless, "assert that no random number generator is used");

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands()) subs[name] = app.add_subcommand(name, entry.first);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kValidation;
  }

  RunConfig cfg;
  cfg.values = flag_values;
  cfg.seedless = seedless;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cfg.command = name;
  }

  try {
    if (!config_path.empty()) merge_config(cfg, config_path);
    const auto fmt = cfg.get_or("format", cfg.command == "counterex" ? "json" : "csv");
    if (fmt != "csv" && fmt != "json") throw ValidationError("--format must be csv or json");
    if (fmt == "json" && cfg.command != "counterex") {
      throw ValidationError("--format json is only available for counterex");
    }
    const Output o = commands().at(cfg.command).second(cfg);
    std::string summary = o.summary;
    if (cfg.seedless) summary += " [seedless: deterministic, no RNG]";
    if (auto path = cfg.get("out")) {
      write_file_atomic(*path, o.content);
      out << summary << " -> " << *path << "\n";
    } else {
      out << o.content;
      err << summary << "\n";
    }
    return kOk;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const SearchError& e) {
    err << "search error: " << e.what() << "\n";
    return kSearch;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace walklab::cli
