#include "walklab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "walklab/errors.hpp"

namespace walklab {

using nlohmann::json;

namespace {

json parse_or_throw(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

double number_field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    throw ValidationError(std::string(what) + ": missing numeric field \"" + key + "\"");
  }
  return j.at(key).get<double>();
}

json number(double x) {
  // JSON has no inf/nan; keep them representable as strings.
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

std::string read_json_arg(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return arg;
  std::ifstream in(arg);
  if (!in) throw ValidationError("cannot read JSON file '" + arg + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

FiniteRV parse_rv(const std::string& json_text) {
  const json j = parse_or_throw(json_text, "rv");
  if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array()) {
    throw ValidationError("rv: expected {\"atoms\":[{\"value\":..,\"prob\":..}, ...]}");
  }
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    atoms.push_back({number_field(a, "value", "rv atom"), number_field(a, "prob", "rv atom")});
  }
  return FiniteRV(std::move(atoms));
}

std::string rv_to_json(const FiniteRV& rv) {
  json atoms = json::array();
  for (const auto& a : rv.atoms()) atoms.push_back({{"value", a.value}, {"prob", a.prob}});
  return json{{"atoms", atoms}}.dump();
}

UtilitySpec parse_utility(const std::string& json_text) {
  const json j = parse_or_throw(json_text, "utility");
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ValidationError("utility: missing string field \"family\"");
  }
  const auto family = j.at("family").get<std::string>();
  if (family == "crra") return UtilitySpec::crra(number_field(j, "gamma", "crra"));
  if (family == "power_conjugate") {
    return UtilitySpec::power_conjugate(number_field(j, "alpha", "power_conjugate"),
                                        number_field(j, "beta", "power_conjugate"));
  }
  if (family == "series_conjugate") {
    if (!j.contains("terms") || !j.at("terms").is_array()) {
      throw ValidationError("series_conjugate: missing array field \"terms\"");
    }
    std::vector<SeriesTerm> terms;
    for (const auto& t : j.at("terms")) {
      terms.push_back({number_field(t, "alpha", "series term"),
                       number_field(t, "log_beta", "series term")});
    }
    return UtilitySpec::series_conjugate(std::move(terms));
  }
  if (family == "prop1b_v0") return UtilitySpec::prop1b_v0(number_field(j, "z0", "prop1b_v0"));
  throw ValidationError("utility: unknown family '" + family + "'");
}

std::string utility_to_json(const UtilitySpec& u) {
  json j;
  const auto& f = u.family();
  if (const auto* c = std::get_if<Crra>(&f)) {
    j = {{"family", "crra"}, {"gamma", c->gamma}};
  } else if (const auto* p = std::get_if<PowerConjugate>(&f)) {
    j = {{"family", "power_conjugate"}, {"alpha", p->alpha}, {"beta", p->beta}};
  } else if (const auto* s = std::get_if<SeriesConjugate>(&f)) {
    json terms = json::array();
    for (const auto& t : s->terms) terms.push_back({{"alpha", t.alpha}, {"log_beta", t.log_beta}});
    j = {{"family", "series_conjugate"}, {"terms", terms}};
  } else if (const auto* v = std::get_if<Prop1bV0>(&f)) {
    j = {{"family", "prop1b_v0"}, {"z0", v->z0}};
  } else {
    throw ValidationError("utility_to_json: tabulated utilities have no JSON form");
  }
  if (u.shift() != 0.0) j["shift"] = u.shift();
  return j.dump();
}

std::string certificate_to_json(const CounterexampleCertificate& cert) {
  json records = json::array();
  for (const auto& r : cert.records) {
    records.push_back({{"k", r.k},
                       {"n_k", r.n_k},
                       {"alpha_k", number(r.alpha_k)},
                       {"log_beta_k", number(r.log_beta_k)},
                       {"log2_M", number(r.log2_M)},
                       {"log_x_k", number(r.log_x_k)},
                       {"y_k", number(r.y_k)}});
  }
  json j{{"rv", cert.rv_id},
         {"lambda0", cert.lambda0},
         {"lambda0_smallest_accepted", cert.lambda0_smallest},
         {"ratio_strictly_increasing", cert.ratio_strictly_increasing},
         {"records", records}};
  return j.dump(2) + "\n";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw ValidationError("CsvTable: row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string lattice_to_csv(const LatticeDistribution& dist) {
  CsvTable t({"w", "prob"});
  for (const auto& p : dist.points()) t.add_row({format_double(p.w), format_double(p.prob)});
  return t.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out.flush()) throw ValidationError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace walklab
