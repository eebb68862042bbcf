#pragma once

#include <string>
#include <vector>

#include "walklab/conjugate.hpp"
#include "walklab/counterexample.hpp"
#include "walklab/rv_lattice.hpp"

namespace walklab {

// Text that starts with '{' or '[' is parsed as inline JSON; anything else is
// read as a file path. Missing files and malformed JSON raise ValidationError.
std::string read_json_arg(const std::string& arg);

// {"atoms":[{"value":v,"prob":p}, ...]}
FiniteRV parse_rv(const std::string& json_text);
std::string rv_to_json(const FiniteRV& rv);

// {"family":"crra","gamma":g} | {"family":"power_conjugate","alpha":a,"beta":b}
// | {"family":"series_conjugate","terms":[{"alpha":a,"log_beta":lb}, ...]}
// | {"family":"prop1b_v0","z0":z}
UtilitySpec parse_utility(const std::string& json_text);
std::string utility_to_json(const UtilitySpec& u);

std::string certificate_to_json(const CounterexampleCertificate& cert);

// printf("%.17g"): round-trips every double and is locale independent.
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string lattice_to_csv(const LatticeDistribution& dist);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace walklab
