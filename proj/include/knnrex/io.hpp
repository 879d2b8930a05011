#pragma once

#include "knnrex/data.hpp"
#include "knnrex/estimators.hpp"
#include "knnrex/errors.hpp"
#include "knnrex/types.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace knnrex {

//! Shortest decimal text that parses back to the same double.
std::string format_double(double value);

//! CSV with a header row of column names and one numeric record per line.
//! Parse failures raise ParseError naming `source` and the line number.
Dataset parse_csv(std::istream& in, const std::string& source = "<stream>");
Dataset read_csv(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::string& path, const Dataset& data);

//! Marginal file with header `variable,lo,hi,freq`, one record per bin.
//! Variables are matched to `columns` by name; bins of a variable are sorted
//! by lower edge and must tile its range without gaps.
MarginalSpec parse_marginals(std::istream& in, const std::vector<std::string>& columns,
                             Index total, const std::string& source = "<stream>");
MarginalSpec read_marginals(const std::string& path, const std::vector<std::string>& columns,
                            Index total);

//! JSON object {"weights": [...], "means": [[...]], "covariances": [[[...]]]}.
GmmSpec parse_gmm_json(const std::string& text);
GmmSpec read_gmm_json(const std::string& path);

//! Deterministic sectioned key/value text with optional CSV-style tables.
class Report {
 public:
  Report& section(std::string name);
  Report& set(std::string key, std::string value);
  Report& set(std::string key, double value);
  Report& set(std::string key, Index value);
  Report& table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

  std::string str() const;
  void write(const std::string& path) const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
  };
  Section& current();
  std::vector<Section> sections_;
};

}  // namespace knnrex
