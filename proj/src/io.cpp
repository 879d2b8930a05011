#include "knnrex/io.hpp"

#include "knnrex/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace knnrex {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& text, const std::string& source, std::size_t line) {
  const std::string t = trim(text);
  double value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw Error(Errc::ParseError, source + ":" + std::to_string(line) + ": '" + t +
                                      "' is not a number");
  }
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  return in;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& source) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) break;
  }
  if (line_no == 0 || trim(line).empty()) {
    throw Error(Errc::ParseError, source + ": missing header row");
  }
  for (auto& name : split_fields(line)) data.columns.push_back(trim(name));
  const auto d = static_cast<Index>(data.columns.size());

  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (static_cast<Index>(fields.size()) != d) {
      throw Error(Errc::ParseError, source + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(d) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    for (const auto& f : fields) values.push_back(parse_number(f, source, line_no));
    ++rows;
  }
  data.points = Eigen::Map<PointSetd>(values.data(), rows, d);
  return data;
}

Dataset read_csv(const std::string& path) {
  auto in = open_input(path);
  return parse_csv(in, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.columns.size(); ++j) {
    out << (j ? "," : "") << data.columns[j];
  }
  out << '\n';
  for (Index i = 0; i < data.points.rows(); ++i) {
    for (Index j = 0; j < data.points.cols(); ++j) {
      out << (j ? "," : "") << format_double(data.points(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot write '" + path + "'");
  write_csv(out, data);
}

MarginalSpec parse_marginals(std::istream& in, const std::vector<std::string>& columns,
                             Index total, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  struct Bin {
    double lo;
    double hi;
    Index freq;
    std::size_t line;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<Bin>> by_name;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    for (auto& f : fields) f = trim(f);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"variable", "lo", "hi", "freq"}) {
        throw Error(Errc::ParseError, source + ":" + std::to_string(line_no) +
                                          ": header must be 'variable,lo,hi,freq'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) {
      throw Error(Errc::ParseError, source + ":" + std::to_string(line_no) + ": expected 4 fields");
    }
    const double freq = parse_number(fields[3], source, line_no);
    if (freq != std::floor(freq)) {
      throw Error(Errc::ParseError, source + ":" + std::to_string(line_no) +
                                        ": frequency must be an integer");
    }
    if (!by_name.count(fields[0])) order.push_back(fields[0]);
    by_name[fields[0]].push_back({parse_number(fields[1], source, line_no),
                                  parse_number(fields[2], source, line_no),
                                  static_cast<Index>(freq), line_no});
  }
  if (!header_seen) throw Error(Errc::ParseError, source + ": missing header row");

  MarginalSpec spec;
  spec.total = total;
  for (const auto& name : order) {
    MarginalVariable var;
    var.name = name;
    const auto col = std::find(columns.begin(), columns.end(), name);
    if (col == columns.end()) {
      throw Error(Errc::InconsistentMarginals, "marginal variable '" + name + "' is not a data column");
    }
    var.column = static_cast<Index>(col - columns.begin());
    auto bins = by_name[name];
    std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.lo < b.lo; });
    var.edges.push_back(bins.front().lo);
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (!(bins[b].hi > bins[b].lo)) {
        throw Error(Errc::InconsistentMarginals, source + ":" + std::to_string(bins[b].line) +
                                                     ": bin upper edge must exceed lower edge");
      }
      if (b > 0 && bins[b].lo != bins[b - 1].hi) {
        throw Error(Errc::InconsistentMarginals, source + ":" + std::to_string(bins[b].line) +
                                                     ": bins of '" + name + "' do not tile its range");
      }
      var.edges.push_back(bins[b].hi);
      var.freq.push_back(bins[b].freq);
    }
    spec.variables.push_back(std::move(var));
  }
  validate_marginals(spec, static_cast<Index>(columns.size()));
  return spec;
}

MarginalSpec read_marginals(const std::string& path, const std::vector<std::string>& columns,
                            Index total) {
  auto in = open_input(path);
  return parse_marginals(in, columns, total, path);
}

GmmSpec parse_gmm_json(const std::string& text) {
  GmmSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    spec.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& mean : j.at("means")) {
      const auto v = mean.get<std::vector<double>>();
      spec.means.push_back(Eigen::Map<const Vectord>(v.data(), static_cast<Index>(v.size())));
    }
    for (const auto& cov : j.at("covariances")) {
      const auto rows = cov.get<std::vector<std::vector<double>>>();
      Matrixd m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Index>(rows[r].size()) != m.cols()) {
          throw Error(Errc::BadSpec, "ragged covariance matrix");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
      }
      spec.covariances.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadSpec, std::string("mixture spec: ") + e.what());
  }
  validate_gmm(spec);
  return spec;
}

GmmSpec read_gmm_json(const std::string& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_gmm_json(ss.str());
}

Report::Section& Report::current() {
  if (sections_.empty()) sections_.push_back({});
  return sections_.back();
}

Report& Report::section(std::string name) {
  sections_.push_back({std::move(name), {}, {}, {}});
  return *this;
}

Report& Report::set(std::string key, std::string value) {
  current().entries.emplace_back(std::move(key), std::move(value));
  return *this;
}

Report& Report::set(std::string key, double value) { return set(std::move(key), format_double(value)); }

Report& Report::set(std::string key, Index value) { return set(std::move(key), std::to_string(value)); }

Report& Report::table(std::vector<std::string> header, std::vector<std::vector<std::string>> rows) {
  auto& s = current();
  s.header = std::move(header);
  s.rows = std::move(rows);
  return *this;
}

std::string Report::str() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : sections_) {
    if (!first) out << '\n';
    first = false;
    if (!s.name.empty()) out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
    if (!s.header.empty()) {
      for (std::size_t j = 0; j < s.header.size(); ++j) out << (j ? "," : "") << s.header[j];
      out << '\n';
      for (const auto& row : s.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << '\n';
      }
    }
  }
  return out.str();
}

void Report::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot write '" + path + "'");
  out << str();
}

}  // namespace knnrex
