#include "npmoment/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "npmoment/errors.hpp"

namespace npmoment {

namespace {

void check_shapes(const Matrix& x, const Matrix& y, const Matrix& t,
                  const std::vector<double>& w) {
  if (x.rows() == 0) throw SchemaError("empty dataset");
  if (x.cols() == 0) throw SchemaError("dataset needs at least one covariate column");
  if (y.rows() != x.rows() || y.cols() == 0)
    throw SchemaError("outcome block must be n x q with q >= 1");
  if (t.cols() > 0 && t.rows() != x.rows())
    throw SchemaError("treatment block must have n rows");
  if (!w.empty() && w.size() != x.rows())
    throw SchemaError("instrument column must have n entries");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& field, std::size_t line_no, const std::string& col) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line_no) + ": column '" + col +
                     "' is not numeric: '" + field + "'");
  return v;
}

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

Dataset::Dataset(Matrix covariates, Matrix outcomes)
    : Dataset(std::move(covariates), std::move(outcomes), Matrix{}, {}) {}

Dataset::Dataset(Matrix covariates, Matrix outcomes, Matrix treatments,
                 std::vector<double> instruments)
    : x_(std::move(covariates)), y_(std::move(outcomes)), t_(std::move(treatments)),
      w_(std::move(instruments)) {
  check_shapes(x_, y_, t_, w_);
}

Observation Dataset::row(std::size_t i) const {
  Observation o;
  o.x = x_.row(i);
  o.y = y_.row(i);
  if (t_.cols() > 0) o.t = t_.row(i);
  if (!w_.empty()) o.w = w_[i];
  return o;
}

void Dataset::write_csv(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  std::string line;
  for (std::size_t j = 0; j < dim(); ++j) line += "c" + std::to_string(j) + ",";
  for (std::size_t j = 0; j < outcome_dim(); ++j)
    line += outcome_dim() == 1 ? std::string("y,") : "y" + std::to_string(j) + ",";
  for (std::size_t j = 0; j < treatment_dim(); ++j) line += "t" + std::to_string(j) + ",";
  if (has_instrument()) line += "w,";
  line.pop_back();
  f << line << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < dim(); ++j) {
      format_double(line, x_(i, j));
      line += ',';
    }
    for (std::size_t j = 0; j < outcome_dim(); ++j) {
      format_double(line, y_(i, j));
      line += ',';
    }
    for (std::size_t j = 0; j < treatment_dim(); ++j) {
      format_double(line, t_(i, j));
      line += ',';
    }
    if (has_instrument()) {
      format_double(line, w_[i]);
      line += ',';
    }
    line.pop_back();
    f << line << '\n';
  }
}

void Dataset::write_json(const std::filesystem::path& path) const {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    nlohmann::json o;
    o["x"] = std::vector<double>(x_.row(i).begin(), x_.row(i).end());
    o["y"] = std::vector<double>(y_.row(i).begin(), y_.row(i).end());
    if (has_treatments()) o["t"] = std::vector<double>(t_.row(i).begin(), t_.row(i).end());
    if (has_instrument()) o["w"] = w_[i];
    arr.push_back(std::move(o));
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << arr.dump(2) << '\n';
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(f, line)) throw ParseError("empty dataset");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  enum class Role { covariate, outcome, treatment, instrument };
  std::unordered_map<std::string, Role> roles;
  auto assign = [&](const std::vector<std::string>& names, Role r) {
    for (const auto& name : names) {
      if (!roles.emplace(name, r).second)
        throw SchemaError("column '" + name + "' assigned to more than one role");
    }
  };
  assign(schema.covariates, Role::covariate);
  assign(schema.outcomes, Role::outcome);
  assign(schema.treatments, Role::treatment);
  if (schema.instrument) assign({*schema.instrument}, Role::instrument);

  std::vector<int> cov_col(schema.covariates.size(), -1);
  std::vector<int> out_col(schema.outcomes.size(), -1);
  std::vector<int> trt_col(schema.treatments.size(), -1);
  int ins_col = -1;
  auto locate = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("column '" + name + "' not found in header");
    return static_cast<int>(it - header.begin());
  };
  for (std::size_t j = 0; j < schema.covariates.size(); ++j) cov_col[j] = locate(schema.covariates[j]);
  for (std::size_t j = 0; j < schema.outcomes.size(); ++j) out_col[j] = locate(schema.outcomes[j]);
  for (std::size_t j = 0; j < schema.treatments.size(); ++j) trt_col[j] = locate(schema.treatments[j]);
  if (schema.instrument) ins_col = locate(*schema.instrument);
  if (cov_col.empty()) throw SchemaError("schema declares no covariate columns");
  if (out_col.empty()) throw SchemaError("schema declares no outcome columns");

  std::vector<double> xv, yv, tv, wv;
  std::size_t n = 0;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    for (std::size_t j = 0; j < cov_col.size(); ++j)
      xv.push_back(parse_number(fields[cov_col[j]], line_no, schema.covariates[j]));
    for (std::size_t j = 0; j < out_col.size(); ++j)
      yv.push_back(parse_number(fields[out_col[j]], line_no, schema.outcomes[j]));
    for (std::size_t j = 0; j < trt_col.size(); ++j)
      tv.push_back(parse_number(fields[trt_col[j]], line_no, schema.treatments[j]));
    if (ins_col >= 0) wv.push_back(parse_number(fields[ins_col], line_no, *schema.instrument));
    ++n;
  }
  if (n == 0) throw ParseError("empty dataset");

  Matrix x(n, cov_col.size(), std::move(xv));
  Matrix y(n, out_col.size(), std::move(yv));
  Matrix t = trt_col.empty() ? Matrix{} : Matrix(n, trt_col.size(), std::move(tv));
  return Dataset(std::move(x), std::move(y), std::move(t), std::move(wv));
}

Dataset load_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  nlohmann::json arr;
  try {
    f >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!arr.is_array() || arr.empty()) throw ParseError("empty dataset");

  const std::size_t n = arr.size();
  const std::size_t D = arr[0].at("x").size();
  const std::size_t q = arr[0].at("y").size();
  const std::size_t pt = arr[0].contains("t") ? arr[0]["t"].size() : 0;
  const bool has_w = arr[0].contains("w");

  std::vector<double> xv, yv, tv, wv;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = arr[i];
    if (o.at("x").size() != D || o.at("y").size() != q ||
        (o.contains("t") ? o["t"].size() : 0) != pt || o.contains("w") != has_w)
      throw SchemaError("record " + std::to_string(i) + ": layout differs from record 0");
    for (const auto& v : o["x"]) xv.push_back(v.get<double>());
    for (const auto& v : o["y"]) yv.push_back(v.get<double>());
    if (pt > 0)
      for (const auto& v : o["t"]) tv.push_back(v.get<double>());
    if (has_w) wv.push_back(o["w"].get<double>());
  }
  Matrix x(n, D, std::move(xv));
  Matrix y(n, q, std::move(yv));
  Matrix t = pt == 0 ? Matrix{} : Matrix(n, pt, std::move(tv));
  return Dataset(std::move(x), std::move(y), std::move(t), std::move(wv));
}

std::vector<std::string> expand_column_range(const std::vector<std::string>& specs) {
  std::vector<std::string> out;
  for (const auto& spec : specs) {
    const auto pos = spec.find("..");
    if (pos == std::string::npos) {
      out.push_back(spec);
      continue;
    }
    const std::string first = spec.substr(0, pos);
    const std::string last = spec.substr(pos + 2);
    // Shared alphabetic prefix followed by an integer range, e.g. c0..c19.
    std::size_t digits = first.size();
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(first[digits - 1]))) --digits;
    const std::string prefix = first.substr(0, digits);
    if (digits == first.size() || last.size() <= prefix.size() ||
        last.compare(0, prefix.size(), prefix) != 0)
      throw ConfigError("bad column range '" + spec + "'");
    const long a = std::stol(first.substr(prefix.size()));
    const long b = std::stol(last.substr(prefix.size()));
    if (b < a) throw ConfigError("bad column range '" + spec + "'");
    for (long i = a; i <= b; ++i) out.push_back(prefix + std::to_string(i));
  }
  return out;
}

std::vector<std::uint32_t> subsample_without_replacement(std::size_t n, std::size_t s,
                                                         RngStream& rng) {
  SubsetSampler sampler(n);
  std::vector<std::uint32_t> out;
  sampler.draw(s, rng, out);
  return out;
}

SubsetSampler::SubsetSampler(std::size_t n) : index_(n) {
  for (std::size_t i = 0; i < n; ++i) index_[i] = static_cast<std::uint32_t>(i);
}

void SubsetSampler::draw(std::size_t s, RngStream& rng, std::vector<std::uint32_t>& out) {
  const std::size_t n = index_.size();
  if (s < 1 || s > n) throw PreconditionError("subsample: need 1 <= s <= n");
  out.resize(s);
  // Partial Fisher-Yates; the swaps are undone afterwards so the next draw
  // starts from the identity arrangement (the undo replays positions in
  // reverse, restoring both slots of each swap).
  std::vector<std::pair<std::uint32_t, std::uint32_t>> swaps;
  swaps.reserve(s);
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    swaps.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    std::swap(index_[i], index_[j]);
    out[i] = index_[i];
  }
  for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) std::swap(index_[it->first], index_[it->second]);
}

}  // namespace npmoment
