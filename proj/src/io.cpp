#include "hgr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <openssl/evp.h>

namespace hgr::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(Errc::ParseError, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct CsvTable {
  std::vector<std::string_view> header;
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::string_view line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    if (!line.empty() && line.front() != '#') {
      if (table.header.empty()) {
        table.header = split(line, ',');
      } else {
        table.rows.push_back(split(line, ','));
        table.line_numbers.push_back(line_no);
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (table.header.empty()) parse_error("missing CSV header");
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (table.rows[r].size() != table.header.size())
      parse_error("line " + std::to_string(table.line_numbers[r]) + ": expected " +
                  std::to_string(table.header.size()) + " fields");
  return table;
}

int to_int(std::string_view s, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    parse_error("line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  return v;
}

double to_double(std::string_view s, std::size_t line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    parse_error("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

// Number of x-columns; checks that the header is x1..xp followed by `tail`.
int check_x_header(const std::vector<std::string_view>& header, const std::vector<std::string_view>& tail) {
  const int p = static_cast<int>(header.size()) - static_cast<int>(tail.size());
  if (p < 1) parse_error("header needs at least one x column");
  for (int i = 0; i < p; ++i)
    if (header[i] != "x" + std::to_string(i + 1)) parse_error("header column " + std::to_string(i + 1) + " must be x" + std::to_string(i + 1));
  for (std::size_t k = 0; k < tail.size(); ++k)
    if (header[p + k] != tail[k]) parse_error("header column must be '" + std::string(tail[k]) + "'");
  return p;
}

int resolve_m(std::optional<int> m, int max_label) {
  const int inferred = std::max(2, max_label + 1);
  if (!m) return inferred;
  if (*m < inferred) throw Error(Errc::LabelOutOfRange, "x label " + std::to_string(max_label) + " >= m");
  return *m;
}

Eigen::MatrixXd read_matrix(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  std::vector<double> flat;
  if (!j.is_array()) parse_error(what + " must be an array");
  for (const auto& e : j) {
    if (e.is_array()) {
      for (const auto& x : e) {
        if (!x.is_number()) parse_error(what + " has a non-numeric entry");
        flat.push_back(x.get<double>());
      }
    } else {
      if (!e.is_number()) parse_error(what + " has a non-numeric entry");
      flat.push_back(e.get<double>());
    }
  }
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
    parse_error(what + " must hold " + std::to_string(rows * cols) + " numbers");
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_into(const nlohmann::json& v, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case value_t::array: {
      out += '[';
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ',';
        dump_into(v[k], out);
      }
      out += ']';
      break;
    }
    case value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
      break;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DiscreteJoint parse_joint_csv(std::string_view text, std::optional<int> m) {
  const CsvTable t = read_csv(text);
  const int p = check_x_header(t.header, {"y", "prob"});
  int max_label = 0;
  std::vector<JointEntry> entries;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    JointEntry e;
    for (int i = 0; i < p; ++i) {
      e.x.push_back(to_int(t.rows[r][i], t.line_numbers[r]));
      max_label = std::max(max_label, e.x.back());
    }
    e.y = to_int(t.rows[r][p], t.line_numbers[r]);
    e.prob = to_double(t.rows[r][p + 1], t.line_numbers[r]);
    entries.push_back(std::move(e));
  }
  return joint_from_table(AlphabetSpec(p, resolve_m(m, max_label)), entries);
}

Dataset parse_dataset_csv(std::string_view text, std::optional<int> m) {
  const CsvTable t = read_csv(text);
  const int p = check_x_header(t.header, {"y"});
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  if (n == 0) throw Error(Errc::EmptyDataset, "dataset has no rows");
  Eigen::MatrixXi x(n, p);
  Eigen::VectorXi y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int i = 0; i < p; ++i) x(r, i) = to_int(t.rows[r][i], t.line_numbers[r]);
    y(r) = to_int(t.rows[r][p], t.line_numbers[r]);
  }
  const AlphabetSpec spec(p, resolve_m(m, std::max(x.maxCoeff(), 0)));
  return Dataset(spec, std::move(x), std::move(y));
}

GenericJoint parse_generic_csv(std::string_view text) {
  const CsvTable t = read_csv(text);
  if (t.header.size() != 3 || t.header[0] != "x" || t.header[1] != "y" || t.header[2] != "prob")
    parse_error("generic joint header must be x,y,prob");
  std::map<std::pair<int, int>, double> cells;
  int nx = 0, ny = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int x = to_int(t.rows[r][0], t.line_numbers[r]);
    const int y = to_int(t.rows[r][1], t.line_numbers[r]);
    if (x < 0 || y < 0) throw Error(Errc::LabelOutOfRange, "labels must be non-negative");
    if (!cells.emplace(std::pair{x, y}, to_double(t.rows[r][2], t.line_numbers[r])).second)
      throw Error(Errc::DuplicateEntry, "cell listed twice");
    nx = std::max(nx, x + 1);
    ny = std::max(ny, y + 1);
  }
  if (cells.empty()) parse_error("generic joint has no rows");
  Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(nx, ny);
  for (const auto& [key, v] : cells) prob(key.first, key.second) = v;
  return GenericJoint(std::move(prob));
}

PairwiseMarginalSet parse_marginals_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    parse_error(e.what());
  }
  if (!j.is_object() || !j.contains("p") || !j.contains("m") || !j.contains("xy"))
    parse_error("marginals need fields p, m, xy (and xx when p > 1)");
  if (!j["p"].is_number_integer() || !j["m"].is_number_integer()) parse_error("p and m must be integers");
  const AlphabetSpec spec(j["p"].get<int>(), j["m"].get<int>());
  const int p = spec.p(), m = spec.m();
  const Eigen::Index pm = spec.indicator_size();
  PairwiseMarginalSet out{spec, Eigen::MatrixXd::Zero(pm, pm), Eigen::MatrixX2d::Zero(pm, 2)};

  const auto& xy = j["xy"];
  if (!xy.is_object()) parse_error("xy must be an object");
  for (int i = 0; i < p; ++i) {
    const std::string key = std::to_string(i + 1);
    if (!xy.contains(key)) parse_error("xy is missing \"" + key + "\"");
    out.with_y(i) = read_matrix(xy[key], m, 2, "xy[" + key + "]");
  }
  for (int i = 0; i < p; ++i) out.pair(i, i).diagonal() = out.with_y(i).rowwise().sum();

  if (p > 1) {
    if (!j.contains("xx") || !j["xx"].is_object()) parse_error("xx must be an object");
    const auto& xx = j["xx"];
    for (auto it = xx.begin(); it != xx.end(); ++it) {
      const auto parts = split(it.key(), ',');
      if (parts.size() != 2) parse_error("xx key '" + it.key() + "' must be \"i,j\"");
      const int i = to_int(parts[0], 0) - 1, jj = to_int(parts[1], 0) - 1;
      if (i < 0 || jj < 0 || i >= p || jj >= p || i >= jj) parse_error("xx key '" + it.key() + "' needs 1 <= i < j <= p");
    }
    for (int i = 0; i < p; ++i) {
      for (int k = i + 1; k < p; ++k) {
        const std::string key = std::to_string(i + 1) + "," + std::to_string(k + 1);
        if (!xx.contains(key)) parse_error("xx is missing \"" + key + "\"");
        const Eigen::MatrixXd t = read_matrix(xx[key], m, m, "xx[" + key + "]");
        out.pair(i, k) = t;
        out.pair(k, i) = t.transpose();
      }
    }
  }
  return out;
}

GaussianMoments parse_moments_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    parse_error(e.what());
  }
  if (!j.is_object() || !j.contains("mu") || !j.contains("lambda")) parse_error("moments need fields mu and lambda");
  if (!j["mu"].is_array() || j["mu"].size() < 2) parse_error("mu must be an array of length p+1 >= 2");
  const auto n = static_cast<Eigen::Index>(j["mu"].size());
  const Eigen::VectorXd mu = read_matrix(j["mu"], n, 1, "mu");
  const Eigen::MatrixXd lambda = read_matrix(j["lambda"], n, n, "lambda");
  return GaussianMoments(mu, lambda);
}

std::string format_joint_csv(const DiscreteJoint& joint) {
  const auto& spec = joint.spec();
  std::string out;
  for (int i = 0; i < spec.p(); ++i) out += "x" + std::to_string(i + 1) + ",";
  out += "y,prob\n";
  for (Eigen::Index s = 0; s < joint.prob().rows(); ++s) {
    const auto labels = spec.decode(s);
    for (int y = 0; y < 2; ++y) {
      for (int l : labels) out += std::to_string(l) + ",";
      out += std::to_string(y) + "," + format_double(joint(s, y)) + "\n";
    }
  }
  return out;
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

nlohmann::json marginals_to_json(const PairwiseMarginalSet& mg) {
  const int p = mg.spec.p(), m = mg.spec.m();
  nlohmann::json j;
  j["p"] = p;
  j["m"] = m;
  j["xx"] = nlohmann::json::object();
  j["xy"] = nlohmann::json::object();
  for (int i = 0; i < p; ++i) {
    nlohmann::json flat = nlohmann::json::array();
    for (int k = 0; k < m; ++k) {
      flat.push_back(mg.with_y(i)(k, 0));
      flat.push_back(mg.with_y(i)(k, 1));
    }
    j["xy"][std::to_string(i + 1)] = flat;
    for (int l = i + 1; l < p; ++l) {
      nlohmann::json t = nlohmann::json::array();
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) t.push_back(mg.pair(i, l)(a, b));
      j["xx"][std::to_string(i + 1) + "," + std::to_string(l + 1)] = t;
    }
  }
  return j;
}

std::string dump_json(const nlohmann::json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

std::string content_digest(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::InvalidArgument, "sha256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int k = 0; k < len; ++k) {
    out += kHex[md[k] >> 4];
    out += kHex[md[k] & 0xF];
  }
  return out;
}

}  // namespace hgr::io
