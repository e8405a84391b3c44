#include "pidq/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pidq/errors.hpp"

namespace pidq::io {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
  return j;
}

Matrix matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ValidationError(name + " must be a non-empty array of rows");
  }
  Matrix m(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
  for (int r = 0; r < m.rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != m.cols) {
      throw ValidationError(name + " row " + std::to_string(r) + " has the wrong length");
    }
    for (int c = 0; c < m.cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ValidationError(name + "[" + std::to_string(r) + "][" + std::to_string(c) +
                              "] is not a number");
      }
      m.at(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == '\t' || ch == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

json dist_to_json(const JointDist& d) {
  json j;
  j["cardinalities"] = {d.card.n1, d.card.n2, d.card.ny};
  j["p"] = d.probs;
  return j;
}

JointDist dist_from_json(const json& j, int64_t cell_cap) {
  if (!j.contains("cardinalities") || !j.contains("p")) {
    throw ValidationError("distribution file needs 'cardinalities' and 'p' fields");
  }
  const auto& c = j["cardinalities"];
  if (!c.is_array() || c.size() != 3) {
    throw ValidationError("'cardinalities' must be [n1, n2, ny]");
  }
  JointDist d;
  d.card = {c[0].get<int>(), c[1].get<int>(), c[2].get<int>()};
  d.card.validate(cell_cap);
  const auto& p = j["p"];
  if (!p.is_array() || static_cast<int64_t>(p.size()) != d.card.cells()) {
    throw ValidationError("'p' has " + std::to_string(p.size()) + " entries, expected " +
                          std::to_string(d.card.cells()));
  }
  d.probs.reserve(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    if (!p[i].is_number()) {
      throw ValidationError("p[" + std::to_string(i) + "] is not a number");
    }
    d.probs.push_back(p[i].get<double>());
  }
  d.validate(cell_cap);
  return d;
}

JointDist load_dist(const std::string& path, int64_t cell_cap) {
  return dist_from_json(parse_file(path), cell_cap);
}

void save_dist(const JointDist& d, const std::string& path) {
  atomic_write_text(path, dist_to_json(d).dump(2) + "\n");
}

json marginals_to_json(const PairwiseMarginals& m) {
  json j;
  j["m1y"] = matrix_to_json(m.m1y);
  j["m2y"] = matrix_to_json(m.m2y);
  if (m.m12) j["m12"] = matrix_to_json(*m.m12);
  return j;
}

PairwiseMarginals marginals_from_json(const json& j) {
  if (!j.contains("m1y") || !j.contains("m2y")) {
    throw ValidationError("marginals file needs 'm1y' and 'm2y' fields");
  }
  PairwiseMarginals m;
  m.m1y = matrix_from_json(j["m1y"], "m1y");
  m.m2y = matrix_from_json(j["m2y"], "m2y");
  if (j.contains("m12") && !j["m12"].is_null()) {
    m.m12 = matrix_from_json(j["m12"], "m12");
  }
  m.validate();
  return m;
}

PairwiseMarginals load_marginals(const std::string& path) {
  return marginals_from_json(parse_file(path));
}

void save_marginals(const PairwiseMarginals& m, const std::string& path) {
  atomic_write_text(path, marginals_to_json(m).dump(2) + "\n");
}

SampleTable load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path + "' is empty");
  const std::vector<std::string> header = split_fields(line);
  if (header.empty()) throw ValidationError("'" + path + "' has an empty header row");

  std::vector<int> x1_cols, x2_cols;
  int y_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h == "x1" || h.rfind("x1_", 0) == 0) {
      x1_cols.push_back(static_cast<int>(c));
    } else if (h == "x2" || h.rfind("x2_", 0) == 0) {
      x2_cols.push_back(static_cast<int>(c));
    } else if (h == "y") {
      y_col = static_cast<int>(c);
    } else {
      throw ValidationError("'" + path + "': unknown column '" + h + "'");
    }
  }
  if (x1_cols.empty() || x2_cols.empty() || y_col < 0) {
    throw ValidationError("'" + path + "' needs x1..., x2... and y columns");
  }

  SampleTable t;
  t.d1 = static_cast<int>(x1_cols.size());
  t.d2 = static_cast<int>(x2_cols.size());

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.empty()) continue;  // blank trailing line
    if (fields.size() != header.size()) {
      throw ValidationError("'" + path + "' line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    auto parse_num = [&](int col) {
      const std::string& s = fields[col];
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(s.c_str(), &end);
      if (errno != 0 || end == s.c_str() || *end != '\0') {
        throw ValidationError("'" + path + "' line " + std::to_string(line_no) + " column '" +
                              header[col] + "': '" + s + "' is not numeric");
      }
      return v;
    };
    for (int col : x1_cols) t.x1.push_back(parse_num(col));
    for (int col : x2_cols) t.x2.push_back(parse_num(col));
    const double y = parse_num(y_col);
    if (y != static_cast<int>(y) || y < 0) {
      throw ValidationError("'" + path + "' line " + std::to_string(line_no) +
                            ": label must be a non-negative integer, got '" + fields[y_col] + "'");
    }
    t.y.push_back(static_cast<int>(y));
  }
  t.validate();
  return t;
}

void save_samples(const SampleTable& t, const std::string& path) {
  std::ostringstream os;
  for (int c = 0; c < t.d1; ++c) os << (t.d1 == 1 ? std::string("x1") : "x1_" + std::to_string(c)) << ",";
  for (int c = 0; c < t.d2; ++c) os << (t.d2 == 1 ? std::string("x2") : "x2_" + std::to_string(c)) << ",";
  os << "y\n";
  const int n = t.rows();
  os.precision(17);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < t.d1; ++c) os << t.x1[static_cast<size_t>(i) * t.d1 + c] << ",";
    for (int c = 0; c < t.d2; ++c) os << t.x2[static_cast<size_t>(i) * t.d2 + c] << ",";
    os << t.y[i] << "\n";
  }
  atomic_write_text(path, os.str());
}

json library_to_json(const ModelLibrary& lib) {
  json entries = json::array();
  for (const LibraryEntry& e : lib.entries) {
    json models = json::array();
    for (const RankedModel& m : e.models) {
      models.push_back({{"id", m.id}, {"score", m.score}});
    }
    entries.push_back({{"dataset_id", e.dataset_id},
                       {"profile",
                        {{"r", e.profile.r_hat},
                         {"u1", e.profile.u1_hat},
                         {"u2", e.profile.u2_hat},
                         {"s", e.profile.s_hat}}},
                       {"models", std::move(models)}});
  }
  return json{{"entries", std::move(entries)}};
}

ModelLibrary library_from_json(const json& j) {
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw ValidationError("library file needs an 'entries' array");
  }
  ModelLibrary lib;
  for (const auto& je : j["entries"]) {
    LibraryEntry e;
    e.dataset_id = je.at("dataset_id").get<std::string>();
    const auto& p = je.at("profile");
    e.profile.r_hat = p.at("r").get<double>();
    e.profile.u1_hat = p.at("u1").get<double>();
    e.profile.u2_hat = p.at("u2").get<double>();
    e.profile.s_hat = p.at("s").get<double>();
    for (const auto& jm : je.at("models")) {
      e.models.push_back({jm.at("id").get<std::string>(), jm.at("score").get<double>()});
    }
    lib.entries.push_back(std::move(e));
  }
  lib.validate();
  return lib;
}

ModelLibrary load_library(const std::string& path) {
  try {
    return library_from_json(parse_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

void save_library(const ModelLibrary& lib, const std::string& path) {
  atomic_write_text(path, library_to_json(lib).dump(2) + "\n");
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw ValidationError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ValidationError("cannot rename '" + tmp + "' to '" + path + "': " +
                          std::strerror(errno));
  }
}

json round_numbers(const json& j, int significant) {
  if (j.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, j.get<double>());
    return json(std::strtod(buf, nullptr));
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_numbers(*it, significant);
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(round_numbers(v, significant));
    return out;
  }
  return j;
}

int64_t cell_cap_from_env() {
  const char* env = std::getenv("PIDQ_MAX_CELLS");
  if (!env || !*env) return kDefaultCellCap;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) {
    throw ValidationError("PIDQ_MAX_CELLS must be a positive integer, got '" + std::string(env) +
                          "'");
  }
  return static_cast<int64_t>(v);
}

}  // namespace pidq::io
