#include "dcmm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "dcmm/errors.hpp"

namespace dcmm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& tok, int line_no) {
  int v = 0;
  std::string t = trim(tok);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw validation_error("parse error at line " + std::to_string(line_no) +
                           ": expected integer, got '" + tok + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

}  // namespace

AdjacencyFormat adjacency_format_from_string(const std::string& s) {
  if (s == "edgelist") return AdjacencyFormat::EdgeListCsv;
  if (s == "dense") return AdjacencyFormat::DenseCsv;
  throw validation_error("unknown adjacency format '" + s +
                         "' (expected edgelist | dense)");
}

namespace {

AdjacencyMatrix load_edge_list(const std::string& path, bool self_loop) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "'");
  std::vector<std::pair<int, int>> edges;
  int n = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      auto pos = t.find("n=");
      if (pos != std::string::npos) n = std::max(n, parse_int(t.substr(pos + 2), line_no));
      continue;
    }
    auto toks = split_csv(t);
    if (toks.size() != 2)
      throw validation_error("parse error at line " + std::to_string(line_no) +
                             ": expected 'i,j'");
    int i = parse_int(toks[0], line_no);
    int j = parse_int(toks[1], line_no);
    if (i < 0 || j < 0)
      throw validation_error("parse error at line " + std::to_string(line_no) +
                             ": negative node index");
    if (i == j && !self_loop)
      throw validation_error("self-loop edge at line " + std::to_string(line_no) +
                             " but self-loop mode is off");
    edges.emplace_back(i, j);
    n = std::max(n, std::max(i, j) + 1);
  }
  AdjacencyMatrix adj;
  adj.n = n;
  adj.self_loop = self_loop;
  adj.entries = Matrix::Zero(n, n);
  for (auto [i, j] : edges) {
    adj.entries(i, j) = 1.0;
    adj.entries(j, i) = 1.0;
  }
  return adj;
}

AdjacencyMatrix load_dense(const std::string& path, bool self_loop) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') continue;
    auto toks = split_csv(t);
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& tok : toks) {
      std::string v = trim(tok);
      double x = 0.0;
      try {
        x = std::stod(v);
      } catch (const std::exception&) {
        throw validation_error("parse error at line " + std::to_string(line_no) +
                               ": expected number, got '" + tok + "'");
      }
      if (std::abs(x) > 1e-9 && std::abs(x - 1.0) > 1e-9)
        throw validation_error("parse error at line " + std::to_string(line_no) +
                               ": entries must be 0 or 1");
      row.push_back(std::abs(x) <= 1e-9 ? 0.0 : 1.0);
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  AdjacencyMatrix adj;
  adj.n = n;
  adj.self_loop = self_loop;
  adj.entries = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw validation_error("dense matrix row " + std::to_string(i) + " has " +
                             std::to_string(rows[static_cast<std::size_t>(i)].size()) +
                             " entries, expected " + std::to_string(n));
    for (int j = 0; j < n; ++j)
      adj.entries(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      if (adj.entries(i, j) != adj.entries(j, i))
        throw validation_error("dense matrix asymmetric at (" + std::to_string(i) +
                               "," + std::to_string(j) + ")");
    if (!self_loop && adj.entries(i, i) != 0.0)
      throw validation_error("dense matrix has self-loop at node " + std::to_string(i) +
                             " but self-loop mode is off");
  }
  return adj;
}

}  // namespace

AdjacencyMatrix load_adjacency(const std::string& path, AdjacencyFormat format,
                               bool self_loop) {
  return format == AdjacencyFormat::EdgeListCsv ? load_edge_list(path, self_loop)
                                                : load_dense(path, self_loop);
}

void save_adjacency(const std::string& path, const AdjacencyMatrix& adj,
                    AdjacencyFormat format) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write '" + path + "'");
  if (format == AdjacencyFormat::EdgeListCsv) {
    out << "# n=" << adj.n << "\n";
    for (int i = 0; i < adj.n; ++i)
      for (int j = i; j < adj.n; ++j)
        if (adj.entries(i, j) != 0.0 && (i != j || adj.self_loop))
          out << i << "," << j << "\n";
  } else {
    for (int i = 0; i < adj.n; ++i) {
      for (int j = 0; j < adj.n; ++j) {
        if (j) out << ",";
        out << static_cast<int>(adj.entries(i, j));
      }
      out << "\n";
    }
  }
}

nlohmann::json params_to_json(const DcmmParams& params) {
  nlohmann::json j;
  j["n"] = params.n;
  j["k"] = params.k;
  j["theta"] = std::vector<double>(params.theta.data(), params.theta.data() + params.n);
  std::vector<std::vector<double>> pi(static_cast<std::size_t>(params.n));
  for (int i = 0; i < params.n; ++i) {
    pi[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(params.k));
    for (int c = 0; c < params.k; ++c)
      pi[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = params.pi(i, c);
  }
  j["pi"] = pi;
  std::vector<std::vector<double>> p(static_cast<std::size_t>(params.k));
  for (int a = 0; a < params.k; ++a) {
    p[static_cast<std::size_t>(a)].resize(static_cast<std::size_t>(params.k));
    for (int b = 0; b < params.k; ++b)
      p[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = params.p(a, b);
  }
  j["p"] = p;
  j["self_loop"] = params.self_loop;
  return j;
}

DcmmParams params_from_json(const nlohmann::json& j) {
  DcmmParams params;
  try {
    params.n = j.at("n").get<int>();
    params.k = j.at("k").get<int>();
    auto theta = j.at("theta").get<std::vector<double>>();
    auto pi = j.at("pi").get<std::vector<std::vector<double>>>();
    auto p = j.at("p").get<std::vector<std::vector<double>>>();
    params.self_loop = j.at("self_loop").get<bool>();
    if (static_cast<int>(theta.size()) != params.n ||
        static_cast<int>(pi.size()) != params.n ||
        static_cast<int>(p.size()) != params.k)
      throw validation_error("params json: dimension mismatch");
    params.theta = Eigen::Map<const Vector>(theta.data(), params.n);
    params.pi.resize(params.n, params.k);
    for (int i = 0; i < params.n; ++i) {
      if (static_cast<int>(pi[static_cast<std::size_t>(i)].size()) != params.k)
        throw validation_error("params json: pi row size mismatch");
      for (int c = 0; c < params.k; ++c)
        params.pi(i, c) = pi[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
    params.p.resize(params.k, params.k);
    for (int a = 0; a < params.k; ++a) {
      if (static_cast<int>(p[static_cast<std::size_t>(a)].size()) != params.k)
        throw validation_error("params json: p row size mismatch");
      for (int b = 0; b < params.k; ++b)
        params.p(a, b) = p[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("params json: ") + e.what());
  }
  validate(params);
  return params;
}

void save_params(const std::string& path, const DcmmParams& params) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << params_to_json(params).dump(2) << "\n";
}

DcmmParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("cannot parse '" + path + "': " + e.what());
  }
  return params_from_json(j);
}

void save_report(const std::string& path, const nlohmann::json& report) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << report.dump(2) << "\n";
}

nlohmann::json rank_interval_to_json(const RankInterval& ci) {
  return nlohmann::json{{"node", ci.node},       {"community", ci.community},
                        {"lower", ci.lower},     {"upper", ci.upper},
                        {"alpha", ci.alpha},     {"b_draws", ci.b_draws},
                        {"c_quantile", ci.c_quantile}};
}

nlohmann::json test_report_to_json(const TestReport& rep) {
  nlohmann::json j;
  j["kind"] = rep.kind == TestKind::ClosestCommunity ? "closest_community" : "two_node";
  j["statistic"] = rep.statistic;
  j["p_value"] = rep.p_value;
  j["alpha"] = rep.alpha;
  j["rejected"] = rep.rejected;
  if (rep.kind == TestKind::ClosestCommunity) {
    j["node"] = rep.node_i;
    if (rep.rejected_community)
      j["rejected_community"] = *rep.rejected_community;
    else
      j["rejected_community"] = nullptr;
    j["margins"] = rep.margins;
  } else {
    j["nodes"] = {rep.node_i, rep.node_j};
  }
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_pi_csv(const std::string& path, const Matrix& pi) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << "node_id";
  for (int c = 0; c < pi.cols(); ++c) out << ",pi_" << (c + 1);
  out << "\n";
  for (int i = 0; i < pi.rows(); ++i) {
    out << i;
    for (int c = 0; c < pi.cols(); ++c) out << "," << format_double(pi(i, c));
    out << "\n";
  }
}

void write_embedding_csv(const std::string& path, const Matrix& points) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write '" + path + "'");
  out << "node_id";
  for (int c = 0; c < points.cols(); ++c) out << ",r_" << (c + 1);
  out << "\n";
  for (int i = 0; i < points.rows(); ++i) {
    out << i;
    for (int c = 0; c < points.cols(); ++c) out << "," << format_double(points(i, c));
    out << "\n";
  }
}

nlohmann::json vertices_to_json(const VertexHuntResult& hunt) {
  nlohmann::json j;
  j["radius"] = hunt.radius;
  j["anchors"] = hunt.anchors;
  std::vector<std::vector<double>> verts(hunt.vertices.rows());
  for (int c = 0; c < hunt.vertices.rows(); ++c)
    for (int l = 0; l < hunt.vertices.cols(); ++l)
      verts[static_cast<std::size_t>(c)].push_back(hunt.vertices(c, l));
  j["vertices"] = verts;
  j["vertex_sets"] = hunt.vertex_sets;
  return j;
}

}  // namespace dcmm
