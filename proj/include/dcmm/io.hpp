#pragma once

#include <string>

#include <json.hpp>

#include "dcmm/inference.hpp"
#include "dcmm/membership.hpp"
#include "dcmm/model.hpp"
#include "dcmm/score.hpp"
#include "dcmm/vertex_hunt.hpp"

namespace dcmm {

enum class AdjacencyFormat { EdgeListCsv, DenseCsv };

AdjacencyFormat adjacency_format_from_string(const std::string& s);

// Edge list: lines "i,j", zero-based; '#' lines are comments ("# n=N" pins
// the node count, otherwise n = max index + 1). Dense: n lines of n
// comma-separated 0/1 values, symmetric. Errors carry line numbers.
AdjacencyMatrix load_adjacency(const std::string& path, AdjacencyFormat format,
                               bool self_loop = false);

void save_adjacency(const std::string& path, const AdjacencyMatrix& adj,
                    AdjacencyFormat format);

nlohmann::json params_to_json(const DcmmParams& params);
DcmmParams params_from_json(const nlohmann::json& j);
void save_params(const std::string& path, const DcmmParams& params);
DcmmParams load_params(const std::string& path);

void save_report(const std::string& path, const nlohmann::json& report);

nlohmann::json rank_interval_to_json(const RankInterval& ci);
nlohmann::json test_report_to_json(const TestReport& rep);

// Round-trippable float formatting shared by every CSV writer.
std::string format_double(double v);

void write_pi_csv(const std::string& path, const Matrix& pi);
void write_embedding_csv(const std::string& path, const Matrix& points);
nlohmann::json vertices_to_json(const VertexHuntResult& hunt);

}  // namespace dcmm
