#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qpaec/algorithms.hpp"
#include "qpaec/lhl.hpp"

namespace qpaec {

nlohmann::json to_json(const RegisterLayout& layout);
RegisterLayout layout_from_json(const nlohmann::json& j);

/// Dense states as row-major [re, im] pairs, binary-free.
nlohmann::json to_json(const QOperator& s);
QOperator qoperator_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PureState& s);
PureState pure_state_from_json(const nlohmann::json& j);

/// {n, m, members: [[row hex...]...], probs: ["1/4", ...]}.
nlohmann::json to_json(const HashFamily& fam);
HashFamily family_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FamilyCertificate& cert);
nlohmann::json to_json(const EntropyResult& r);

/// Reports serialize without wall-clock timing so reruns are byte-identical.
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json reports_to_json(const std::vector<VerificationReport>& reports);

/// Summary rows: check, instances, min slack, max spread.
std::string reports_to_csv(const std::vector<VerificationReport>& reports);

/// The three states of a generated instance plus the hash pair.
nlohmann::json instance_to_json(const AlgorithmInstance& inst);

nlohmann::json to_json(const EqualityReport& r);

struct EqualitySweepRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  EqualityReport report;
};

/// One row per instance: seed, n, m, the five values, and the spread.
std::string equality_sweep_to_csv(const std::vector<EqualitySweepRow>& rows);
nlohmann::json equality_sweep_to_json(const std::vector<EqualitySweepRow>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Plain-text matrix dump for debugging.
std::string debug_matrix_text(const QOperator& s);

}  // namespace qpaec
