#include "qpaec/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qpaec {

using nlohmann::json;

json to_json(const RegisterLayout& layout) {
  json regs = json::array();
  for (const auto& r : layout.registers()) {
    regs.push_back({{"name", r.name}, {"dim", r.dim}});
  }
  return json{{"registers", regs}};
}

RegisterLayout layout_from_json(const json& j) {
  std::vector<Register> regs;
  for (const auto& r : j.at("registers")) {
    regs.push_back({r.at("name").get<std::string>(), r.at("dim").get<std::size_t>()});
  }
  return RegisterLayout(std::move(regs));
}

namespace {

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
  Eigen::MatrixXcd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = std::complex<double>(j.at(r).at(c).at(0).get<double>(),
                                     j.at(r).at(c).at(1).get<double>());
    }
  }
  return m;
}

}  // namespace

json to_json(const QOperator& s) {
  return json{{"layout", to_json(s.layout())}, {"matrix", matrix_to_json(s.matrix())}};
}

QOperator qoperator_from_json(const json& j) {
  return QOperator(layout_from_json(j.at("layout")), matrix_from_json(j.at("matrix")));
}

json to_json(const PureState& s) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
    amps.push_back(json::array({s.amplitudes(i).real(), s.amplitudes(i).imag()}));
  }
  return json{{"layout", to_json(s.layout)}, {"amplitudes", amps}};
}

PureState pure_state_from_json(const json& j) {
  RegisterLayout layout = layout_from_json(j.at("layout"));
  const auto& amps = j.at("amplitudes");
  Eigen::VectorXcd v(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    v(i) = std::complex<double>(amps.at(i).at(0).get<double>(), amps.at(i).at(1).get<double>());
  }
  return PureState{std::move(layout), std::move(v)};
}

json to_json(const HashFamily& fam) {
  json members = json::array();
  for (const auto& f : fam.members) {
    json rows = json::array();
    for (std::size_t i = 0; i < f.matrix.rows(); ++i) rows.push_back(f.matrix.row_hex(i));
    members.push_back(std::move(rows));
  }
  json probs = json::array();
  for (const auto& p : fam.probs) probs.push_back(rational_to_string(p));
  return json{{"n", fam.n}, {"m", fam.m}, {"members", members}, {"probs", probs}};
}

HashFamily family_from_json(const json& j) {
  HashFamily fam;
  fam.n = j.at("n").get<std::size_t>();
  fam.m = j.at("m").get<std::size_t>();
  for (const auto& member : j.at("members")) {
    BitMatrix mat(member.size(), fam.n);
    for (std::size_t i = 0; i < member.size(); ++i) {
      mat.set_row_value(i, BitMatrix::row_value_from_hex(member.at(i).get<std::string>(), fam.n));
    }
    fam.members.push_back(LinearHash(std::move(mat)));
  }
  for (const auto& p : j.at("probs")) {
    fam.probs.push_back(rational_from_string(p.get<std::string>()));
  }
  fam.validate();
  return fam;
}

json to_json(const FamilyCertificate& cert) {
  return json{{"delta_universal", rational_to_string(cert.delta_universal)},
              {"delta_dual_universal", rational_to_string(cert.delta_dual_universal)},
              {"family_size", cert.family_size},
              {"all_surjective", cert.all_surjective}};
}

json to_json(const EntropyResult& r) {
  return json{{"value", r.value}, {"method", r.method}, {"gap", r.gap}};
}

json to_json(const VerificationReport& r) {
  json j{{"check", r.check_name}, {"seed", r.seed},     {"n", r.n},
         {"m", r.m},              {"lhs", r.lhs},       {"rhs", r.rhs},
         {"slack", r.slack},      {"equality", r.equality}, {"pass", r.pass}};
  if (!r.family.empty()) j["family"] = r.family;
  if (!r.delta.empty()) j["delta"] = r.delta;
  if (r.vacuous) j["vacuous"] = true;
  return j;
}

json reports_to_json(const std::vector<VerificationReport>& reports) {
  json arr = json::array();
  bool all = true;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    all = all && r.pass;
  }
  return json{{"reports", arr}, {"all_pass", all}};
}

std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
  struct Row {
    std::size_t count = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_spread = 0.0;
  };
  std::map<std::string, Row> rows;
  for (const auto& r : reports) {
    Row& row = rows[r.check_name];
    ++row.count;
    if (r.equality) {
      row.max_spread = std::max(row.max_spread, std::abs(r.lhs - r.rhs));
    } else {
      row.min_slack = std::min(row.min_slack, r.slack);
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "check,instances,min_slack,max_spread\n";
  for (const auto& [name, row] : rows) {
    os << name << "," << row.count << ",";
    if (std::isfinite(row.min_slack)) os << row.min_slack;
    os << "," << row.max_spread << "\n";
  }
  return os.str();
}

json instance_to_json(const AlgorithmInstance& inst) {
  json f_rows = json::array();
  for (std::size_t i = 0; i < inst.f.matrix.rows(); ++i) {
    f_rows.push_back(inst.f.matrix.row_hex(i));
  }
  json g_rows = json::array();
  for (std::size_t i = 0; i < inst.g.matrix.rows(); ++i) {
    g_rows.push_back(inst.g.matrix.row_hex(i));
  }
  return json{{"n", inst.n},
              {"m", inst.m},
              {"f", f_rows},
              {"g", g_rows},
              {"rho_abe", to_json(inst.rho_abe)},
              {"rho_zae", to_json(inst.rho_zae)},
              {"rho_xab", to_json(inst.rho_xab)}};
}

json to_json(const EqualityReport& r) {
  return json{{"q_pa", r.q_pa},         {"q_ec", r.q_ec},
              {"q_dc", r.q_dc},         {"via_hmax", r.via_hmax},
              {"via_hmin", r.via_hmin}, {"max_spread", r.max_spread},
              {"pass", r.pass}};
}

std::string equality_sweep_to_csv(const std::vector<EqualitySweepRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "seed,n,m,q_pa,q_ec,q_dc,via_hmax,via_hmin,max_spread\n";
  for (const auto& row : rows) {
    os << row.seed << "," << row.n << "," << row.m << "," << row.report.q_pa << ","
       << row.report.q_ec << "," << row.report.q_dc << "," << row.report.via_hmax << ","
       << row.report.via_hmin << "," << row.report.max_spread << "\n";
  }
  return os.str();
}

json equality_sweep_to_json(const std::vector<EqualitySweepRow>& rows) {
  json arr = json::array();
  bool all = true;
  for (const auto& row : rows) {
    json j = to_json(row.report);
    j["seed"] = row.seed;
    j["n"] = row.n;
    j["m"] = row.m;
    arr.push_back(std::move(j));
    all = all && row.report.pass;
  }
  return json{{"instances", arr}, {"all_pass", all}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string debug_matrix_text(const QOperator& s) {
  std::ostringstream os;
  os.precision(6);
  for (const auto& r : s.layout().registers()) os << r.name << "(" << r.dim << ") ";
  os << "\n";
  for (Eigen::Index i = 0; i < s.matrix().rows(); ++i) {
    for (Eigen::Index j = 0; j < s.matrix().cols(); ++j) {
      os << s.matrix()(i, j).real();
      double im = s.matrix()(i, j).imag();
      os << (im < 0 ? "-" : "+") << std::abs(im) << "i ";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace qpaec
