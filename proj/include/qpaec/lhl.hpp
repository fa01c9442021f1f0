#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpaec/algorithms.hpp"

namespace qpaec {

/// One verified bound or identity. For inequality checks lhs <= rhs is
/// asserted with slack = rhs - lhs >= -1e-9; equality checks use
/// |lhs - rhs| <= 1e-6. Wall time is console diagnostics only and never
/// serialized (reports must be byte-identical across runs).
struct VerificationReport {
  std::string check_name;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string family;
  std::string delta;  // exact rational string, empty when not applicable
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool equality = false;
  bool vacuous = false;
  bool pass = false;
  double runtime_seconds = 0.0;

  static constexpr double kSlackTol = 1e-9;
  static constexpr double kEqualityTol = 1e-6;

  void finish();  // fills slack and pass from lhs/rhs
};

/// E_F Q^PA <= 2^{m - H_min(Z^A|E)} for a certified universal2 family.
VerificationReport check_lhl_universal2(const QOperator& rho_zae, const HashFamily& fam,
                                        const EntropyOptions& opts = {});

/// E_F Q^PA <= (delta - 1) Tr(rho) + 2^{m - H_min}; flagged vacuous when the
/// right side exceeds 1 (delta >= 2 drains the bound of meaning).
VerificationReport check_lhl_almost_universal2(const QOperator& rho_zae, const HashFamily& fam,
                                               const EntropyOptions& opts = {});

/// E_F Q^PA <= 2^{m - H_min} delta_dual for a certified almost dual
/// universal2 family.
VerificationReport check_lhl_dual_universal2(const QOperator& rho_zae, const HashFamily& fam,
                                             const EntropyOptions& opts = {});

enum class CodingTheorem { kDualUniversal, kAlmostDualUniversal, kAlmostUniversal };

/// Coding theorems for EC/DC over the dualized family: lhs = E_G Q^EC,G and
/// rhs per lemma (2^{H_max(X^A|B)-(n-m)} times 1, plus (delta-1)Tr, or times
/// the dual delta respectively).
VerificationReport check_coding_theorem(const QOperator& rho_zae, const HashFamily& fam,
                                        CodingTheorem which, const EntropyOptions& opts = {});

/// The looser square-root form E_G Q^DC <= 4 sqrt(2^{H_max-(n-m)}).
VerificationReport check_coding_sqrt_form(const QOperator& rho_zae, const HashFamily& fam,
                                          const EntropyOptions& opts = {});

/// The transfer between LHLs and coding theorems on one standard form:
/// the entropy arguments coincide (H_min = n - H_max) and all six
/// inequality combinations a <= r(b) hold with the universal2 bound.
std::vector<VerificationReport> check_theorem2_transfer(const QOperator& rho_zae,
                                                        const HashFamily& fam,
                                                        const EntropyOptions& opts = {});

/// The d2 route: per-family-average collision bound, its entropy link, and
/// the derived conventional LHL E_F d1 <= 4 sqrt(2^{m - H_min}).
std::vector<VerificationReport> check_theorem4_pipeline(const QOperator& rho_zae,
                                                        const HashFamily& fam,
                                                        const EntropyOptions& opts = {});

/// The security-bound conversion chains at eps = 0: the measured E_F d1 is
/// upper-bounded by the LHL-based bound, the 2 sqrt 2 and factor-4 converted
/// bounds, and the uncertainty-relation-improved bound, which must equal the
/// LHL-based bound exactly. Requires H_min(Z^A|E) >= h_min_th.
std::vector<VerificationReport> qkd_conversion_demo(const QOperator& rho_zae,
                                                    const HashFamily& fam, double h_min_th,
                                                    const EntropyOptions& opts = {});

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::size_t instances = 3;  // per check
  int jobs = 1;
  std::vector<std::string> checks;  // empty = every check
  HashFamily const* delta_family = nullptr;  // optional handcrafted family
  // Family used by the family-driven checks (lemma5, coding, chain, qkd) and
  // the matching instance dimensions. n is capped at 3 to stay desk scale.
  std::string family_kind = "toeplitz";  // toeplitz | all-linear
  std::size_t n = 2;
  std::size_t m = 1;
};

struct SuiteResult {
  std::vector<VerificationReport> reports;
  bool all_pass = false;
};

/// Named checks: theorem1, lemma4, lemma5, lemma7, lemma9, coding,
/// appendix-b, chain, qkd. Instances derive from (seed, check, index); the
/// report list is deterministic for a fixed config.
SuiteResult run_suite(const SuiteConfig& config);

std::vector<std::string> suite_check_names();

}  // namespace qpaec
