#include "qpaec/lhl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <functional>
#include <thread>

#include "qpaec/rng.hpp"

namespace qpaec {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double hmin_zae(const QOperator& rho_zae, const EntropyOptions& opts) {
  std::vector<std::string> side;
  for (const auto& r : rho_zae.layout().registers()) {
    if (r.name != "A") side.push_back(r.name);
  }
  return hmin(rho_zae, {"A"}, side, opts).value;
}

double hmax_xab(const QOperator& rho_zae, const EntropyOptions& opts) {
  StandardForm sf = standard_form_from(rho_zae, "A", Basis::kZ, "B");
  return hmax(sf.rho_xab, {"A"}, {"B"}, opts).value;
}

VerificationReport base_report(std::string name, const HashFamily* fam) {
  VerificationReport rep;
  rep.check_name = std::move(name);
  if (fam != nullptr) {
    rep.n = fam->n;
    rep.m = fam->m;
    rep.family = std::to_string(fam->members.size()) + "-member";
  }
  return rep;
}

// Per-member EC pipeline average used by the transfer check.
double expect_qec_pipeline(const HashFamily& fam, const QOperator& rho_zae,
                           const EntropyOptions& opts) {
  StandardForm sf = standard_form_from(rho_zae, "A", Basis::kZ, "B");
  std::vector<double> terms(fam.members.size());
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    LinearHash fs = make_surjective(fam.members[i]);
    LinearHash g = fs.output_bits() < fam.n ? dual_of(fs) : LinearHash(BitMatrix(0, fam.n));
    AlgorithmInstance inst{sf.rho_abe, sf.rho_zae, sf.rho_xab,
                           fs,         g,          fam.n,
                           fs.output_bits(),       opts};
    terms[i] = rational_to_double(fam.probs[i]) * q_ec_pipeline(inst);
  }
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

void run_indexed(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  int threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = static_cast<std::size_t>(t); i < count;
           i += static_cast<std::size_t>(threads)) {
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void VerificationReport::finish() {
  slack = rhs - lhs;
  pass = equality ? std::abs(lhs - rhs) <= kEqualityTol : slack >= -kSlackTol;
}

VerificationReport check_lhl_universal2(const QOperator& rho_zae, const HashFamily& fam,
                                        const EntropyOptions& opts) {
  FamilyCertificate cert = certify_family(fam);
  if (cert.delta_universal > 1) {
    throw std::invalid_argument("check_lhl_universal2: family is not universal2 (delta = " +
                                rational_to_string(cert.delta_universal) + ")");
  }
  VerificationReport rep = base_report("lemma5-lhl-universal2", &fam);
  rep.delta = rational_to_string(cert.delta_universal);
  rep.lhs = expect_over_family(fam, FamilyMetric::kQPa, rho_zae, opts);
  rep.rhs = std::exp2(static_cast<double>(fam.m) - hmin_zae(rho_zae, opts));
  rep.finish();
  return rep;
}

VerificationReport check_lhl_almost_universal2(const QOperator& rho_zae, const HashFamily& fam,
                                               const EntropyOptions& opts) {
  FamilyCertificate cert = certify_family(fam);
  VerificationReport rep = base_report("lemma7-lhl-almost-universal2", &fam);
  rep.delta = rational_to_string(cert.delta_universal);
  double delta = rational_to_double(cert.delta_universal);
  rep.lhs = expect_over_family(fam, FamilyMetric::kQPa, rho_zae, opts);
  rep.rhs = (delta - 1.0) * rho_zae.trace() +
            std::exp2(static_cast<double>(fam.m) - hmin_zae(rho_zae, opts));
  rep.vacuous = rep.rhs > 1.0;  // the bound loses its meaning for delta >= 2
  rep.finish();
  return rep;
}

VerificationReport check_lhl_dual_universal2(const QOperator& rho_zae, const HashFamily& fam,
                                             const EntropyOptions& opts) {
  FamilyCertificate cert = certify_family(fam);
  VerificationReport rep = base_report("lemma9-lhl-dual-universal2", &fam);
  rep.delta = rational_to_string(cert.delta_dual_universal);
  rep.lhs = expect_over_family(fam, FamilyMetric::kQPa, rho_zae, opts);
  rep.rhs = std::exp2(static_cast<double>(fam.m) - hmin_zae(rho_zae, opts)) *
            rational_to_double(cert.delta_dual_universal);
  rep.finish();
  return rep;
}

VerificationReport check_coding_theorem(const QOperator& rho_zae, const HashFamily& fam,
                                        CodingTheorem which, const EntropyOptions& opts) {
  FamilyCertificate cert = certify_family(fam);
  const double hm = hmax_xab(rho_zae, opts);
  const double base = std::exp2(hm - static_cast<double>(fam.n - fam.m));

  const char* name = which == CodingTheorem::kDualUniversal       ? "lemma6-coding-dual-universal"
                     : which == CodingTheorem::kAlmostDualUniversal ? "lemma8-coding-almost-dual"
                                                                    : "lemma10-coding-almost-universal";
  VerificationReport rep = base_report(name, &fam);
  rep.lhs = expect_over_family(fam, FamilyMetric::kQEcDc, rho_zae, opts);
  switch (which) {
    case CodingTheorem::kDualUniversal:
      if (cert.delta_universal > 1) {
        throw std::invalid_argument("coding theorem: family is not universal2");
      }
      rep.delta = rational_to_string(cert.delta_universal);
      rep.rhs = base;
      break;
    case CodingTheorem::kAlmostDualUniversal:
      rep.delta = rational_to_string(cert.delta_universal);
      rep.rhs = (rational_to_double(cert.delta_universal) - 1.0) * rho_zae.trace() + base;
      break;
    case CodingTheorem::kAlmostUniversal:
      // G = dual family is delta-almost universal2 with the dual delta.
      rep.delta = rational_to_string(cert.delta_dual_universal);
      rep.rhs = base * rational_to_double(cert.delta_dual_universal);
      break;
  }
  rep.finish();
  return rep;
}

VerificationReport check_coding_sqrt_form(const QOperator& rho_zae, const HashFamily& fam,
                                          const EntropyOptions& opts) {
  VerificationReport rep = base_report("lemma10-sqrt-form", &fam);
  const double hm = hmax_xab(rho_zae, opts);
  rep.lhs = expect_over_family(fam, FamilyMetric::kQEcDc, rho_zae, opts);
  rep.rhs = 4.0 * std::sqrt(std::exp2(hm - static_cast<double>(fam.n - fam.m)));
  rep.finish();
  return rep;
}

std::vector<VerificationReport> check_theorem2_transfer(const QOperator& rho_zae,
                                                        const HashFamily& fam,
                                                        const EntropyOptions& opts) {
  std::vector<VerificationReport> out;
  const double h_min = hmin_zae(rho_zae, opts);
  const double h_max = hmax_xab(rho_zae, opts);
  const double n = static_cast<double>(fam.n);

  VerificationReport ent = base_report("theorem2-entropy-arguments", &fam);
  ent.equality = true;
  ent.lhs = h_min;
  ent.rhs = n - h_max;
  ent.finish();
  out.push_back(ent);

  const double a_pa = expect_over_family(fam, FamilyMetric::kQPa, rho_zae, opts);
  const double a_ec = expect_qec_pipeline(fam, rho_zae, opts);
  const double a_dc = expect_over_family(fam, FamilyMetric::kQEcDc, rho_zae, opts);

  VerificationReport lhs_eq = base_report("theorem2-lhs-pa-vs-ec", &fam);
  lhs_eq.equality = true;
  lhs_eq.lhs = a_pa;
  lhs_eq.rhs = a_ec;
  lhs_eq.finish();
  out.push_back(lhs_eq);

  VerificationReport lhs_eq2 = base_report("theorem2-lhs-ec-vs-dc", &fam);
  lhs_eq2.equality = true;
  lhs_eq2.lhs = a_ec;
  lhs_eq2.rhs = a_dc;
  lhs_eq2.finish();
  out.push_back(lhs_eq2);

  // All six combinations a <= r(b) with the universal2 bound r(b) = 2^{m-b}.
  const double avals[3] = {a_pa, a_ec, a_dc};
  const char* anames[3] = {"pa", "ec", "dc"};
  const double bvals[2] = {h_min, n - h_max};
  const char* bnames[2] = {"hmin", "n-hmax"};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      VerificationReport r = base_report(
          std::string("theorem3-") + anames[i] + "-le-r(" + bnames[j] + ")", &fam);
      r.lhs = avals[i];
      r.rhs = std::exp2(static_cast<double>(fam.m) - bvals[j]);
      r.finish();
      out.push_back(r);
    }
  }
  return out;
}

std::vector<VerificationReport> check_theorem4_pipeline(const QOperator& rho_zae,
                                                        const HashFamily& fam,
                                                        const EntropyOptions& opts) {
  if (std::abs(rho_zae.trace() - 1.0) > 1e-9) {
    throw std::invalid_argument("check_theorem4_pipeline: state must be normalized");
  }
  FamilyCertificate cert = certify_family(fam);
  if (cert.delta_universal > 1) {
    throw std::invalid_argument("check_theorem4_pipeline: family is not universal2");
  }

  std::vector<VerificationReport> out;
  const double m = static_cast<double>(fam.m);
  const double e_qpa = expect_over_family(fam, FamilyMetric::kQPa, rho_zae, opts);
  const double e_d2 = expect_over_family(fam, FamilyMetric::kD2, rho_zae, opts);
  const double e_d1 = expect_over_family(fam, FamilyMetric::kD1, rho_zae, opts);
  const double h_min = hmin_zae(rho_zae, opts);

  QOperator rho_e = partial_trace(rho_zae, {"A"});
  const double h2_val = h2(rho_zae, "A", rho_e);

  VerificationReport l2 = base_report("lemma2-qpa-le-2m-d2", &fam);
  l2.lhs = e_qpa;
  l2.rhs = std::exp2(m) * e_d2;
  l2.finish();
  out.push_back(l2);

  VerificationReport l3 = base_report("lemma3-hmin-le-h2", &fam);
  l3.lhs = h_min;
  l3.rhs = h2_val;
  l3.finish();
  out.push_back(l3);

  VerificationReport d2b = base_report("eq41-d2-bound", &fam);
  d2b.lhs = e_d2;
  d2b.rhs = std::exp2(-h2_val);
  d2b.finish();
  out.push_back(d2b);

  VerificationReport conv = base_report("theorem4-conventional-lhl", &fam);
  conv.lhs = e_d1;
  conv.rhs = 4.0 * std::sqrt(std::exp2(m - h_min));
  conv.finish();
  out.push_back(conv);

  return out;
}

std::vector<VerificationReport> qkd_conversion_demo(const QOperator& rho_zae,
                                                    const HashFamily& fam, double h_min_th,
                                                    const EntropyOptions& opts) {
  FamilyCertificate cert = certify_family(fam);
  if (cert.delta_universal > 1) {
    throw std::invalid_argument("qkd_conversion_demo: family must be universal2");
  }
  const double h_min = hmin_zae(rho_zae, opts);
  if (h_min < h_min_th - 1e-9) {
    throw std::invalid_argument("qkd_conversion_demo: H_min(Z^A|E) = " + std::to_string(h_min) +
                                " is below the threshold " + std::to_string(h_min_th));
  }

  const double m = static_cast<double>(fam.m);
  const double n = static_cast<double>(fam.n);
  const double measured = expect_over_family(fam, FamilyMetric::kD1, rho_zae, opts);
  const double lhl_bound = std::sqrt(std::exp2(m - h_min_th));
  const double pec_bound = 2.0 * kSqrt2 * std::sqrt(std::exp2(m - h_min_th));
  const double reverse_bound = 4.0 * std::sqrt(std::exp2(m - h_min_th));
  // The improved route substitutes H_max <= n - th into the uncertainty-
  // relation LHL, landing exactly on the LHL-based bound.
  const double ucr_bound = std::sqrt(rho_zae.trace()) *
                           std::sqrt(std::exp2((n - h_min_th) - (n - m)));

  std::vector<VerificationReport> out;
  auto bound_report = [&](const char* name, double rhs) {
    VerificationReport r = base_report(name, &fam);
    r.lhs = measured;
    r.rhs = rhs;
    r.vacuous = rhs > 1.0;
    r.finish();
    out.push_back(r);
  };
  bound_report("qkd-lhl-bound", lhl_bound);
  bound_report("qkd-pec-bound", pec_bound);
  bound_report("qkd-reverse-bound", reverse_bound);
  bound_report("qkd-ucr-bound", ucr_bound);

  VerificationReport premise = base_report("qkd-ucr-premise-hmax", &fam);
  premise.lhs = hmax_xab(rho_zae, opts);
  premise.rhs = n - h_min_th;
  premise.finish();
  out.push_back(premise);

  VerificationReport equal = base_report("qkd-ucr-equals-lhl", &fam);
  equal.equality = true;
  equal.lhs = ucr_bound;
  equal.rhs = lhl_bound;
  equal.finish();
  out.push_back(equal);

  VerificationReport ordering = base_report("qkd-ucr-improves-pec", &fam);
  ordering.lhs = ucr_bound;
  ordering.rhs = pec_bound;
  ordering.finish();
  out.push_back(ordering);
  return out;
}

namespace {

InstanceParams suite_params(std::size_t idx) {
  InstanceParams p;
  p.n = 1 + idx % 3;
  p.m = 1 + (idx / 3) % p.n;
  p.e_dim = p.n == 3 ? 2 : 4;
  p.e_rank = p.n == 3 ? 1 : 2;
  p.trace = (idx % 2 == 0) ? 1.0 : 0.8;
  return p;
}

HashFamily handcrafted_delta2_family() {
  HashFamily fam;
  fam.n = 2;
  fam.m = 1;
  fam.members = {LinearHash(BitMatrix::from_rows({"11"}))};
  fam.probs = {Rational(1)};
  return fam;
}

HashFamily two_member_dual1_family() {
  HashFamily fam;
  fam.n = 2;
  fam.m = 1;
  fam.members = {LinearHash(BitMatrix::from_rows({"01"})),
                 LinearHash(BitMatrix::from_rows({"10"}))};
  fam.probs = {Rational(1, 2), Rational(1, 2)};
  return fam;
}

HashFamily three_member_surjective_family() {
  HashFamily fam;
  fam.n = 2;
  fam.m = 1;
  fam.members = {LinearHash(BitMatrix::from_rows({"01"})),
                 LinearHash(BitMatrix::from_rows({"10"})),
                 LinearHash(BitMatrix::from_rows({"11"}))};
  fam.probs = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  return fam;
}

}  // namespace

namespace {

HashFamily configured_family(const SuiteConfig& config) {
  if (config.n < 1 || config.n > 3 || config.m < 1 || config.m > config.n) {
    throw std::invalid_argument("run_suite: need 1 <= m <= n <= 3");
  }
  if (config.family_kind == "toeplitz") return family_toeplitz(config.n, config.m);
  if (config.family_kind == "all-linear") return family_all_linear(config.n, config.m);
  throw std::invalid_argument("run_suite: unknown family kind '" + config.family_kind + "'");
}

InstanceParams family_state_params(const SuiteConfig& config) {
  InstanceParams p;
  p.n = config.n;
  p.m = config.m;
  p.e_dim = config.n == 3 ? 2 : 4;
  p.e_rank = config.n == 3 ? 1 : 2;
  return p;
}

}  // namespace

std::vector<std::string> suite_check_names() {
  return {"theorem1", "lemma4", "lemma5", "lemma7", "lemma9",
          "coding",   "appendix-b", "chain", "qkd"};
}

SuiteResult run_suite(const SuiteConfig& config) {
  std::vector<std::string> selected =
      config.checks.empty() ? suite_check_names() : config.checks;
  for (const auto& c : selected) {
    auto names = suite_check_names();
    if (std::find(names.begin(), names.end(), c) == names.end()) {
      throw std::invalid_argument("run_suite: unknown check '" + c + "'");
    }
  }
  auto wants = [&](const char* name) {
    return std::find(selected.begin(), selected.end(), name) != selected.end();
  };

  SuiteResult result;
  EntropyOptions opts;
  const std::size_t count = config.instances;

  auto add_all = [&](std::vector<VerificationReport>&& reps) {
    for (auto& r : reps) result.reports.push_back(std::move(r));
  };

  if (wants("theorem1")) {
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 100 + i);
      AlgorithmInstance inst = random_instance(seed, suite_params(i));
      EqualityReport eq = verify_theorem1(inst);
      VerificationReport rep;
      rep.check_name = "theorem1-five-way";
      rep.seed = seed;
      rep.n = inst.n;
      rep.m = inst.m;
      rep.equality = true;
      rep.lhs = std::max({eq.q_pa, eq.q_ec, eq.q_dc, eq.via_hmax, eq.via_hmin});
      rep.rhs = std::min({eq.q_pa, eq.q_ec, eq.q_dc, eq.via_hmax, eq.via_hmin});
      rep.finish();
      rows[i] = {rep};
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  if (wants("lemma4")) {
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 200 + i);
      InstanceParams p = suite_params(i);
      QOperator zae = random_cq_zae(seed, p);
      VerificationReport eq;
      eq.check_name = "lemma4-equality-standard-form";
      eq.seed = seed;
      eq.n = p.n;
      eq.equality = true;
      eq.lhs = hmin_zae(zae, opts) + hmax_xab(zae, opts);
      eq.rhs = static_cast<double>(p.n);
      eq.finish();

      // Non-standard-form pure state: the inequality branch.
      PureState psi = random_pure_abe(mix_seed(seed, 7), p.n, 2, p.e_dim);
      QOperator zae2 = dephase(partial_trace(psi, {"B"}), "A", Basis::kZ);
      QOperator xab2 = dephase(partial_trace(psi, {"E"}), "A", Basis::kX);
      VerificationReport ge;
      ge.check_name = "lemma4-inequality-general";
      ge.seed = seed;
      ge.n = p.n;
      ge.lhs = static_cast<double>(p.n);
      ge.rhs = hmin(zae2, {"A"}, {"E"}, opts).value + hmax(xab2, {"A"}, {"B"}, opts).value;
      ge.finish();
      rows[i] = {eq, ge};
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  if (wants("lemma5")) {
    HashFamily fam = configured_family(config);
    std::vector<VerificationReport> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 300 + i);
      QOperator zae = random_cq_zae(seed, family_state_params(config));
      VerificationReport rep = check_lhl_universal2(zae, fam, opts);
      rep.seed = seed;
      rows[i] = rep;
    });
    for (auto& r : rows) result.reports.push_back(std::move(r));
  }

  if (wants("lemma7")) {
    HashFamily fam =
        config.delta_family != nullptr ? *config.delta_family : handcrafted_delta2_family();
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 400 + i);
      InstanceParams p;
      p.n = fam.n;
      p.e_dim = 4;
      p.e_rank = 2;
      QOperator zae = random_cq_zae(seed, p);
      VerificationReport rep = check_lhl_almost_universal2(zae, fam, opts);
      rep.seed = seed;

      // delta = 1 reduction: the lemma collapses to the universal2 LHL.
      HashFamily u = two_member_dual1_family();
      VerificationReport r7 = check_lhl_almost_universal2(zae, u, opts);
      VerificationReport r5 = check_lhl_universal2(zae, u, opts);
      VerificationReport red;
      red.check_name = "lemma7-delta1-reduction";
      red.seed = seed;
      red.n = u.n;
      red.m = u.m;
      red.equality = true;
      red.lhs = r7.rhs;
      red.rhs = r5.rhs;
      red.finish();
      rows[i] = {rep, red};
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  if (wants("lemma9")) {
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 500 + i);
      InstanceParams p;
      p.n = 2;
      p.e_dim = 4;
      p.e_rank = 2;
      QOperator zae = random_cq_zae(seed, p);
      VerificationReport rep = check_lhl_dual_universal2(zae, three_member_surjective_family(), opts);
      rep.seed = seed;

      HashFamily u = two_member_dual1_family();
      VerificationReport r9 = check_lhl_dual_universal2(zae, u, opts);
      VerificationReport r5 = check_lhl_universal2(zae, u, opts);
      VerificationReport red;
      red.check_name = "lemma9-delta1-reduction";
      red.seed = seed;
      red.n = u.n;
      red.m = u.m;
      red.equality = true;
      red.lhs = r9.rhs;
      red.rhs = r5.rhs;
      red.finish();
      rows[i] = {rep, red};
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  if (wants("coding")) {
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 600 + i);
      HashFamily fam = configured_family(config);
      QOperator zae = random_cq_zae(seed, family_state_params(config));
      std::vector<VerificationReport> reps;
      reps.push_back(check_coding_theorem(zae, fam, CodingTheorem::kDualUniversal, opts));
      reps.push_back(check_coding_theorem(zae, handcrafted_delta2_family(),
                                          CodingTheorem::kAlmostDualUniversal, opts));
      reps.push_back(check_coding_theorem(zae, three_member_surjective_family(),
                                          CodingTheorem::kAlmostUniversal, opts));
      reps.push_back(check_coding_sqrt_form(zae, fam, opts));
      for (auto& r : reps) r.seed = seed;
      rows[i] = std::move(reps);
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  if (wants("appendix-b")) {
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 700 + i);
      InstanceParams p = suite_params(i);
      p.trace = 1.0;  // the appendix bounds assume normalized states
      AlgorithmInstance inst = random_instance(seed, p);
      double v1 = d1(inst);
      double v1p = d1_prime(inst);
      double q = q_pa_state(inst.rho_zae, inst.f, opts);

      auto mk = [&](const char* name, double lhs, double rhs) {
        VerificationReport r;
        r.check_name = name;
        r.seed = seed;
        r.n = inst.n;
        r.m = inst.m;
        r.lhs = lhs;
        r.rhs = rhs;
        r.finish();
        return r;
      };
      rows[i] = {mk("eq8-d1-le-4sqrtq", v1, 4.0 * std::sqrt(inst.rho_zae.trace()) * std::sqrt(q)),
                 mk("eqB2-lower", 1.0 - std::sqrt(std::max(0.0, 1.0 - q)), 0.5 * v1p),
                 mk("eqB2-upper", 0.5 * v1p, std::sqrt(q)),
                 mk("eqB3-d1p-le-d1", v1p, v1),
                 mk("eqB3-d1-le-2d1p", v1, 2.0 * v1p)};
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  if (wants("chain")) {
    HashFamily fam = configured_family(config);
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 800 + i);
      InstanceParams p = family_state_params(config);
      p.trace = 1.0;
      QOperator zae = random_cq_zae(seed, p);
      std::vector<VerificationReport> reps = check_theorem4_pipeline(zae, fam, opts);
      auto transfer = check_theorem2_transfer(zae, fam, opts);
      for (auto& r : transfer) reps.push_back(std::move(r));

      // Renyi ordering links used inside the lemma 2 proof.
      LinearHash f;
      for (const auto& member : fam.members) {
        if (member.surjective) {
          f = member;
          break;
        }
      }
      QOperator ke = hashed_state(zae, f);
      double half = renyi_half_down(ke, "K");
      double two = renyi_two_down(ke, "K");
      VerificationReport ord;
      ord.check_name = "renyi-half-ge-two";
      ord.lhs = two;
      ord.rhs = half;
      ord.finish();
      reps.push_back(ord);
      VerificationReport top;
      top.check_name = "hmax-ge-renyi-half";
      top.lhs = half;
      std::vector<std::string> kside;
      for (const auto& r : ke.layout().registers()) {
        if (r.name != "K") kside.push_back(r.name);
      }
      top.rhs = hmax(ke, {"K"}, kside, opts).value;
      top.finish();
      reps.push_back(top);

      for (auto& r : reps) r.seed = seed;
      rows[i] = std::move(reps);
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  if (wants("qkd")) {
    HashFamily fam = configured_family(config);
    std::vector<std::vector<VerificationReport>> rows(count);
    run_indexed(count, config.jobs, [&](std::size_t i) {
      std::uint64_t seed = mix_seed(config.seed, 900 + i);
      InstanceParams p = family_state_params(config);
      p.trace = 1.0;
      QOperator zae = random_cq_zae(seed, p);
      double h_min = hmin_zae(zae, opts);
      double threshold = std::max(0.0, h_min - 0.05);
      std::vector<VerificationReport> reps = qkd_conversion_demo(zae, fam, threshold, opts);
      for (auto& r : reps) r.seed = seed;
      rows[i] = std::move(reps);
    });
    for (auto& r : rows) add_all(std::move(r));
  }

  result.all_pass = true;
  for (const auto& r : result.reports) result.all_pass = result.all_pass && r.pass;
  return result;
}

}  // namespace qpaec
