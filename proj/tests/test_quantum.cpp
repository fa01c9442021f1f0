#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "qpaec/qoperator.hpp"

using namespace qpaec;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using std::complex;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

QOperator qubit_op(const std::string& name, const MatrixXcd& m) {
  return QOperator(RegisterLayout({{name, 2}}), m);
}

QOperator maximally_mixed(const std::string& name, std::size_t dim) {
  return QOperator(RegisterLayout({{name, dim}}),
                   MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

PureState bell_pair(const std::string& a, const std::string& b) {
  VectorXcd amps = VectorXcd::Zero(4);
  amps(0) = kInvSqrt2;  // |00>
  amps(3) = kInvSqrt2;  // |11>
  return PureState{RegisterLayout({{a, 2}, {b, 2}}), amps};
}

// Random normalized pure state across the given registers.
PureState random_pure(std::mt19937_64& rng, std::vector<Register> regs) {
  RegisterLayout layout(std::move(regs));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  VectorXcd amps(layout.total_dim());
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    // Box-Muller; keeps the generator stack-independent of libstdc++ details.
    double u1 = std::max(unif(rng), 1e-300);
    double u2 = unif(rng);
    double r = std::sqrt(-2.0 * std::log(u1));
    amps(i) = complex<double>(r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2));
  }
  amps /= amps.norm();
  return PureState{std::move(layout), std::move(amps)};
}

QOperator random_state(std::mt19937_64& rng, std::vector<Register> regs, std::size_t rank) {
  std::vector<Register> all = regs;
  all.push_back({"_purifier", rank});
  PureState psi = random_pure(rng, std::move(all));
  return partial_trace(psi, {"_purifier"});
}

}  // namespace

TEST_CASE("tensor: basic products and trace multiplicativity") {
  QOperator a = maximally_mixed("A", 2);
  QOperator b = maximally_mixed("B", 2);
  QOperator ab = tensor(a, b);
  CHECK(max_abs_diff(ab.matrix(), MatrixXcd::Identity(4, 4) / 4.0) == 0.0);

  MatrixXcd p0 = MatrixXcd::Zero(2, 2), p1 = MatrixXcd::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  QOperator zero_one = tensor(qubit_op("A", p0), qubit_op("B", p1));
  CHECK(zero_one.matrix()(1, 1) == complex<double>(1, 0));  // |01><01|

  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    QOperator x = random_state(rng, {{"A", 2}}, 2);
    QOperator y = random_state(rng, {{"B", 2}}, 2);
    CHECK(tensor(x, y).trace() == doctest::Approx(x.trace() * y.trace()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tensor(a, maximally_mixed("A", 2)), std::invalid_argument);
}

TEST_CASE("partial trace: Bell reduction, products, trace preservation") {
  QOperator reduced = partial_trace(bell_pair("A", "B"), {"B"});
  CHECK(max_abs_diff(reduced.matrix(), MatrixXcd::Identity(2, 2) / 2.0) < 1e-14);

  std::mt19937_64 rng(21);
  QOperator x = random_state(rng, {{"A", 2}}, 2);
  QOperator y = random_state(rng, {{"B", 2}}, 2);
  QOperator xy = tensor(x, y);
  CHECK(max_abs_diff(partial_trace(xy, {"B"}).matrix(), x.matrix() * y.trace()) < 1e-12);

  for (int t = 0; t < 10; ++t) {
    PureState psi = random_pure(rng, {{"A", 2}, {"B", 3}, {"C", 2}});
    QOperator r = partial_trace(psi, {"B"});
    CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.layout().has("A"));
    CHECK(r.layout().has("C"));
  }
  CHECK_THROWS_AS(partial_trace(x, {"nope"}), std::invalid_argument);
}

TEST_CASE("purify: pure input, maximally mixed, and random round trips") {
  MatrixXcd p0 = MatrixXcd::Zero(2, 2);
  p0(0, 0) = 1;
  PureState psi = purify(qubit_op("A", p0), "W");
  CHECK(psi.layout.dim_of("W") == 1);  // never happens: rank 1 pads to 1
  CHECK(psi.norm_squared() == doctest::Approx(1.0));

  PureState phi = purify(maximally_mixed("A", 2), "W");
  CHECK(phi.layout.dim_of("W") == 2);
  // Schmidt coefficients 1/sqrt(2) each.
  QOperator back = partial_trace(phi, {"W"});
  CHECK(max_abs_diff(back.matrix(), MatrixXcd::Identity(2, 2) / 2.0) < 1e-12);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    QOperator s = random_state(rng, {{"A", 2}, {"B", 2}}, 3);  // rank 3 on 2 qubits
    PureState p = purify(s, "W");
    CHECK(p.layout.dim_of("W") == 4);  // rank 3 padded to the next power of two
    CHECK(max_abs_diff(partial_trace(p, {"W"}).matrix(), s.matrix()) < tol::kRoundTrip);
  }

  // Deterministic: same input, same purification.
  QOperator s = random_state(rng, {{"A", 2}}, 2);
  PureState p1 = purify(s, "W");
  PureState p2 = purify(s, "W");
  CHECK((p1.amplitudes - p2.amplitudes).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dephase: plus state, idempotence, Hadamard conjugation identity") {
  MatrixXcd plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  QOperator dz = dephase(qubit_op("A", plus), "A", Basis::kZ);
  CHECK(max_abs_diff(dz.matrix(), MatrixXcd::Identity(2, 2) / 2.0) < 1e-14);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    QOperator s = random_state(rng, {{"A", 2}, {"B", 2}}, 2);
    for (Basis b : {Basis::kZ, Basis::kX}) {
      QOperator once = dephase(s, "A", b);
      QOperator twice = dephase(once, "A", b);
      CHECK(max_abs_diff(once.matrix(), twice.matrix()) < 1e-12);
      CHECK(once.trace() == doctest::Approx(s.trace()).epsilon(1e-12));
    }
    // x-dephase == H (z-dephase of H s H) H with explicit single-qubit H.
    MatrixXcd h1(2, 2);
    h1 << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    MatrixXcd hfull = embed_register_op(s.layout(), "A", h1);
    QOperator manual(s.layout(),
                     hfull * dephase(QOperator(s.layout(), hfull * s.matrix() * hfull), "A",
                                     Basis::kZ)
                                 .matrix() *
                         hfull);
    CHECK(max_abs_diff(manual.matrix(), dephase(s, "A", Basis::kX).matrix()) < 1e-12);
  }

  QOperator classical = qubit_op("A", (MatrixXcd(2, 2) << 0.25, 0, 0, 0.75).finished());
  CHECK(max_abs_diff(dephase(classical, "A", Basis::kZ).matrix(), classical.matrix()) == 0.0);
}

TEST_CASE("apply_classical_function: copies, fiber sums, tau form") {
  // Identity hash with keep-input adds a perfectly correlated copy register.
  QOperator u = maximally_mixed("A", 2);
  QOperator copied = apply_classical_function(u, "A", Basis::kZ,
                                              LinearHash(BitMatrix::identity(1)), "K",
                                              FunctionMode::kKeepInput);
  CHECK(copied.layout().count() == 2);
  for (std::size_t v = 0; v < 2; ++v) {
    CHECK(copied.matrix()(v * 2 + v, v * 2 + v) == complex<double>(0.5, 0));
  }

  // h = [1 1] on a uniform classical 2-bit register collapses to a uniform bit.
  QOperator u2 = QOperator(RegisterLayout({{"A", 4}}), MatrixXcd::Identity(4, 4) / 4.0);
  QOperator k = apply_classical_function(u2, "A", Basis::kZ,
                                         LinearHash(BitMatrix::from_rows({"11"})), "K",
                                         FunctionMode::kTraceOutInput);
  CHECK(k.layout().count() == 1);
  CHECK(k.layout().dim_of("K") == 2);
  CHECK(max_abs_diff(k.matrix(), MatrixXcd::Identity(2, 2) / 2.0) < 1e-14);

  // Maximally correlated rho_ZAE, n=2, f = [1 0]: K is determined by E.
  MatrixXcd corr = MatrixXcd::Zero(16, 16);
  for (std::size_t z = 0; z < 4; ++z) corr(z * 4 + z, z * 4 + z) = 0.25;
  QOperator rho_zae(RegisterLayout({{"A", 4}, {"E", 4}}), corr);
  QOperator rho_ke = apply_classical_function(rho_zae, "A", Basis::kZ,
                                              LinearHash(BitMatrix::from_rows({"10"})), "K",
                                              FunctionMode::kTraceOutInput);
  // K = first bit of z; E holds z entirely, so p(k|e) is deterministic.
  for (std::size_t kk = 0; kk < 2; ++kk)
    for (std::size_t e = 0; e < 4; ++e) {
      double expected = ((e >> 1) == kk) ? 0.25 : 0.0;
      CHECK(std::abs(rho_ke.matrix()(kk * 4 + e, kk * 4 + e) - expected) < 1e-14);
    }

  // Non-classical input is rejected.
  MatrixXcd plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(apply_classical_function(qubit_op("A", plus), "A", Basis::kZ,
                                           LinearHash(BitMatrix::identity(1)), "K",
                                           FunctionMode::kKeepInput),
                  std::invalid_argument);
}

TEST_CASE("pauli_string_measure: stabilizer cases and f-perp-g commutation") {
  VectorXcd zero = VectorXcd::Zero(2);
  zero(0) = 1;
  PureState z0{RegisterLayout({{"A", 2}}), zero};
  PauliMeasurement m = pauli_string_measure(z0, "A", 1, Basis::kZ);
  CHECK(m.probability[0] == doctest::Approx(1.0));
  CHECK(m.probability[1] == doctest::Approx(0.0));

  PauliMeasurement mzz = pauli_string_measure(bell_pair("A", "B"), "A", 1, Basis::kZ);
  // Z on half a Bell pair is uniform; Z tensor Z needs both qubits in one register.
  CHECK(mzz.probability[0] == doctest::Approx(0.5));

  VectorXcd bell4 = VectorXcd::Zero(4);
  bell4(0) = kInvSqrt2;
  bell4(3) = kInvSqrt2;
  PureState phi{RegisterLayout({{"A", 4}}), bell4};  // both qubits in register A
  PauliMeasurement mboth = pauli_string_measure(phi, "A", 0b11, Basis::kZ);
  CHECK(mboth.probability[0] == doctest::Approx(1.0));

  // Z^{f_i} and X^{g_j} measurements commute when f g^T = 0.
  std::mt19937_64 rng(5);
  LinearHash f(BitMatrix::from_rows({"110", "011"}));
  LinearHash g = dual_of(f);
  for (int t = 0; t < 10; ++t) {
    PureState psi = random_pure(rng, {{"A", 8}, {"B", 2}});
    auto zx = measure_string_sequence(psi, "A", f.matrix, Basis::kZ);
    auto xz = measure_string_sequence(psi, "A", g.matrix, Basis::kX);
    // Joint distribution, Z rows first then X rows, in both orders.
    for (const auto& bz : zx) {
      if (bz.probability <= 0) continue;
      auto then_x = measure_string_sequence(bz.state, "A", g.matrix, Basis::kX);
      for (const auto& bx : then_x) {
        double p_forward = bz.probability * bx.probability;
        // Reverse order.
        double p_reverse = 0.0;
        for (const auto& ox : xz) {
          if (ox.outcome != bx.outcome || ox.probability <= 0) continue;
          auto then_z = measure_string_sequence(ox.state, "A", f.matrix, Basis::kZ);
          for (const auto& oz : then_z) {
            if (oz.outcome == bz.outcome) p_reverse += ox.probability * oz.probability;
          }
        }
        CHECK(p_forward == doctest::Approx(p_reverse).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("distances: trace norm, generalized fidelity, purified distance") {
  std::mt19937_64 rng(13);
  QOperator a = random_state(rng, {{"A", 2}, {"B", 2}}, 3);
  CHECK(l1_distance(a, a) == doctest::Approx(0.0));

  MatrixXcd p0 = MatrixXcd::Zero(2, 2), p1 = MatrixXcd::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CHECK(l1_distance(qubit_op("A", p0), qubit_op("A", p1)) == doctest::Approx(2.0));
  CHECK(generalized_fidelity(qubit_op("A", p0), qubit_op("A", p1)) == doctest::Approx(0.0));
  CHECK(purified_distance(qubit_op("A", p0), qubit_op("A", p1)) == doctest::Approx(1.0));

  // l1 via the eigenvalue oracle of the Hermitian difference.
  QOperator b = random_state(rng, {{"A", 2}, {"B", 2}}, 2);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.matrix() - b.matrix());
  CHECK(l1_distance(a, b) == doctest::Approx(es.eigenvalues().cwiseAbs().sum()).epsilon(1e-12));

  // Normalized identical states have fidelity 1, distance 0. Square roots of
  // near-zero eigenvalues leave O(sqrt(eps)) noise, hence the tolerance.
  CHECK(generalized_fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(purified_distance(a, a) < 1e-3);

  // Pure rho vs rho/2: F = 1/sqrt(2) (closed form with Tr a = 1).
  PureState psi = random_pure(rng, {{"A", 2}});
  QOperator full = psi.density();
  QOperator half(full.layout(), 0.5 * full.matrix());
  CHECK(generalized_fidelity(full, half) == doctest::Approx(1.0 / std::sqrt(2)).epsilon(1e-10));

  // Monotone under partial trace on random pairs.
  for (int t = 0; t < 10; ++t) {
    QOperator x = random_state(rng, {{"A", 2}, {"B", 2}}, 2);
    QOperator y = random_state(rng, {{"A", 2}, {"B", 2}}, 3);
    double before = purified_distance(x, y);
    double after = purified_distance(partial_trace(x, {"B"}), partial_trace(y, {"B"}));
    CHECK(after <= before + 1e-10);
  }

  // Symmetry and triangle inequality on random triples.
  for (int t = 0; t < 10; ++t) {
    QOperator x = random_state(rng, {{"A", 2}}, 2);
    QOperator y = random_state(rng, {{"A", 2}}, 1);
    QOperator z = random_state(rng, {{"A", 2}}, 2);
    CHECK(purified_distance(x, y) == doctest::Approx(purified_distance(y, x)).epsilon(1e-12));
    CHECK(purified_distance(x, z) <=
          purified_distance(x, y) + purified_distance(y, z) + 1e-7);
  }
}

TEST_CASE("standard_form_from: definition predicates and known structures") {
  std::mt19937_64 rng(17);

  // |0><0|_A tensor sigma_E: the X^A marginal is uniform in X^A.
  QOperator sigma = random_state(rng, {{"E", 2}}, 2);
  MatrixXcd p0 = MatrixXcd::Zero(2, 2);
  p0(0, 0) = 1;
  QOperator input = tensor(qubit_op("A", p0), sigma);
  StandardForm sf = standard_form_from(input, "A", Basis::kZ, "B");
  CHECK(is_classical(sf.rho_xab, "A", Basis::kX));
  QOperator xa = partial_trace(sf.rho_xab, {"B"});
  CHECK(max_abs_diff(xa.matrix(), MatrixXcd::Identity(2, 2) / 2.0) < 1e-10);

  // The purification's AE marginal reproduces the input exactly.
  std::vector<std::string> b_only{"B"};
  CHECK(max_abs_diff(partial_trace(sf.rho_abe, b_only).matrix(), input.matrix()) <
        tol::kRoundTrip);

  // Classical maximally correlated rho_ZAE: Definition predicates hold.
  MatrixXcd corr = MatrixXcd::Zero(4, 4);
  corr(0, 0) = 0.5;
  corr(3, 3) = 0.5;
  QOperator corr_op(RegisterLayout({{"A", 2}, {"E", 2}}), corr);
  StandardForm sf2 = standard_form_from(corr_op, "A", Basis::kZ, "B");
  CHECK(is_classical(partial_trace(sf2.rho_abe, {"B"}), "A", Basis::kZ));
  CHECK(is_classical(sf2.rho_xab, "A", Basis::kX));
  CHECK(sf2.rho_abe.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));

  // Product rho_ZAE = (I/2) tensor sigma_E round-trips: re-deriving the Z side
  // from the X side yields a product again, with A uniform and the side
  // spectrum {lambda_i / 2, each twice} (the X^A measurement re-randomizes
  // the purifying correlations; worked out by hand for this input).
  QOperator prod = tensor(maximally_mixed("A", 2), sigma);
  StandardForm sf3 = standard_form_from(prod, "A", Basis::kZ, "B");
  StandardForm back = standard_form_from(sf3.rho_xab, "A", Basis::kX, "E2");
  const std::size_t half = back.rho_zae.dim() / 2;
  MatrixXcd z0 = 2.0 * back.rho_zae.matrix().block(0, 0, half, half);
  MatrixXcd z1 = 2.0 * back.rho_zae.matrix().block(half, half, half, half);
  CHECK(max_abs_diff(z0, z1) < 1e-9);
  QOperator a_marginal = partial_trace(back.rho_zae, {"E2"});
  CHECK(max_abs_diff(a_marginal.matrix(), MatrixXcd::Identity(2, 2) / 2.0) < 1e-9);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es_sigma(sigma.matrix(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es_back0(z0, Eigen::EigenvaluesOnly);
  REQUIRE(es_back0.eigenvalues().size() == 4);
  for (Eigen::Index i = 0; i < 2; ++i) {
    double expected = es_sigma.eigenvalues()(i) / 2.0;
    CHECK(es_back0.eigenvalues()(2 * i) == doctest::Approx(expected).epsilon(1e-8));
    CHECK(es_back0.eigenvalues()(2 * i + 1) == doctest::Approx(expected).epsilon(1e-8));
  }

  // |0><0|_A tensor sigma is classical in Z^A but not in X^A.
  CHECK_THROWS_AS(standard_form_from(input, "A", Basis::kX, "B2"), std::invalid_argument);
}

TEST_CASE("validate_state rejects junk") {
  MatrixXcd neg(2, 2);
  neg << -0.2, 0, 0, 0.8;
  CHECK_THROWS_AS(validate_state(qubit_op("A", neg)), std::invalid_argument);
  MatrixXcd big = MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(validate_state(qubit_op("A", 2.0 * big)), std::invalid_argument);
  MatrixXcd nonherm(2, 2);
  nonherm << 1, complex<double>(0, 1), 0, 0;
  CHECK_THROWS_AS(qubit_op("A", nonherm), std::invalid_argument);
}
