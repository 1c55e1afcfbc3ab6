#include <cmath>
#include <numbers>
#include <random>

#include <catch_amalgamated.hpp>

#include "robe/spectral_index.hpp"

using namespace robe;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

double quadrature_coefficient(double e, int m, int samples = 8192) {
  double sum = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = kTwoPi * j / samples;
    sum += std::cos(m * t) / (1.0 + e * std::cos(t));
  }
  return sum / samples;
}

Eigen::Vector2cd circular(bool plus) {
  const double h = 1.0 / std::sqrt(2.0);
  return plus ? Eigen::Vector2cd(h, Complex(0, h)) : Eigen::Vector2cd(h, Complex(0, -h));
}

// <phi_a, A phi_b> / (2 pi) by direct quadrature in the circular basis.
double quadrature_entry(const ParameterPoint& p, const UnitCirclePoint& w, int k, bool plus_k, int l,
                        bool plus_l, int samples = 4096) {
  const double s = w.twist();
  double free = 0.0;
  if (k == l && plus_k == plus_l) free = (k + s) * (k + s) - 1.0;
  Complex sum = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = kTwoPi * j / samples;
    const Matrix2 v = second_order_potential_rotated(t, p) + Matrix2::Identity();
    const Complex inner = circular(plus_k).dot(v.cast<Complex>() * circular(plus_l));
    sum += inner * std::polar(1.0, (l - k) * t);
  }
  sum /= double(samples);
  CHECK(std::abs(sum.imag()) < 1e-12);
  return free + sum.real();
}

}  // namespace

TEST_CASE("inverse kepler coefficients match quadrature", "[spectral_index]") {
  for (double e : {0.0, 0.3, 0.7, 0.9}) {
    for (int m : {0, 1, 2, 3, 6, -3}) {
      INFO("e=" << e << " m=" << m);
      CHECK_THAT(inverse_kepler_coefficient(e, m), WithinAbs(quadrature_coefficient(e, m), 1e-12));
    }
  }
  CHECK_THROWS_AS(inverse_kepler_coefficient(1.0, 0), InvalidParameter);
}

TEST_CASE("galerkin entries match direct quadrature", "[spectral_index]") {
  const ParameterPoint p(0.6, 0.4);
  const UnitCirclePoint w(1.3);
  const auto op = assemble_operator(p, w, 6);
  for (int k : {-2, 0, 3}) {
    for (int l : {-1, 0, 2, 3}) {
      for (bool pk : {true, false}) {
        for (bool pl : {true, false}) {
          INFO("k=" << k << " l=" << l << " pk=" << pk << " pl=" << pl);
          CHECK_THAT(op.matrix(op.position(k, pk), op.position(l, pl)),
                     WithinAbs(quadrature_entry(p, w, k, pk, l, pl), 1e-12));
        }
      }
    }
  }
}

TEST_CASE("galerkin matrix is hermitian", "[spectral_index]") {
  const auto op = assemble_operator(ParameterPoint(0.37, 0.21), UnitCirclePoint(2.1), 24);
  CHECK(op.size() == 2 * 49);
  CHECK(hermiticity_residual(op) <= 1e-12);
  CHECK_THROWS_AS(assemble_operator(ParameterPoint(0.37, 0.21), UnitCirclePoint(2.1), 3),
                  InvalidParameter);
}

TEST_CASE("index and nullity at tabulated points", "[spectral_index]") {
  const auto r = morse_index_nullity(ParameterPoint(0.95, 0.0), UnitCirclePoint(kPi));
  CHECK(r.pair == IndexPair{2, 0});
  CHECK(r.truncation_used >= 32);
  CHECK(morse_index_nullity(ParameterPoint(0.0, 0.3), UnitCirclePoint::one()).pair == IndexPair{0, 2});
  CHECK(morse_index_nullity(ParameterPoint(1.0, 0.6), UnitCirclePoint::one()).pair == IndexPair{0, 3});
  CHECK(morse_index_nullity(ParameterPoint(kMuStar, 0.0), UnitCirclePoint::minus_one()).pair ==
        IndexPair{0, 2});
  CHECK(morse_index_nullity(ParameterPoint(0.5, 0.0), UnitCirclePoint::minus_one()).pair ==
        IndexPair{0, 0});
}

TEST_CASE("truncation limits are enforced", "[spectral_index]") {
  SpectralConfig cfg;
  cfg.max_truncation = 40;
  CHECK_THROWS_AS(morse_index_nullity(ParameterPoint(0.5, 0.9), UnitCirclePoint(1.0), cfg),
                  TruncationNotConverged);
  CHECK(minimum_truncation(0.0, SpectralConfig{}) == 32);
  CHECK(minimum_truncation(0.9, SpectralConfig{}) > minimum_truncation(0.5, SpectralConfig{}));
}

TEST_CASE("zero band classification", "[spectral_index]") {
  Eigen::VectorXd ev(5);
  ev << -2.0, -1e-9, 0.0, 5e-9, 1.0;
  CHECK(count_index_nullity(ev, 1e-8) == IndexPair{1, 3});
  CHECK(count_index_nullity(ev, 1e-10) == IndexPair{2, 1});
}

TEST_CASE("circular blocks reproduce the mode polynomial", "[spectral_index]") {
  for (double mu : {0.2, 0.9}) {
    for (double n : {0.5, 1.5, 2.0}) {
      const auto b = mode_block(mu, n);
      const double n2 = n * n;
      CHECK_THAT(b.lower + b.upper, WithinAbs(2 * n2 + 2 + mu, 1e-12));
      CHECK_THAT(b.lower * b.upper,
                 WithinAbs(-(2 * mu * mu - (n2 + 1) * mu - (n2 - 1) * (n2 - 1)), 1e-10));
    }
  }
  const auto oracle = e_zero_block_oracle(kMuStar, -1, 16);
  CHECK(oracle.pair == IndexPair{0, 2});
  CHECK(static_cast<int>(oracle.eigenvalues.size()) == 2 * (2 * 16 + 1));
}

TEST_CASE("galerkin spectrum equals the block spectrum at e = 0", "[spectral_index]") {
  for (int sign : {1, -1}) {
    for (double mu : {0.1, 0.5, 0.93}) {
      const UnitCirclePoint w(sign == 1 ? 0.0 : kPi);
      const auto ev = operator_eigenvalues(assemble_operator(ParameterPoint(mu, 0.0), w, 20).matrix);
      const auto oracle = e_zero_block_oracle(mu, sign, 20);
      for (int i = 0; i < ev.size(); ++i) CHECK_THAT(ev(i), WithinAbs(oracle.eigenvalues[i], 1e-10));
    }
  }
}

TEST_CASE("scaled operator eigenvalues decrease in mu", "[spectral_index]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const double e = 0.6 * unit(rng);
    const UnitCirclePoint w(kTwoPi * unit(rng));
    const double mu1 = 0.05 + 0.9 * unit(rng);
    const double mu2 = std::min(1.0, mu1 + 0.05 * unit(rng));
    const auto a = operator_eigenvalues(assemble_scaled_operator(ParameterPoint(mu1, e), w, 16));
    const auto b = operator_eigenvalues(assemble_scaled_operator(ParameterPoint(mu2, e), w, 16));
    for (int i = 0; i < a.size(); ++i) CHECK(b(i) <= a(i) + 1e-9 * std::abs(a(i)));
  }
}

TEST_CASE("kernel at mu* solves the operator equation", "[spectral_index]") {
  const auto kernel = kernel_basis_minus_one();
  const auto w = UnitCirclePoint::minus_one();
  const auto op = assemble_operator(ParameterPoint(kMuStar, 0.0), w, 8);
  for (int which = 0; which < 2; ++which) {
    const std::function<Eigen::Vector2d(double)> field = [&](double t) {
      return which == 0 ? kernel.first(t) : kernel.second(t);
    };
    const Eigen::VectorXcd c = project_onto_basis(field, w, 8);
    CHECK(c.norm() > 0.5);
    const Eigen::VectorXcd residual = op.matrix.cast<Complex>() * c;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((field(kTwoPi) + field(0.0)).norm() < 1e-12);
  }
}

TEST_CASE("perturbation pairings", "[spectral_index]") {
  const double s97 = std::sqrt(97.0);
  CHECK_THAT(perturbation_pairing(ParameterDirection::Mu), WithinAbs(kPi * (97 - 15 * s97) / 64, 1e-6));
  CHECK_THAT(perturbation_pairing(ParameterDirection::E), WithinAbs(kPi * (-33 + 15 * s97) / 1024, 1e-6));
  CHECK_THAT(predicted_tangent_slope(), WithinAbs((291 + 15 * s97) / 3104, 1e-9));
}
