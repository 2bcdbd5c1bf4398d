#include <cmath>
#include <vector>

#include "doctest.h"
#include "gradcheck.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/mlp.hpp"
#include "pricelab/rng.hpp"

using namespace pricelab;
using Net = Mlp<double>;

namespace {

// Plain loops, no Eigen.
std::vector<double> reference_forward(const Net& net, const std::vector<double>& x) {
  std::vector<double> h = x;
  const auto& p = net.parameters();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    std::vector<double> z(static_cast<std::size_t>(p.weights[l].rows()));
    for (Eigen::Index r = 0; r < p.weights[l].rows(); ++r) {
      double acc = p.biases[l](r);
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c) acc += p.weights[l](r, c) * h[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = (l + 1 < p.weights.size()) ? std::max(0.0, acc) : acc;
    }
    h = std::move(z);
  }
  return h;
}

}  // namespace

TEST_CASE("zero network outputs zeros and output bias passes through") {
  Net net({4, 8, 8, 15});
  const std::vector<double> obs{0.3, -1.0, 2.0, 0.5};
  for (double q : net.forward(obs)) CHECK(q == 0.0);
  net.parameters().biases.back().setConstant(0.7);
  for (double q : net.forward(obs)) CHECK(q == 0.7);
}

TEST_CASE("forward matches a loop implementation, including dead units") {
  Rng rng(21);
  Net net = Net::glorot({4, 8, 8, 15}, rng);
  bool saw_negative = false;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> obs(4);
    for (auto& v : obs) v = 4.0 * rng.uniform() - 2.0;
    const auto got = net.forward(obs);
    const auto want = reference_forward(net, obs);
    for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    const Net::Vector z = net.parameters().weights[0] * Eigen::Map<const Eigen::VectorXd>(obs.data(), 4);
    saw_negative = saw_negative || z.minCoeff() < 0.0;
  }
  CHECK(saw_negative);
}

TEST_CASE("forward rejects a wrong observation length") {
  Net net({4, 8, 15});
  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0, 2.0}), InvalidInput);
}

TEST_CASE("glorot initialization bounds and zero biases") {
  Rng rng(22);
  Net net = Net::glorot({4, 64, 64, 15}, rng);
  const auto& p = net.parameters();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(p.weights[l].rows() + p.weights[l].cols()));
    CHECK(p.weights[l].cwiseAbs().maxCoeff() <= limit);
    CHECK(p.biases[l].isZero());
  }
  CHECK(net.parameter_count() == 4 * 64 + 64 + 64 * 64 + 64 + 64 * 15 + 15);
}

TEST_CASE("flatten and unflatten round-trip") {
  Rng rng(23);
  Net net = Net::glorot({3, 5, 2}, rng);
  const auto flat = net.flatten();
  CHECK(flat.size() == net.parameter_count());
  Net copy({3, 5, 2});
  copy.unflatten(flat);
  CHECK(copy.parameters() == net.parameters());
  // Row-major weights: second entry is W0(0, 1).
  CHECK(flat[1] == net.parameters().weights[0](0, 1));
  CHECK_THROWS_AS(copy.unflatten(std::vector<double>(3)), InvalidInput);
}

TEST_CASE("loss is zero and gradients vanish when targets equal Q") {
  Rng rng(24);
  Net net = Net::glorot({4, 8, 8, 15}, rng);
  Net::Matrix x = Net::Matrix::Random(4, 6);
  const Net::Matrix q = net.forward_batch(x);
  std::vector<int> actions{0, 3, 14, 7, 7, 2};
  std::vector<double> targets;
  for (std::size_t j = 0; j < actions.size(); ++j) targets.push_back(q(actions[j], static_cast<Eigen::Index>(j)));
  Net::Params grads;
  CHECK(net.loss_and_gradients(x, actions, targets, grads) == 0.0);
  CHECK(grads.squared_norm() == 0.0);
}

TEST_CASE("only the taken action receives output gradient") {
  Rng rng(25);
  Net net = Net::glorot({2, 4, 5}, rng);
  Net::Matrix x(2, 1);
  x << 0.5, -0.25;
  Net::Params grads;
  net.loss_and_gradients(x, std::vector<int>{3}, std::vector<double>{1.0}, grads);
  for (Eigen::Index r = 0; r < 5; ++r) {
    if (r == 3) {
      CHECK(grads.biases.back()(r) != 0.0);
    } else {
      CHECK(grads.biases.back()(r) == 0.0);
      CHECK(grads.weights.back().row(r).isZero());
    }
  }
}

TEST_CASE("gradients agree with central finite differences") {
  Rng rng(26);
  for (int trial = 0; trial < 5; ++trial) {
    const auto result = gradcheck::check(rng, {4, 8, 8, 15}, 16);
    CHECK(result.relative_error < 1e-4);
  }
}

TEST_CASE("first Adam step moves each parameter by lr") {
  Net net({1, 1});
  net.parameters().weights[0](0, 0) = 0.5;
  Adam<double> adam(net.parameters());
  Net::Params g = net.parameters();
  g.weights[0](0, 0) = 1.0;
  g.biases[0](0) = -3.0;
  adam.step(net.parameters(), g, 0.01);
  CHECK(std::abs(net.parameters().weights[0](0, 0) - (0.5 - 0.01 / (1.0 + 1e-8))) < 1e-12);
  CHECK(std::abs(net.parameters().biases[0](0) - 0.01 * 3.0 / (3.0 + 1e-8)) < 1e-12);

  // Step 2 with the same gradient: m_hat = v_hat^(1/2) = 1 again.
  const double before = net.parameters().weights[0](0, 0);
  adam.step(net.parameters(), g, 0.01);
  const double delta = before - net.parameters().weights[0](0, 0);
  CHECK(std::abs(delta - 0.01) < 0.01 * 0.01);
  CHECK(adam.steps() == 2);
}

TEST_CASE("zero gradient leaves parameters unchanged and decays moments") {
  Net net({1, 1});
  Adam<double> adam(net.parameters());
  Net::Params g = net.parameters();
  g.weights[0](0, 0) = 1.0;
  adam.step(net.parameters(), g, 0.01);
  const double m1 = adam.first_moment().weights[0](0, 0);
  const double v1 = adam.second_moment().weights[0](0, 0);
  Net::Params zero = g;
  zero.set_zero();
  // From a fresh state a zero gradient is a no-op.
  Net fresh({1, 1});
  Adam<double> fresh_adam(fresh.parameters());
  fresh_adam.step(fresh.parameters(), zero, 0.01);
  CHECK(fresh.parameters() == Net({1, 1}).parameters());
  adam.step(net.parameters(), zero, 0.01);
  CHECK(adam.first_moment().weights[0](0, 0) == doctest::Approx(0.9 * m1));
  CHECK(adam.second_moment().weights[0](0, 0) == doctest::Approx(0.999 * v1));
}
