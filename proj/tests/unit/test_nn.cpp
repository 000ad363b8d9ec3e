#include <doctest.h>

#include <cmath>
#include <limits>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/nn/gradcheck.hpp"
#include "fluxnet/nn/kernels.hpp"
#include "fluxnet/nn/network.hpp"
#include "fluxnet/nn/serialize.hpp"
#include "fluxnet/nn/training.hpp"
#include "oracles.hpp"

using namespace fluxnet;
using namespace fluxnet::nn;
using oracle::TestRng;

namespace {

NetworkSpec make_spec(std::size_t in, std::vector<std::size_t> hidden, std::size_t out,
                      Activation a = Activation::Tanh) {
  NetworkSpec s;
  s.input_dim = in;
  s.output_dim = out;
  s.hidden_layers = std::move(hidden);
  s.activation = a;
  return s;
}

Matrix random_matrix(std::size_t r, std::size_t c, TestRng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(-2, 2);
  return m;
}

// Central-difference gradient of the batch loss, written independently of
// the library's own checker.
double fd_derivative(NetworkParameters& p, double& slot, const TrainingData& d, LossNorm norm) {
  const double eps = 1e-6, saved = slot;
  slot = saved + eps;
  const double up = relative_loss(d.targets, predict(p, d), norm);
  slot = saved - eps;
  const double down = relative_loss(d.targets, predict(p, d), norm);
  slot = saved;
  return (up - down) / (2 * eps);
}

}  // namespace

TEST_CASE("init_params shapes, determinism and Glorot bound") {
  const NetworkParameters a = init_params(make_spec(2, {3}, 1), 7);
  CHECK(a.layers.size() == 2);
  CHECK(a.layers[0].weights.size() == 6);
  CHECK(a.layers[0].out == 3);
  CHECK(a.layers[1].weights.size() == 3);
  CHECK(a.layers[0].bias.size() == 3);
  CHECK(a.layers[1].bias.size() == 1);
  CHECK(a == init_params(make_spec(2, {3}, 1), 7));
  CHECK_FALSE(a == init_params(make_spec(2, {3}, 1), 8));

  const NetworkParameters b = init_params(make_spec(2, {32, 32, 32}, 1), 3);
  for (const DenseLayer& l : b.layers) {
    const double bound = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (double w : l.weights) REQUIRE(std::abs(w) <= bound);
    for (double v : l.bias) REQUIRE(v == 0.0);
  }
  CHECK_THROWS_AS(init_params(make_spec(2, {0}, 1), 1), ConfigError);
}

TEST_CASE("forward examples") {
  NetworkParameters p = init_params(make_spec(2, {4, 4}, 1), 1);
  for (DenseLayer& l : p.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  CHECK(forward(p, std::vector<double>{0.3, -1.2})[0] == 0.0);

  // 2 -> [1] -> 1: y = v * tanh(w1 x1 + w2 x2 + b) + c
  NetworkParameters h = init_params(make_spec(2, {1}, 1), 1);
  h.layers[0].weights = {0.5, -0.25};
  h.layers[0].bias = {0.1};
  h.layers[1].weights = {2.0};
  h.layers[1].bias = {-0.3};
  const double expected = 2.0 * std::tanh(0.5 * 0.4 - 0.25 * 0.8 + 0.1) - 0.3;
  CHECK(forward(h, std::vector<double>{0.4, 0.8})[0] == doctest::Approx(expected).epsilon(1e-15));

  CHECK_THROWS_AS(forward(h, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("batch forward equals independent single evaluations") {
  TestRng rng(51);
  for (Activation act : {Activation::Tanh, Activation::ReLU}) {
    const NetworkParameters p = init_params(make_spec(3, {7, 5}, 2, act), 4);
    const Matrix x = random_matrix(13, 3, rng);
    const Matrix y = forward_batch(p, x);
    for (std::size_t r = 0; r < x.rows; ++r) {
      const std::vector<double> single = forward(p, x.row(r));
      for (std::size_t c = 0; c < 2; ++c) REQUIRE(y(r, c) == single[c]);
    }
  }
}

TEST_CASE("relative loss examples and properties") {
  Matrix t(1, 1, 2.0), pr(1, 1, 1.0);
  CHECK(relative_loss(t, pr, LossNorm::L1) == 0.5);
  CHECK(relative_loss(t, t, LossNorm::L1) == 0.0);
  Matrix t2(2, 1), p2(2, 1, 0.0);
  t2.data = {1.0, -1.0};
  CHECK(relative_loss(t2, p2, LossNorm::L1) == 1.0);
  CHECK(relative_loss(t2, p2, LossNorm::L2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_loss(Matrix(3, 1, 0.0), Matrix(3, 1, 1.0), LossNorm::L1), InvalidStateError);
  CHECK_THROWS_AS(relative_loss(Matrix(3, 1, 1.0), Matrix(2, 1, 1.0), LossNorm::L1), DimensionError);

  // permutation invariance (sums of integers-valued doubles are exact)
  TestRng rng(52);
  Matrix a(50, 2), b(50, 2);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    a.data[i] = std::round(rng.uniform(-100, 100));
    b.data[i] = std::round(rng.uniform(-100, 100));
  }
  Matrix ar = a, br = b;
  for (std::size_t r = 0; r < 50; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      ar(r, c) = a(49 - r, c);
      br(r, c) = b(49 - r, c);
    }
  }
  CHECK(relative_loss(a, b, LossNorm::L1) == relative_loss(ar, br, LossNorm::L1));
}

TEST_CASE("backward: zero loss gives zero gradient") {
  TestRng rng(53);
  const NetworkParameters p = init_params(make_spec(2, {3}, 1), 2);
  TrainingData d{random_matrix(10, 2, rng), Matrix{}, Matrix{}};
  d.targets = forward_batch(p, d.inputs);
  for (LossNorm norm : {LossNorm::L1, LossNorm::L2}) {
    const LossAndGradient g = backward(p, d, norm);
    CHECK(g.loss == 0.0);
    for (const DenseLayer& l : g.gradient) {
      for (double v : l.weights) REQUIRE(v == 0.0);
      for (double v : l.bias) REQUIRE(v == 0.0);
    }
  }
}

TEST_CASE("backward matches finite differences on a 2 -> [3] -> 1 network") {
  TestRng rng(54);
  NetworkParameters p = init_params(make_spec(2, {3}, 1), 5);
  for (double& b : p.layers[0].bias) b = rng.uniform(-0.5, 0.5);
  TrainingData d{random_matrix(10, 2, rng), Matrix(10, 1), Matrix{}};
  const Matrix y = forward_batch(p, d.inputs);
  for (std::size_t i = 0; i < 10; ++i) d.targets.data[i] = y.data[i] + (i % 2 ? 0.3 : -0.4);
  for (LossNorm norm : {LossNorm::L1, LossNorm::L2}) {
    const LossAndGradient g = backward(p, d, norm);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      for (std::size_t i = 0; i < p.layers[l].weights.size(); ++i) {
        const double fd = fd_derivative(p, p.layers[l].weights[i], d, norm);
        REQUIRE(gradient_relative_error(g.gradient[l].weights[i], fd) < 1e-5);
      }
      for (std::size_t i = 0; i < p.layers[l].bias.size(); ++i) {
        const double fd = fd_derivative(p, p.layers[l].bias[i], d, norm);
        REQUIRE(gradient_relative_error(g.gradient[l].bias[i], fd) < 1e-5);
      }
    }
  }
}

TEST_CASE("L1 gradient is unchanged in magnitude when targets and predictions flip sign") {
  TestRng rng(55);
  const NetworkParameters p = init_params(make_spec(2, {4}, 1), 6);
  NetworkParameters neg = p;
  for (double& w : neg.layers.back().weights) w = -w;  // output layer flips the prediction
  TrainingData d{random_matrix(12, 2, rng), Matrix(12, 1), Matrix{}};
  for (double& t : d.targets.data) t = rng.uniform(-2, 2);
  TrainingData dn = d;
  for (double& t : dn.targets.data) t = -t;
  const LossAndGradient a = backward(p, d, LossNorm::L1);
  const LossAndGradient b = backward(neg, dn, LossNorm::L1);
  CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-15));
  for (std::size_t l = 0; l < a.gradient.size(); ++l) {
    for (std::size_t i = 0; i < a.gradient[l].weights.size(); ++i)
      REQUIRE(std::abs(a.gradient[l].weights[i]) == doctest::Approx(std::abs(b.gradient[l].weights[i])).epsilon(1e-13));
  }
}

TEST_CASE("gradient check over 20 random configurations") {
  double worst = 0.0;
  for (const GradCheckCase& c : random_gradcheck_cases(20, 2024)) {
    const GradCheckResult r = gradient_check(c);
    CHECK(r.parameters_checked > 0);
    worst = std::max(worst, r.max_relative_error);
  }
  MESSAGE("max relative gradient error " << worst);
  CHECK(worst < 1e-5);
}

TEST_CASE("Adam examples") {
  NetworkParameters p = init_params(make_spec(1, {1}, 1), 1);
  p.layers[0].weights = {1.0};
  LayerArrays g = zeros_like(p);
  TrainConfig cfg;
  AdamState state = make_adam_state(p);

  SUBCASE("zero gradient leaves parameters unchanged") {
    const NetworkParameters before = p;
    adam_step(p, g, state, 0.01, cfg);
    CHECK(p == before);
    CHECK(state.step == 1);
  }
  SUBCASE("first step with g = 2") {
    g[0].weights = {2.0};
    adam_step(p, g, state, 0.01, cfg);
    CHECK(p.layers[0].weights[0] == doctest::Approx(1.0 - 0.01 * 2.0 / (2.0 + 1e-8)).epsilon(1e-15));
    CHECK(state.m[0].weights[0] == doctest::Approx(0.2));
    CHECK(state.v[0].weights[0] == doctest::Approx(0.004));
  }
  SUBCASE("determinism") {
    g[0].weights = {0.7};
    NetworkParameters q = p;
    AdamState s2 = state;
    adam_step(p, g, state, 0.01, cfg);
    adam_step(q, g, s2, 0.01, cfg);
    CHECK(p == q);
  }
}

TEST_CASE("learning-rate schedule") {
  LrSchedule s;
  CHECK(s.rate(0.01, 0) == 0.01);
  CHECK(s.rate(0.01, 299) == 0.01);
  CHECK(s.rate(0.01, 300) == 0.005);
  CHECK(s.rate(0.01, 900) == 0.00125);
  s.kind = ScheduleKind::Constant;
  CHECK(s.rate(0.01, 10000) == 0.01);
}

TEST_CASE("training memorizes a single sample and is deterministic") {
  TrainingData d{Matrix(1, 2), Matrix(1, 1), Matrix{}};
  d.inputs.data = {0.5, -1.0};
  d.targets.data = {0.75};
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.batch_size = 1;
  cfg.loss_norm = LossNorm::L2;
  // |r| / |t| has a sign-like gradient, so Adam only settles as the rate decays
  cfg.schedule.every = 25;
  cfg.seed = 11;
  const NetworkSpec spec = make_spec(2, {4}, 1);
  const TrainResult a = train(d, spec, cfg);
  CHECK(a.history.loss.size() == 500);
  CHECK(a.history.learning_rate.size() == 500);
  const double final_loss = relative_loss(d.targets, predict(a.params, d), LossNorm::L2);
  CHECK(final_loss < 1e-6);
  CHECK(a.history.loss.back() <= a.history.loss.front());
  const TrainResult b = train(d, spec, cfg);
  CHECK(a.params == b.params);
  CHECK(a.history.loss == b.history.loss);
}

TEST_CASE("training with offsets learns the residual and shuffles deterministically") {
  TestRng rng(56);
  TrainingData d{random_matrix(200, 2, rng), Matrix(200, 1), Matrix(200, 1)};
  for (std::size_t i = 0; i < 200; ++i) {
    const double x = d.inputs(i, 0), y = d.inputs(i, 1);
    d.offsets.data[i] = x * x;
    d.targets.data[i] = x * x + 0.3 * std::sin(y);
  }
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.batch_size = 64;  // last batch is partial
  cfg.seed = 3;
  const TrainResult r = train(d, make_spec(2, {8}, 1), cfg);
  CHECK(r.history.loss.back() < 0.5 * r.history.loss.front());
  const TrainResult r2 = train(d, make_spec(2, {8}, 1), cfg);
  CHECK(r.params == r2.params);
  cfg.seed = 4;
  CHECK_FALSE(train(d, make_spec(2, {8}, 1), cfg).params == r.params);
}

TEST_CASE("training errors") {
  TrainingData d{Matrix(4, 2, 1.0), Matrix(4, 1, 1.0), Matrix{}};
  TrainConfig cfg;
  cfg.batch_size = 5;
  CHECK_THROWS_AS(train(d, make_spec(2, {3}, 1), cfg), ConfigError);
  cfg.batch_size = 2;
  cfg.adam_beta1 = 1.0;
  CHECK_THROWS_AS(train(d, make_spec(2, {3}, 1), cfg), ConfigError);
  cfg.adam_beta1 = 0.9;
  CHECK_THROWS_AS(train(d, make_spec(3, {3}, 1), cfg), DimensionError);
  d.inputs(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train(d, make_spec(2, {3}, 1), cfg), DivergenceError);
}

TEST_CASE("scalar and AVX2 training agree over a short run") {
  if (kernels::avx2_kernels() == nullptr) return;
  TestRng rng(57);
  TrainingData d{random_matrix(300, 4, rng), Matrix(300, 2), Matrix{}};
  for (std::size_t i = 0; i < 300; ++i) {
    d.targets(i, 0) = std::sin(d.inputs(i, 0)) + d.inputs(i, 1);
    d.targets(i, 1) = d.inputs(i, 2) * d.inputs(i, 3);
  }
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 100;
  cfg.loss_norm = LossNorm::L2;
  const NetworkSpec spec = make_spec(4, {40, 40}, 2);
  kernels::select_kernels("scalar");
  const TrainResult s = train(d, spec, cfg);
  kernels::select_kernels("avx2");
  const TrainResult v = train(d, spec, cfg);
  kernels::select_kernels("auto");
  double diff = 0.0;
  for (std::size_t l = 0; l < s.params.layers.size(); ++l)
    for (std::size_t i = 0; i < s.params.layers[l].weights.size(); ++i)
      diff = std::max(diff, std::abs(s.params.layers[l].weights[i] - v.params.layers[l].weights[i]));
  CHECK(diff < 1e-9);
}

TEST_CASE("network JSON round trip is bit exact") {
  const NetworkParameters p = init_params(make_spec(6, {40, 40}, 2, Activation::ReLU), 99);
  const nlohmann::json j = layers_to_json(p);
  const NetworkParameters q = parameters_from_json(spec_from_json(spec_to_json(p.spec)), 99,
                                                   nlohmann::json::parse(j.dump()));
  CHECK(p == q);
  nlohmann::json bad = j;
  bad[0]["weights"].erase(0);
  CHECK_THROWS_AS(parameters_from_json(p.spec, 99, bad), DimensionError);
  TrainConfig c;
  c.epochs = 1300;
  c.schedule.every = 250;
  const TrainConfig c2 = train_config_from_json(train_config_to_json(c));
  CHECK(c2.epochs == 1300);
  CHECK(c2.schedule.every == 250);
}
