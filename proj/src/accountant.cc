// Copyright 2026 The pretext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pretext/accountant.h"

#include <cmath>
#include <limits>

#include "pretext/error.h"

namespace pretext {
namespace {

constexpr double kMinNoiseMultiplier = 1e-3;
constexpr double kMaxNoiseMultiplier = 1e6;
constexpr double kCalibrationTolerance = 1e-3;

nlohmann::ordered_json JsonNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::vector<double> DefaultOrders() {
  return {1.1,  1.2,  1.25, 1.3,  1.4,  1.5,  1.6,  1.75, 1.9,  2.0,  2.25,
          2.5,  2.75, 3.0,  3.5,  4.0,  4.5,  5.0,  5.5,  6.0,  7.0,  8.0,
          9.0,  10.0, 11.0, 12.0, 14.0, 16.0, 18.0, 20.0, 24.0, 28.0, 32.0,
          40.0, 48.0, 56.0, 64.0, 80.0, 96.0, 128.0, 160.0, 192.0, 256.0};
}

AccountantState AccountantState::WithOrders(std::vector<double> orders) {
  for (double a : orders) {
    if (!(a > 1.0)) throw InvalidArgumentError("Renyi orders must be > 1");
  }
  AccountantState s;
  s.rdp.assign(orders.size(), 0.0);
  s.orders = std::move(orders);
  return s;
}

double GaussianRdp(double alpha, double noise_multiplier) {
  return alpha / (2.0 * noise_multiplier * noise_multiplier);
}

AccountantState ComposeGaussian(AccountantState state, double noise_multiplier,
                                int64_t steps) {
  if (!(noise_multiplier > 0.0)) {
    throw InvalidArgumentError("noise_multiplier must be > 0");
  }
  if (steps < 0) throw InvalidArgumentError("steps must be >= 0");
  for (std::size_t i = 0; i < state.orders.size(); ++i) {
    state.rdp[i] +=
        static_cast<double>(steps) * GaussianRdp(state.orders[i], noise_multiplier);
  }
  return state;
}

EpsilonResult ToEpsilon(const AccountantState& state, double delta) {
  if (state.orders.empty()) throw InvalidArgumentError("empty order grid");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgumentError("delta must be in (0, 1)");
  }
  EpsilonResult best{std::numeric_limits<double>::infinity(), state.orders[0]};
  const double log_delta = std::log(delta);
  for (std::size_t i = 0; i < state.orders.size(); ++i) {
    const double a = state.orders[i];
    const double eps = state.rdp[i] + std::log((a - 1.0) / a) -
                       (log_delta + std::log(a)) / (a - 1.0);
    if (eps < best.epsilon) best = {eps, a};
  }
  best.epsilon = std::max(best.epsilon, 0.0);
  return best;
}

PrivacyReport AccountSigma(double sigma, int64_t cap, int64_t steps,
                           double delta) {
  if (cap < 1) throw InvalidArgumentError("cap must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidArgumentError("sigma must be >= 0");
  PrivacyReport r;
  r.delta = delta;
  r.sigma = sigma;
  r.cap = cap;
  r.steps = steps;
  r.noise_multiplier = sigma / static_cast<double>(cap);
  if (steps == 0) {
    r.epsilon = 0.0;
    r.best_order = DefaultOrders().front();
    return r;
  }
  if (sigma == 0.0) {
    r.epsilon = std::numeric_limits<double>::infinity();
    r.best_order = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  EpsilonResult e = ToEpsilon(
      ComposeGaussian(AccountantState::Default(), r.noise_multiplier, steps),
      delta);
  r.epsilon = e.epsilon;
  r.best_order = e.best_order;
  return r;
}

PrivacyReport CalibrateSigma(double target_epsilon, double delta,
                             int64_t steps, int64_t cap) {
  if (!(target_epsilon > 0.0)) {
    throw InvalidArgumentError("target epsilon must be > 0");
  }
  if (steps < 1) throw InvalidArgumentError("steps must be >= 1");
  if (cap < 1) throw InvalidArgumentError("cap must be >= 1");
  auto eps_at = [&](double z) {
    return ToEpsilon(ComposeGaussian(AccountantState::Default(), z, steps),
                     delta)
        .epsilon;
  };
  // Epsilon decreases in z: keep eps(lo) > target >= eps(hi).
  double lo = kMinNoiseMultiplier;
  double hi = kMaxNoiseMultiplier;
  if (eps_at(hi) > target_epsilon || eps_at(lo) <= target_epsilon) {
    throw Error("cannot bracket target epsilon " +
                std::to_string(target_epsilon) +
                " with noise multiplier in [1e-3, 1e6]");
  }
  for (int iter = 0; iter < 500; ++iter) {
    if (eps_at(hi) >= target_epsilon - kCalibrationTolerance) break;
    const double mid = std::sqrt(lo * hi);  // z spans nine decades
    (eps_at(mid) > target_epsilon ? lo : hi) = mid;
  }
  if (eps_at(hi) < target_epsilon - kCalibrationTolerance) {
    throw Error("sigma calibration did not converge");
  }
  return AccountSigma(hi * static_cast<double>(cap), cap, steps, delta);
}

nlohmann::ordered_json ToJson(const PrivacyReport& report) {
  nlohmann::ordered_json j;
  j["epsilon"] = JsonNumber(report.epsilon);
  j["delta"] = JsonNumber(report.delta);
  j["sigma"] = JsonNumber(report.sigma);
  j["noise_multiplier"] = JsonNumber(report.noise_multiplier);
  j["steps"] = report.steps;
  j["cap"] = report.cap;
  j["best_order"] = JsonNumber(report.best_order);
  return j;
}

}  // namespace pretext
