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

#ifndef PRETEXT_ACCOUNTANT_H_
#define PRETEXT_ACCOUNTANT_H_

#include <cstdint>
#include <vector>

#include "json.hpp"

namespace pretext {

// Renyi orders used when none are given. Dense enough that the coarse-grid
// epsilon stays within ~1% of a 10x finer grid for epsilon in [0.05, 100].
std::vector<double> DefaultOrders();

// Accumulated Renyi divergence per order for a sequence of Gaussian
// releases without subsampling.
struct AccountantState {
  std::vector<double> orders;
  std::vector<double> rdp;

  static AccountantState WithOrders(std::vector<double> orders);
  static AccountantState Default() { return WithOrders(DefaultOrders()); }
};

// RDP of one full-batch Gaussian release: alpha / (2 z^2).
double GaussianRdp(double alpha, double noise_multiplier);

// Adds `steps` Gaussian releases at `noise_multiplier` to every order.
AccountantState ComposeGaussian(AccountantState state, double noise_multiplier,
                                int64_t steps);

struct EpsilonResult {
  double epsilon = 0.0;
  double best_order = 0.0;
};

// RDP -> (epsilon, delta) using the conversion
//   eps(a) = rdp(a) + log((a-1)/a) - (log(delta) + log(a)) / (a-1),
// minimized over the orders and clamped below at 0.
EpsilonResult ToEpsilon(const AccountantState& state, double delta);

struct PrivacyReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  double noise_multiplier = 0.0;
  int64_t steps = 0;
  int64_t cap = 1;
  double best_order = 0.0;
};

// Accounts `steps` releases at aggregate noise `sigma` with sensitivity
// `cap`. sigma == 0 yields an infinite epsilon.
PrivacyReport AccountSigma(double sigma, int64_t cap, int64_t steps,
                           double delta);

// Bisects the noise multiplier in [1e-3, 1e6] until the accounted epsilon
// lies in [target - 1e-3, target]; reports sigma = z * cap.
PrivacyReport CalibrateSigma(double target_epsilon, double delta,
                             int64_t steps, int64_t cap);

// Serializes with exactly the PrivacyReport field names. Non-finite values
// are written as the strings "inf" / "nan".
nlohmann::ordered_json ToJson(const PrivacyReport& report);

}  // namespace pretext

#endif  // PRETEXT_ACCOUNTANT_H_
