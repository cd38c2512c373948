/*
 * Copyright 2026 The BNET Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Distances between policies measured on their action distributions over a
// set of stored states, and the imitation losses built from them.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "bnet/cgp.hpp"
#include "bnet/state_batch.hpp"
#include "bnet/trajectory.hpp"

namespace bnet {

/// Reference states, the actions taken there, the adapted (one-hot) reference
/// probabilities and one weight per step (an advantage or an immediate reward).
struct BehaviorSample {
    StateBatch states;
    std::vector<std::size_t> actions;
    std::vector<double> reference_probabilities;  // row-major T x n_actions
    std::vector<double> weights;
    std::size_t n_actions = 0;

    std::size_t size() const noexcept { return states.size(); }
    /// Throws InvalidArgument unless every sequence has the same length >= 1.
    void validate() const;
};

BehaviorSample make_sample(const ReferenceBehavior& reference, std::vector<double> weights);

enum class BehaviorMetric { BehaviorDistance, WeightedBehaviorDistance, WeightedCrossEntropy };

std::string_view to_string(BehaviorMetric metric);

/// Mean over rows of the L1 difference between two row-major probability
/// matrices with `n_actions` columns.
double behavior_distance(std::span<const double> p, std::span<const double> q,
                         std::size_t n_actions);
double behavior_distance(const Phenotype& a, const Phenotype& b, const StateBatch& states);

inline double positive_advantage(double w) { return w >= 0.0 ? w : 0.0; }

/// `policy` holds the candidate's probabilities on sample.states (row-major).
double weighted_behavior_distance(std::span<const double> policy, const BehaviorSample& sample);
double weighted_behavior_distance(const Phenotype& policy, const BehaviorSample& sample);

double weighted_cross_entropy(std::span<const double> policy, const BehaviorSample& sample);
double weighted_cross_entropy(const Phenotype& policy, const BehaviorSample& sample);

/// Sum of the chosen metric against every reference. All reference states are
/// evaluated in one batched forward pass.
class BehaviorLoss {
public:
    BehaviorLoss(BehaviorMetric metric, std::vector<BehaviorSample> references);

    BehaviorMetric metric() const noexcept { return metric_; }
    std::span<const BehaviorSample> references() const noexcept { return references_; }

    double operator()(const Phenotype& policy) const;
    double operator()(const Genome& genome) const;

private:
    double per_reference(std::span<const double> policy, const BehaviorSample& sample) const;

    BehaviorMetric metric_;
    std::vector<BehaviorSample> references_;
    StateBatch all_states_;
    std::vector<std::size_t> offsets_;
};

} // namespace bnet
