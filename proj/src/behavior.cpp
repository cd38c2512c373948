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

#include "bnet/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bnet/error.hpp"

namespace bnet {

namespace {

constexpr double kProbabilityFloor = 1e-12;

double row_l1(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

void check_policy(std::span<const double> policy, const BehaviorSample& sample) {
    if (policy.size() != sample.size() * sample.n_actions)
        throw InvalidArgument("behavior: policy output does not match the sample (" +
                              std::to_string(policy.size()) + " values for " +
                              std::to_string(sample.size()) + " states)");
}

} // namespace

void BehaviorSample::validate() const {
    const std::size_t t = states.size();
    if (t == 0) throw InvalidArgument("behavior sample: no states");
    if (n_actions == 0) throw InvalidArgument("behavior sample: no actions");
    if (actions.size() != t || weights.size() != t ||
        reference_probabilities.size() != t * n_actions)
        throw InvalidArgument("behavior sample: sequence lengths differ");
    for (std::size_t a : actions)
        if (a >= n_actions) throw InvalidArgument("behavior sample: action out of range");
    for (double w : weights)
        if (!std::isfinite(w)) throw InvalidArgument("behavior sample: non-finite weight");
}

BehaviorSample make_sample(const ReferenceBehavior& reference, std::vector<double> weights) {
    BehaviorSample s{reference.states, reference.actions, reference.adapted_probabilities,
                     std::move(weights), reference.n_actions};
    s.validate();
    return s;
}

std::string_view to_string(BehaviorMetric metric) {
    switch (metric) {
    case BehaviorMetric::BehaviorDistance: return "behavior_distance";
    case BehaviorMetric::WeightedBehaviorDistance: return "weighted_behavior_distance";
    case BehaviorMetric::WeightedCrossEntropy: return "weighted_cross_entropy";
    }
    return "unknown";
}

double behavior_distance(std::span<const double> p, std::span<const double> q,
                         std::size_t n_actions) {
    if (n_actions == 0 || p.size() != q.size() || p.size() % n_actions != 0)
        throw InvalidArgument("behavior distance: output shapes differ");
    const std::size_t t = p.size() / n_actions;
    if (t == 0) throw InvalidArgument("behavior distance: empty state set");
    double sum = 0.0;
    for (std::size_t k = 0; k < t; ++k)
        sum += row_l1(p.data() + k * n_actions, q.data() + k * n_actions, n_actions);
    return sum / static_cast<double>(t);
}

double behavior_distance(const Phenotype& a, const Phenotype& b, const StateBatch& states) {
    if (states.empty()) throw InvalidArgument("behavior distance: empty state set");
    if (a.n_outputs() != b.n_outputs())
        throw InvalidArgument("behavior distance: policies have different output sizes");
    return behavior_distance(a.forward_batch(states), b.forward_batch(states), a.n_outputs());
}

double weighted_behavior_distance(std::span<const double> policy, const BehaviorSample& sample) {
    check_policy(policy, sample);
    const std::size_t n = sample.n_actions;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        num += row_l1(policy.data() + k * n, sample.reference_probabilities.data() + k * n, n) *
               sample.weights[k];
        den += std::abs(sample.weights[k]);
    }
    // The 1/T* factors of numerator and denominator cancel.
    if (den == 0.0) return behavior_distance(policy, sample.reference_probabilities, n);
    return num / den;
}

double weighted_behavior_distance(const Phenotype& policy, const BehaviorSample& sample) {
    return weighted_behavior_distance(policy.forward_batch(sample.states), sample);
}

double weighted_cross_entropy(std::span<const double> policy, const BehaviorSample& sample) {
    check_policy(policy, sample);
    const std::size_t n = sample.n_actions;
    double sum = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double w = positive_advantage(sample.weights[k]);
        if (w == 0.0) continue;
        double h = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sample.reference_probabilities[k * n + i];
            if (p != 0.0) h -= p * std::log(std::max(policy[k * n + i], kProbabilityFloor));
        }
        sum += h * w;
    }
    return sum / static_cast<double>(sample.size());
}

double weighted_cross_entropy(const Phenotype& policy, const BehaviorSample& sample) {
    return weighted_cross_entropy(policy.forward_batch(sample.states), sample);
}

BehaviorLoss::BehaviorLoss(BehaviorMetric metric, std::vector<BehaviorSample> references)
    : metric_(metric), references_(std::move(references)) {
    if (references_.empty()) throw InvalidArgument("behavior loss: no references");
    const std::size_t dim = references_.front().states.dim();
    const std::size_t n_actions = references_.front().n_actions;
    all_states_ = StateBatch(dim);
    for (const auto& r : references_) {
        r.validate();
        if (r.states.dim() != dim || r.n_actions != n_actions)
            throw InvalidArgument("behavior loss: references have different shapes");
        offsets_.push_back(all_states_.size());
        all_states_.append(r.states);
    }
}

double BehaviorLoss::per_reference(std::span<const double> policy,
                                   const BehaviorSample& sample) const {
    switch (metric_) {
    case BehaviorMetric::BehaviorDistance:
        return behavior_distance(policy, sample.reference_probabilities, sample.n_actions);
    case BehaviorMetric::WeightedBehaviorDistance:
        return weighted_behavior_distance(policy, sample);
    case BehaviorMetric::WeightedCrossEntropy:
        return weighted_cross_entropy(policy, sample);
    }
    throw InvalidArgument("behavior loss: unknown metric");
}

double BehaviorLoss::operator()(const Phenotype& policy) const {
    const std::size_t n = references_.front().n_actions;
    if (policy.n_outputs() != n || policy.n_inputs() != all_states_.dim())
        throw InvalidArgument("behavior loss: policy shape does not match the references");
    thread_local std::vector<double> probs;
    probs.resize(all_states_.size() * n);
    policy.forward_batch(all_states_, probs);
    double total = 0.0;
    for (std::size_t m = 0; m < references_.size(); ++m) {
        const auto& r = references_[m];
        total += per_reference(std::span<const double>(probs).subspan(offsets_[m] * n, r.size() * n), r);
    }
    return total;
}

double BehaviorLoss::operator()(const Genome& genome) const { return (*this)(decode(genome)); }

} // namespace bnet
