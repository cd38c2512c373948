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


#include <cmath>

#include <doctest.h>

#include "bnet/behavior.hpp"
#include "bnet/env.hpp"
#include "bnet/error.hpp"

using namespace bnet;

namespace {

// A random row-stochastic T x n matrix: a policy restricted to T states.
std::vector<double> random_policy(std::size_t t, std::size_t n, Rng& rng) {
    std::vector<double> p(t * n);
    for (std::size_t k = 0; k < t; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += p[k * n + i] = -std::log(1.0 - uniform01(rng));
        for (std::size_t i = 0; i < n; ++i) p[k * n + i] /= sum;
    }
    return p;
}

std::vector<double> repeat_row(std::vector<double> row, std::size_t t) {
    std::vector<double> out;
    for (std::size_t k = 0; k < t; ++k) out.insert(out.end(), row.begin(), row.end());
    return out;
}

BehaviorSample make_random_sample(std::size_t t, std::size_t dim, std::size_t n, Rng& rng) {
    BehaviorSample s;
    s.states = StateBatch(dim);
    s.n_actions = n;
    for (std::size_t k = 0; k < t; ++k) {
        std::vector<double> x(dim);
        for (auto& v : x) v = uniform(rng, -2, 2);
        s.states.push_back(x);
        const std::size_t a = uniform_index(rng, n);
        s.actions.push_back(a);
        for (std::size_t i = 0; i < n; ++i) s.reference_probabilities.push_back(i == a ? 1.0 : 0.0);
        s.weights.push_back(uniform(rng, -1.0, 2.0));
    }
    return s;
}

BehaviorSample sample_from_rows(const std::vector<double>& reference, std::vector<double> weights,
                                std::size_t n) {
    BehaviorSample s;
    s.n_actions = n;
    s.states = StateBatch(1);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        s.states.push_back(std::vector<double>{static_cast<double>(k)});
        std::size_t a = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (reference[k * n + i] > reference[k * n + a]) a = i;
        s.actions.push_back(a);
    }
    s.reference_probabilities = reference;
    s.weights = std::move(weights);
    return s;
}

} // namespace

TEST_CASE("behavior distance examples") {
    Rng rng(1);
    const auto p = random_policy(7, 3, rng);
    CHECK(behavior_distance(p, p, 3) == 0.0);
    CHECK(behavior_distance(repeat_row({1, 0}, 5), repeat_row({0, 1}, 5), 2) == 2.0);
    CHECK(behavior_distance(repeat_row({0.8, 0.2}, 4), repeat_row({0.6, 0.4}, 4), 2) ==
          doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(behavior_distance(std::vector<double>{}, std::vector<double>{}, 2), InvalidArgument);
    CHECK_THROWS_AS(behavior_distance(p, random_policy(6, 3, rng), 3), InvalidArgument);
}

TEST_CASE("behavior distance is a pseudometric") {
    Rng rng(2);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t t = 1 + uniform_index(rng, 20), n = 2 + uniform_index(rng, 4);
        const auto a = random_policy(t, n, rng), b = random_policy(t, n, rng), c = random_policy(t, n, rng);
        const double ab = behavior_distance(a, b, n), ba = behavior_distance(b, a, n);
        const double bc = behavior_distance(b, c, n), ac = behavior_distance(a, c, n);
        REQUIRE(ab >= 0.0);
        REQUIRE(ab == ba);
        REQUIRE(ac <= ab + bc + 1e-12);
        REQUIRE(behavior_distance(a, a, n) == 0.0);
    }
}

TEST_CASE("weighted behavior distance") {
    SUBCASE("arithmetic example") {
        // Per-step L1 distances 0.4 and 0 with weights (1, -1): 0.4 / 2.
        const auto s = sample_from_rows({1.0, 0.0, 0.0, 1.0}, {1.0, -1.0}, 2);
        CHECK(weighted_behavior_distance(std::vector<double>{0.8, 0.2, 0.0, 1.0}, s) ==
              doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("constant weights reduce to the plain distance; zero weights fall back") {
        Rng rng(3);
        for (int k = 0; k < 200; ++k) {
            const auto ref = random_policy(9, 3, rng), pol = random_policy(9, 3, rng);
            const double plain = behavior_distance(pol, ref, 3);
            const double c = uniform(rng, 0.01, 10.0);
            CHECK(std::abs(weighted_behavior_distance(pol, sample_from_rows(ref, std::vector<double>(9, c), 3)) - plain) <= 1e-12);
            CHECK(weighted_behavior_distance(pol, sample_from_rows(ref, std::vector<double>(9, 0.0), 3)) == plain);
        }
    }
    SUBCASE("invariant to positive rescaling") {
        Rng rng(4);
        for (int k = 0; k < 200; ++k) {
            const auto ref = random_policy(12, 4, rng), pol = random_policy(12, 4, rng);
            std::vector<double> w(12);
            for (auto& x : w) x = uniform(rng, -3.0, 3.0);
            const double base = weighted_behavior_distance(pol, sample_from_rows(ref, w, 4));
            const double c = std::exp(uniform(rng, -5.0, 5.0));
            for (auto& x : w) x *= c;
            CHECK(std::abs(weighted_behavior_distance(pol, sample_from_rows(ref, w, 4)) - base) <= 1e-12);
        }
    }
}

TEST_CASE("positive advantage") {
    CHECK(positive_advantage(3.0) == 3.0);
    CHECK(positive_advantage(-2.0) == 0.0);
    CHECK(positive_advantage(0.0) == 0.0);
    // Clipping table over a grid of signs and magnitudes.
    for (double w : {-1e300, -5.0, -1e-300, 0.0, 1e-300, 0.5, 7.0, 1e300})
        CHECK(positive_advantage(w) == (w > 0.0 ? w : 0.0));
}

TEST_CASE("weighted cross entropy") {
    SUBCASE("examples") {
        const auto ref = repeat_row({1.0, 0.0}, 1);
        CHECK(weighted_cross_entropy(std::vector<double>{0.9, 0.1}, sample_from_rows(ref, {2.0}, 2)) ==
              doctest::Approx(-std::log(0.9) * 2.0).epsilon(1e-14));
        CHECK(weighted_cross_entropy(std::vector<double>{0.9, 0.1}, sample_from_rows(ref, {-1.0}, 2)) == 0.0);
        CHECK(weighted_cross_entropy(std::vector<double>{1.0, 0.0}, sample_from_rows(ref, {3.0}, 2)) == 0.0);
        // Zero probability is floored, so the loss stays finite.
        const double floored = weighted_cross_entropy(std::vector<double>{0.0, 1.0}, sample_from_rows(ref, {1.0}, 2));
        CHECK(floored == doctest::Approx(-std::log(1e-12)));
    }
    SUBCASE("non-negative and monotone along a mixing path") {
        Rng rng(5);
        const std::size_t t = 15, n = 3;
        BehaviorSample s = make_random_sample(t, 2, n, rng);
        double last = 1e300;
        for (int step = 0; step <= 50; ++step) {
            const double lambda = step / 50.0;
            std::vector<double> pol(t * n);
            for (std::size_t k = 0; k < t; ++k)
                for (std::size_t i = 0; i < n; ++i)
                    pol[k * n + i] = (1 - lambda) / n + lambda * s.reference_probabilities[k * n + i];
            const double ce = weighted_cross_entropy(pol, s);
            CHECK(ce >= 0.0);
            CHECK(ce < last);
            last = ce;
        }
    }
}

TEST_CASE("loss sums over references") {
    Rng rng(6);
    auto cfg = std::make_shared<CgpConfig>();
    cfg->n_inputs = 3;
    cfg->n_outputs = 4;
    for (int trial = 0; trial < 20; ++trial) {
        const Phenotype pol = decode(random_genome(cfg, rng));
        std::vector<BehaviorSample> refs;
        for (int m = 0; m < 3; ++m) refs.push_back(make_random_sample(5 + uniform_index(rng, 10), 3, 4, rng));

        for (auto metric : {BehaviorMetric::BehaviorDistance, BehaviorMetric::WeightedBehaviorDistance,
                            BehaviorMetric::WeightedCrossEntropy}) {
            // Naive double loop: per reference, per state, single forward passes.
            double naive = 0.0;
            for (const auto& r : refs) {
                double num = 0.0, den = 0.0, plain = 0.0, ce = 0.0;
                for (std::size_t k = 0; k < r.size(); ++k) {
                    const auto d = pol.forward(r.states.row(k));
                    double l1 = 0.0;
                    for (std::size_t i = 0; i < 4; ++i) l1 += std::abs(d[i] - r.reference_probabilities[k * 4 + i]);
                    plain += l1;
                    num += l1 * r.weights[k];
                    den += std::abs(r.weights[k]);
                    ce += -std::log(std::max(d[r.actions[k]], 1e-12)) * std::max(r.weights[k], 0.0);
                }
                const double t = static_cast<double>(r.size());
                if (metric == BehaviorMetric::BehaviorDistance) naive += plain / t;
                else if (metric == BehaviorMetric::WeightedBehaviorDistance) naive += den > 0 ? num / den : plain / t;
                else naive += ce / t;
            }
            const BehaviorLoss loss(metric, refs);
            CHECK(std::abs(loss(pol) - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
        }

        const BehaviorLoss one(BehaviorMetric::WeightedBehaviorDistance, {refs[0]});
        const BehaviorLoss three(BehaviorMetric::WeightedBehaviorDistance, {refs[0], refs[0], refs[0]});
        CHECK(std::abs(three(pol) - 3.0 * one(pol)) <= 1e-12);
    }
    CHECK_THROWS_AS(BehaviorLoss(BehaviorMetric::BehaviorDistance, {}), InvalidArgument);
}

TEST_CASE("a policy imitating itself has zero loss and beats random policies") {
    Rng rng(7);
    auto cfg = std::make_shared<CgpConfig>();
    cfg->n_inputs = 4;
    cfg->n_outputs = 2;
    const Genome g = random_genome(cfg, rng);
    const Phenotype p = decode(g);

    // Reference with the policy's own soft outputs: distance zero.
    CartPole env;
    const Trajectory t = run_episode(env, p, EvalMode::Deterministic, 0.0, rng);
    BehaviorSample own;
    own.states = t.states();
    own.n_actions = 2;
    for (const auto& tr : t.transitions) {
        own.actions.push_back(tr.action);
        own.reference_probabilities.insert(own.reference_probabilities.end(), tr.probabilities.probabilities.begin(),
                                           tr.probabilities.probabilities.end());
        own.weights.push_back(1.0);
    }
    const BehaviorLoss loss(BehaviorMetric::BehaviorDistance, {own});
    CHECK(loss(p) == 0.0);
    for (int k = 0; k < 50; ++k) CHECK(loss(p) <= loss(random_genome(cfg, rng)));
}

TEST_CASE("sample validation") {
    Rng rng(8);
    BehaviorSample s = make_random_sample(4, 2, 3, rng);
    CHECK_NOTHROW(s.validate());
    s.weights.pop_back();
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    BehaviorSample bad = make_random_sample(4, 2, 3, rng);
    bad.actions[0] = 3;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
