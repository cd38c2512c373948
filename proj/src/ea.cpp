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

#include "bnet/ea.hpp"

#include <algorithm>
#include <cmath>

#include "bnet/error.hpp"

namespace bnet {

namespace {

constexpr int kInitAttempts = 100;

void sort_population(std::vector<EaIndividual>& pop) {
    std::stable_sort(pop.begin(), pop.end(),
                     [](const EaIndividual& a, const EaIndividual& b) { return a.loss < b.loss; });
}

} // namespace

void EaConfig::validate() const {
    if (mu == 0) throw InvalidArgument("ea: mu must be at least 1");
    if (lambda == 0) throw InvalidArgument("ea: lambda must be at least 1");
    if (iterations == 0) throw InvalidArgument("ea: iterations must be at least 1");
    if (!(mutation_rate > 0.0 && mutation_rate <= 1.0))
        throw InvalidArgument("ea: mutation rate must be in (0, 1]");
}

StagnationSchedule::StagnationSchedule(double base_rate, std::size_t patience, double cap)
    : base_(base_rate), patience_(patience), cap_(std::min(cap, 1.0)) {
    if (!(base_rate > 0.0 && base_rate <= 1.0)) throw InvalidArgument("schedule: base rate out of (0, 1]");
    if (patience == 0) throw InvalidArgument("schedule: patience must be positive");
    if (!(cap_ >= base_rate)) throw InvalidArgument("schedule: cap below base rate");
}

double StagnationSchedule::update(double rate, const EaProgress& progress) {
    if (progress.improved) {
        flat_ = 0;
        return base_;
    }
    if (++flat_ < patience_) return rate;
    flat_ = 0;
    return std::min(rate * 2.0, cap_);
}

EaResult run_ea(const EaConfig& ea, std::shared_ptr<const CgpConfig> config,
                const LossFunction& loss, Rng& rng, MutationSchedule* schedule) {
    ea.validate();
    if (!config) throw InvalidArgument("ea: missing genome configuration");
    EaResult result;

    std::vector<EaIndividual> pop;
    pop.reserve(ea.mu + ea.lambda + ea.seeds.size());
    for (const auto& seed : ea.seeds) {
        double l = loss(seed);
        if (std::isfinite(l)) pop.push_back({seed, l});
        else ++result.discarded;
    }
    while (pop.size() < ea.mu) {
        bool placed = false;
        for (int attempt = 0; attempt < kInitAttempts && !placed; ++attempt) {
            Genome g = random_genome(config, rng);
            double l = loss(g);
            if (std::isfinite(l)) {
                pop.push_back({std::move(g), l});
                placed = true;
            } else {
                ++result.discarded;
            }
        }
        if (!placed) throw NumericError("ea: could not initialise a genome with a finite loss");
    }
    sort_population(pop);
    if (pop.size() > ea.mu) pop.erase(pop.begin() + static_cast<std::ptrdiff_t>(ea.mu), pop.end());
    result.loss_trace.push_back(pop.front().loss);

    double rate = ea.mutation_rate;
    MutationSchedule constant;
    MutationSchedule& sched = schedule ? *schedule : constant;
    for (std::size_t it = 0; it < ea.iterations; ++it) {
        const double before = pop.front().loss;
        const std::size_t parents = pop.size();
        for (std::size_t i = 0; i < ea.lambda; ++i) {
            Genome child = mutate(pop[i % parents].genome, rate, rng);
            double l = loss(child);
            if (std::isfinite(l)) pop.push_back({std::move(child), l});
            else ++result.discarded;
        }
        sort_population(pop);
        if (pop.size() > ea.mu) pop.erase(pop.begin() + static_cast<std::ptrdiff_t>(ea.mu), pop.end());
        result.loss_trace.push_back(pop.front().loss);
        rate = sched.update(rate, {it, pop.front().loss, pop.front().loss < before});
        rate = std::clamp(rate, 1e-12, 1.0);
    }
    result.final_mutation_rate = rate;
    result.population = std::move(pop);
    return result;
}

} // namespace bnet
