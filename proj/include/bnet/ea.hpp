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

// (mu + lambda) evolution strategy over CGP genomes that minimises an
// arbitrary loss. Used for the behavior searches, the surrogate search and
// offline initialisation; it never touches an environment.

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "bnet/cgp.hpp"
#include "bnet/random.hpp"

namespace bnet {

struct EaConfig {
    std::size_t mu = 20;
    std::size_t lambda = 2;
    std::size_t iterations = 1000;
    double mutation_rate = 0.05;
    /// Pre-defined candidates placed in the initial population before the
    /// random fill.
    std::vector<Genome> seeds;

    void validate() const;
};

struct EaIndividual {
    Genome genome;
    double loss;
};

struct EaResult {
    /// Final parents, sorted by ascending loss.
    std::vector<EaIndividual> population;
    /// Best loss after initialisation (index 0) and after each iteration.
    std::vector<double> loss_trace;
    /// Offspring dropped because their loss was not finite.
    std::size_t discarded = 0;
    double final_mutation_rate = 0.0;

    const EaIndividual& best() const { return population.front(); }
};

struct EaProgress {
    std::size_t iteration = 0;
    double best_loss = 0.0;
    bool improved = false;
};

/// Mutation-rate hook, called once after every iteration. The default keeps
/// the rate constant.
class MutationSchedule {
public:
    virtual ~MutationSchedule() = default;
    virtual double update(double rate, const EaProgress& progress) { (void)progress; return rate; }
};

/// Doubles the rate after `patience` iterations without improvement, up to
/// `cap`; an improvement restores the base rate.
class StagnationSchedule final : public MutationSchedule {
public:
    StagnationSchedule(double base_rate, std::size_t patience, double cap = 1.0);
    double update(double rate, const EaProgress& progress) override;

private:
    double base_;
    std::size_t patience_;
    double cap_;
    std::size_t flat_ = 0;
};

using LossFunction = std::function<double(const Genome&)>;

/// Runs the search. `config` describes the genomes created for the random fill.
/// Offspring i of an iteration mutates parent (i mod mu); survivors are the
/// mu lowest losses of parents and offspring, parents winning ties.
EaResult run_ea(const EaConfig& ea, std::shared_ptr<const CgpConfig> config,
                const LossFunction& loss, Rng& rng, MutationSchedule* schedule = nullptr);

} // namespace bnet
