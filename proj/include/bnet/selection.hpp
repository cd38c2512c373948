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

// Robust elitist selection under noisy fitness. A candidate whose single
// evaluation beats the champion's mean challenges it; both are re-evaluated
// and the challenger only takes over with a strictly higher mean.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bnet {

struct FitnessRecord {
    std::uint64_t id = 0;
    std::vector<double> samples;

    std::size_t n() const noexcept { return samples.size(); }
    double mean() const;
    /// The first (single-evaluation) fitness.
    double first() const;
    void add(double fitness);
};

/// Indices of candidates whose first sample is strictly above the champion's
/// mean, ordered by descending first sample (stable for ties).
std::vector<std::size_t> find_challengers(std::span<const FitnessRecord> candidates,
                                          const FitnessRecord& champion);

/// Runs one evaluation episode of the candidate with the given id.
using FitnessEvaluator = std::function<double(std::uint64_t id)>;

struct DuelOutcome {
    bool promoted = false;
    std::size_t champion_evaluations = 0;
    std::size_t challenger_evaluations = 0;
};

/// Tops the champion up to r samples, then the challenger up to
/// max(n_champion, r). Samples are appended to the records.
DuelOutcome duel(FitnessRecord& champion, FitnessRecord& challenger, std::size_t r,
                 const FitnessEvaluator& evaluate);

/// Sequential challenge: each challenger in order is dueled only if its first
/// sample still beats the current champion's mean. Returns the index of the
/// final champion in `candidates`, or -1 if the incumbent `champion` survives.
/// `on_duel` (optional) observes every duel.
struct DuelEvent {
    std::size_t candidate_index;
    double challenger_mean;
    double champion_mean;
    bool promoted;
};

long challenge(FitnessRecord& champion, std::span<FitnessRecord> candidates, std::size_t r,
               const FitnessEvaluator& evaluate,
               const std::function<void(const DuelEvent&)>& on_duel = {});

} // namespace bnet
