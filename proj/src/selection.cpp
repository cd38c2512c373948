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

#include "bnet/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bnet/error.hpp"

namespace bnet {

double FitnessRecord::mean() const {
    if (samples.empty()) throw InvalidArgument("fitness record: no samples");
    return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double FitnessRecord::first() const {
    if (samples.empty()) throw InvalidArgument("fitness record: no samples");
    return samples.front();
}

void FitnessRecord::add(double fitness) {
    if (!std::isfinite(fitness)) throw InvalidArgument("fitness record: non-finite fitness");
    samples.push_back(fitness);
}

std::vector<std::size_t> find_challengers(std::span<const FitnessRecord> candidates,
                                          const FitnessRecord& champion) {
    const double bar = champion.mean();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i].first() > bar) out.push_back(i);
    std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].first() > candidates[b].first();
    });
    return out;
}

DuelOutcome duel(FitnessRecord& champion, FitnessRecord& challenger, std::size_t r,
                 const FitnessEvaluator& evaluate) {
    if (r == 0) throw InvalidArgument("duel: repeat count must be at least 1");
    if (champion.samples.empty() || challenger.samples.empty())
        throw InvalidArgument("duel: both candidates need a first evaluation");
    DuelOutcome out;
    while (champion.n() < r) {
        champion.add(evaluate(champion.id));
        ++out.champion_evaluations;
    }
    const std::size_t target = std::max(champion.n(), r);
    while (challenger.n() < target) {
        challenger.add(evaluate(challenger.id));
        ++out.challenger_evaluations;
    }
    out.promoted = challenger.mean() > champion.mean();
    return out;
}

long challenge(FitnessRecord& champion, std::span<FitnessRecord> candidates, std::size_t r,
               const FitnessEvaluator& evaluate,
               const std::function<void(const DuelEvent&)>& on_duel) {
    long winner = -1;
    const auto order = find_challengers(candidates, champion);
    for (std::size_t idx : order) {
        FitnessRecord& current = winner < 0 ? champion : candidates[static_cast<std::size_t>(winner)];
        if (!(candidates[idx].first() > current.mean())) continue;
        const DuelOutcome o = duel(current, candidates[idx], r, evaluate);
        if (on_duel) on_duel({idx, candidates[idx].mean(), current.mean(), o.promoted});
        if (o.promoted) winner = static_cast<long>(idx);
    }
    return winner;
}

} // namespace bnet
