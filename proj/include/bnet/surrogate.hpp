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

// Kriging over behavior distances: candidates that acted alike on stored
// states are assumed to score alike. The fitted predicted mean serves as the
// loss of the surrogate search.

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bnet/cgp.hpp"
#include "bnet/ea.hpp"
#include "bnet/state_batch.hpp"

namespace bnet {

struct KrigingBounds {
    double theta_min = 1e-3;
    double theta_max = 1e3;
    double nugget_min = 1e-8;
    double nugget_max = 1e-1;
    std::size_t grid = 32;
    /// Nugget multiplications by 10 tried when the fitted matrix fails to factorise.
    std::size_t max_escalations = 12;
};

class KrigingModel {
public:
    /// Fits to a symmetric distance matrix with zero diagonal and responses y
    /// (at least three). Throws NumericError when no nugget makes the
    /// correlation matrix factorisable.
    static KrigingModel fit(const Eigen::MatrixXd& distances, const Eigen::VectorXd& y,
                            const KrigingBounds& bounds = {});

    /// Concentrated log-likelihood; -infinity when R = K + nugget I does not factorise.
    static double log_likelihood(const Eigen::MatrixXd& distances, const Eigen::VectorXd& y,
                                 double theta, double nugget);

    /// Predicted mean given the distances from a point to every training record.
    double predict(const Eigen::VectorXd& distances) const;
    double kernel(double distance) const { return std::exp(-theta_ * distance); }

    double theta() const noexcept { return theta_; }
    double nugget() const noexcept { return nugget_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    double log_likelihood() const noexcept { return log_likelihood_; }
    /// All responses equal: the model predicts that value everywhere.
    bool constant() const noexcept { return constant_; }
    std::size_t escalations() const noexcept { return escalations_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(alpha_.size()); }

private:
    double theta_ = 1.0;
    double nugget_ = 0.0;
    double mean_ = 0.0;
    double variance_ = 0.0;
    double log_likelihood_ = 0.0;
    bool constant_ = false;
    std::size_t escalations_ = 0;
    Eigen::VectorXd alpha_;  // R^-1 (y - mean)
};

/// A tested candidate: its policy, the states it visited, and its mean fitness.
struct CandidateRecord {
    std::uint64_t id = 0;
    Genome genome;
    Phenotype phenotype;
    StateBatch states;
    std::vector<double> own_outputs;  // phenotype on states, row-major
    double mean_fitness = 0.0;

    CandidateRecord(std::uint64_t id, Genome genome, StateBatch states, double mean_fitness);
};

/// Behavior distance of the two policies on the concatenation of both state sets.
double pairwise_distance(const CandidateRecord& a, const CandidateRecord& b);

/// A fitted model together with the records it was fitted on.
class SurrogateModel {
public:
    SurrogateModel(std::vector<std::shared_ptr<const CandidateRecord>> records, KrigingModel model);

    const KrigingModel& kriging() const noexcept { return model_; }
    std::span<const std::shared_ptr<const CandidateRecord>> records() const noexcept { return records_; }

    /// Predicted mean fitness; the distance to record i uses record i's states.
    double predict_mean(const Phenotype& candidate) const;
    double predict_mean(const Genome& candidate) const { return predict_mean(decode(candidate)); }

private:
    std::vector<std::shared_ptr<const CandidateRecord>> records_;
    KrigingModel model_;
    StateBatch all_states_;
    std::vector<std::size_t> offsets_;
};

/// The most recent evaluated candidates, with a cache of their pairwise distances.
class SurrogateArchive {
public:
    /// states_per_record = 0 keeps every state of the first evaluation;
    /// otherwise that many evenly spaced states are kept.
    explicit SurrogateArchive(std::size_t capacity = 100, std::size_t states_per_record = 0);

    /// Adds a new record, or updates the mean fitness of a known one and marks
    /// it most recent. The states are only used when the record is new.
    void update(std::uint64_t id, const Genome& genome, const StateBatch& states,
                double mean_fitness);

    std::size_t size() const noexcept { return records_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool contains(std::uint64_t id) const;

    /// Requires at least three records.
    SurrogateModel fit(const KrigingBounds& bounds = {});

private:
    double distance(const CandidateRecord& a, const CandidateRecord& b);

    std::size_t capacity_;
    std::size_t states_per_record_;
    std::deque<std::shared_ptr<const CandidateRecord>> records_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> cache_;
};

/// Minimises the negated predicted mean; returns the best genome found.
/// `config` describes the genomes for the random fill.
Genome surrogate_search(const SurrogateModel& model, const EaConfig& ea,
                        std::shared_ptr<const CgpConfig> config, Rng& rng);

} // namespace bnet
