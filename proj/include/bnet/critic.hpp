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

// State-value critic V(s): a fully connected tanh network with a linear
// output, trained by minibatch gradient descent on Monte-Carlo returns.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bnet/random.hpp"
#include "bnet/trajectory.hpp"

namespace bnet {

struct CriticTrainConfig {
    std::size_t steps = 1000;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class ValueNet {
public:
    struct Layer {
        Eigen::MatrixXd weights;  // out x in
        Eigen::VectorXd bias;
    };

    /// Zero-initialised network input_dim -> hidden... -> 1.
    explicit ValueNet(std::size_t input_dim, std::vector<std::size_t> hidden = {128, 64});

    /// Uniform fan-in initialisation: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    static ValueNet random(std::size_t input_dim, std::vector<std::size_t> hidden, Rng& rng);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t parameter_count() const;
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<Layer>& layers() noexcept { return layers_; }

    double value(std::span<const double> state) const;
    /// Values of the columns of `states` (input_dim x n).
    Eigen::RowVectorXd values(const Eigen::MatrixXd& states) const;

    /// Parameters flattened layer by layer (weights column-major, then bias).
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);

    /// dV(state)/d(parameters), in the order of parameters().
    Eigen::VectorXd gradient(std::span<const double> state) const;

    /// Mean squared error against `targets` and its gradient, by backprop.
    double loss_and_gradient(const Eigen::MatrixXd& states, const Eigen::RowVectorXd& targets,
                             std::vector<Layer>& grads) const;

private:
    std::size_t input_dim_;
    std::vector<Layer> layers_;
};

/// Runs cfg.steps Adam minibatch steps on the pool and returns the final MSE
/// over the whole pool. Throws on an empty pool or a non-finite loss.
double fit(ValueNet& net, const ExperiencePool& pool, const CriticTrainConfig& cfg, Rng& rng);

/// Mean squared error of the network over every pool entry.
double pool_mse(const ValueNet& net, const ExperiencePool& pool);

/// A_t = R_t - V(s_t). Requires trajectory.returns.
std::vector<double> advantage(const ValueNet& net, const Trajectory& trajectory);

} // namespace bnet
