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

#include "bnet/critic.hpp"

#include <cmath>
#include <string>

#include "bnet/error.hpp"

namespace bnet {

namespace {

Eigen::MatrixXd state_column(std::span<const double> state) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(state.size()), 1);
    for (std::size_t j = 0; j < state.size(); ++j) x(static_cast<Eigen::Index>(j), 0) = state[j];
    return x;
}

} // namespace

ValueNet::ValueNet(std::size_t input_dim, std::vector<std::size_t> hidden)
    : input_dim_(input_dim) {
    if (input_dim == 0) throw InvalidArgument("value net: input dimension must be positive");
    std::size_t in = input_dim;
    hidden.push_back(1);
    for (std::size_t out : hidden) {
        if (out == 0) throw InvalidArgument("value net: empty layer");
        layers_.push_back({Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out),
                                                 static_cast<Eigen::Index>(in)),
                           Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out))});
        in = out;
    }
}

ValueNet ValueNet::random(std::size_t input_dim, std::vector<std::size_t> hidden, Rng& rng) {
    ValueNet net(input_dim, std::move(hidden));
    for (auto& layer : net.layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols()));
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
            for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
                layer.weights(r, c) = uniform(rng, -bound, bound);
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = uniform(rng, -bound, bound);
    }
    return net;
}

std::size_t ValueNet::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

Eigen::RowVectorXd ValueNet::values(const Eigen::MatrixXd& states) const {
    if (static_cast<std::size_t>(states.rows()) != input_dim_)
        throw InvalidArgument("value net: state dimension mismatch");
    Eigen::MatrixXd h = states;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Eigen::MatrixXd z = (layers_[i].weights * h).colwise() + layers_[i].bias;
        h = (i + 1 < layers_.size()) ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
    return h.row(0);
}

double ValueNet::value(std::span<const double> state) const {
    if (state.size() != input_dim_)
        throw InvalidArgument("value net: state has dimension " + std::to_string(state.size()) +
                              ", expected " + std::to_string(input_dim_));
    return values(state_column(state))(0);
}

Eigen::VectorXd ValueNet::parameters() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (const auto& l : layers_) {
        flat.segment(k, l.weights.size()) = l.weights.reshaped();
        k += l.weights.size();
        flat.segment(k, l.bias.size()) = l.bias;
        k += l.bias.size();
    }
    return flat;
}

void ValueNet::set_parameters(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count())
        throw InvalidArgument("value net: parameter vector has wrong size");
    Eigen::Index k = 0;
    for (auto& l : layers_) {
        l.weights.reshaped() = flat.segment(k, l.weights.size());
        k += l.weights.size();
        l.bias = flat.segment(k, l.bias.size());
        k += l.bias.size();
    }
}

double ValueNet::loss_and_gradient(const Eigen::MatrixXd& states,
                                   const Eigen::RowVectorXd& targets,
                                   std::vector<Layer>& grads) const {
    const auto n = static_cast<double>(states.cols());
    std::vector<Eigen::MatrixXd> acts;  // acts[i] = input of layer i
    acts.reserve(layers_.size() + 1);
    acts.push_back(states);
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Eigen::MatrixXd z = (layers_[i].weights * acts.back()).colwise() + layers_[i].bias;
        acts.push_back(i + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : z);
    }
    const Eigen::RowVectorXd err = acts.back().row(0) - targets;
    const double loss = err.squaredNorm() / n;

    grads.resize(layers_.size());
    Eigen::MatrixXd delta = (2.0 / n) * err;  // dL/dz of the output layer
    for (std::size_t i = layers_.size(); i-- > 0;) {
        grads[i].weights = delta * acts[i].transpose();
        grads[i].bias = delta.rowwise().sum();
        if (i > 0) {
            Eigen::MatrixXd back = layers_[i].weights.transpose() * delta;
            delta = back.array() * (1.0 - acts[i].array().square());
        }
    }
    return loss;
}

Eigen::VectorXd ValueNet::gradient(std::span<const double> state) const {
    if (state.size() != input_dim_) throw InvalidArgument("value net: state dimension mismatch");
    // Backprop with a unit delta at the output.
    std::vector<Eigen::MatrixXd> acts;
    acts.push_back(state_column(state));
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Eigen::MatrixXd z = (layers_[i].weights * acts.back()).colwise() + layers_[i].bias;
        acts.push_back(i + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : z);
    }
    std::vector<Layer> grads(layers_.size());
    Eigen::MatrixXd delta = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t i = layers_.size(); i-- > 0;) {
        grads[i].weights = delta * acts[i].transpose();
        grads[i].bias = delta.rowwise().sum();
        if (i > 0) {
            Eigen::MatrixXd back = layers_[i].weights.transpose() * delta;
            delta = back.array() * (1.0 - acts[i].array().square());
        }
    }
    Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (const auto& g : grads) {
        flat.segment(k, g.weights.size()) = g.weights.reshaped();
        k += g.weights.size();
        flat.segment(k, g.bias.size()) = g.bias;
        k += g.bias.size();
    }
    return flat;
}

double pool_mse(const ValueNet& net, const ExperiencePool& pool) {
    if (pool.empty()) throw InvalidArgument("critic: empty experience pool");
    constexpr std::size_t kChunk = 4096;
    const auto dim = static_cast<Eigen::Index>(net.input_dim());
    double sum = 0.0;
    for (std::size_t start = 0; start < pool.size(); start += kChunk) {
        const std::size_t len = std::min(kChunk, pool.size() - start);
        Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(len));
        Eigen::RowVectorXd y(static_cast<Eigen::Index>(len));
        for (std::size_t k = 0; k < len; ++k) {
            const auto& e = pool[start + k];
            for (Eigen::Index j = 0; j < dim; ++j)
                x(j, static_cast<Eigen::Index>(k)) = e.state[static_cast<std::size_t>(j)];
            y(static_cast<Eigen::Index>(k)) = e.ret;
        }
        sum += (net.values(x) - y).squaredNorm();
    }
    return sum / static_cast<double>(pool.size());
}

double fit(ValueNet& net, const ExperiencePool& pool, const CriticTrainConfig& cfg, Rng& rng) {
    if (pool.empty()) throw InvalidArgument("critic: empty experience pool");
    if (cfg.batch_size == 0) throw InvalidArgument("critic: batch size must be positive");
    for (const auto& e : pool.entries())
        if (e.state.size() != net.input_dim())
            throw InvalidArgument("critic: pool state dimension mismatch");

    auto& layers = net.layers();
    std::vector<ValueNet::Layer> m(layers.size()), v(layers.size()), grads;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        m[i] = {Eigen::MatrixXd::Zero(layers[i].weights.rows(), layers[i].weights.cols()),
                Eigen::VectorXd::Zero(layers[i].bias.size())};
        v[i] = m[i];
    }

    const auto dim = static_cast<Eigen::Index>(net.input_dim());
    const auto batch = static_cast<Eigen::Index>(cfg.batch_size);
    Eigen::MatrixXd x(dim, batch);
    Eigen::RowVectorXd y(batch);
    double b1t = 1.0, b2t = 1.0;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        for (Eigen::Index k = 0; k < batch; ++k) {
            const auto& e = pool[uniform_index(rng, pool.size())];
            for (Eigen::Index j = 0; j < dim; ++j) x(j, k) = e.state[static_cast<std::size_t>(j)];
            y(k) = e.ret;
        }
        const double loss = net.loss_and_gradient(x, y, grads);
        if (!std::isfinite(loss))
            throw NumericError("critic: non-finite loss at step " + std::to_string(step));
        b1t *= cfg.beta1;
        b2t *= cfg.beta2;
        const double lr = cfg.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
        for (std::size_t i = 0; i < layers.size(); ++i) {
            m[i].weights = cfg.beta1 * m[i].weights + (1.0 - cfg.beta1) * grads[i].weights;
            v[i].weights = cfg.beta2 * v[i].weights +
                           (1.0 - cfg.beta2) * grads[i].weights.array().square().matrix();
            layers[i].weights.array() -=
                lr * m[i].weights.array() / (v[i].weights.array().sqrt() + cfg.epsilon);
            m[i].bias = cfg.beta1 * m[i].bias + (1.0 - cfg.beta1) * grads[i].bias;
            v[i].bias = cfg.beta2 * v[i].bias +
                        (1.0 - cfg.beta2) * grads[i].bias.array().square().matrix();
            layers[i].bias.array() -=
                lr * m[i].bias.array() / (v[i].bias.array().sqrt() + cfg.epsilon);
        }
    }
    const double mse = pool_mse(net, pool);
    if (!std::isfinite(mse)) throw NumericError("critic: non-finite pool loss after training");
    return mse;
}

std::vector<double> advantage(const ValueNet& net, const Trajectory& trajectory) {
    if (trajectory.returns.size() != trajectory.size())
        throw InvalidArgument("advantage: trajectory returns not computed");
    std::vector<double> adv(trajectory.size());
    if (trajectory.empty()) return adv;
    const auto dim = static_cast<Eigen::Index>(net.input_dim());
    Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(trajectory.size()));
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        const auto& s = trajectory.transitions[t].state;
        if (s.size() != net.input_dim()) throw InvalidArgument("advantage: state dimension mismatch");
        for (Eigen::Index j = 0; j < dim; ++j)
            x(j, static_cast<Eigen::Index>(t)) = s[static_cast<std::size_t>(j)];
    }
    const Eigen::RowVectorXd values = net.values(x);
    for (std::size_t t = 0; t < trajectory.size(); ++t)
        adv[t] = trajectory.returns[t] - values(static_cast<Eigen::Index>(t));
    return adv;
}

} // namespace bnet
