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

// Cartesian Genetic Programming neural networks (CGP-ANN).
//
// A genome is a single row of `n_nodes` nodes. Node i reads `arity` weighted
// values from program inputs or from nodes with a smaller index, so every
// genome is acyclic by construction. Only nodes reachable from the output genes
// are "active"; decode() extracts them into a Phenotype that can be evaluated.
// The readout values are normalised with a softmax to give a distribution over
// discrete actions.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnet/random.hpp"
#include "bnet/state_batch.hpp"

namespace bnet {

enum class NodeFunction : std::uint8_t { Tanh, Sigmoid, Gaussian, Step, Relu };

std::string_view to_string(NodeFunction f);
NodeFunction parse_node_function(std::string_view name);
double apply_node_function(NodeFunction f, double x);

struct CgpConfig {
    std::size_t n_inputs = 0;
    std::size_t n_outputs = 0;
    std::size_t n_nodes = 400;
    std::size_t arity = 10;
    std::size_t max_active = 200;
    std::vector<NodeFunction> function_set{NodeFunction::Tanh, NodeFunction::Sigmoid,
                                           NodeFunction::Gaussian, NodeFunction::Step,
                                           NodeFunction::Relu};
    double weight_min = -1.0;
    double weight_max = 1.0;
    /// Number of preceding nodes a connection may reach; nullopt = unrestricted.
    std::optional<std::size_t> levels_back;

    /// Throws InvalidArgument describing the first violated constraint.
    void validate() const;

    /// Number of legal values of node `node`'s connection genes.
    std::size_t connection_domain(std::size_t node) const;
    /// Maps a draw in [0, connection_domain(node)) onto an input/node address.
    std::uint32_t connection_address(std::size_t node, std::size_t draw) const;

    bool operator==(const CgpConfig&) const = default;
};

/// Read-only view of one node's genes inside a Genome.
struct NodeGene {
    NodeFunction function;
    std::span<const std::uint32_t> connections;
    std::span<const double> weights;
};

/// Addresses below n_inputs denote program inputs; address n_inputs + i is node i.
class Genome {
public:
    Genome(std::shared_ptr<const CgpConfig> config, std::vector<NodeFunction> functions,
           std::vector<std::uint32_t> connections, std::vector<double> weights,
           std::vector<std::uint32_t> outputs);

    const CgpConfig& config() const noexcept { return *config_; }
    const std::shared_ptr<const CgpConfig>& shared_config() const noexcept { return config_; }

    std::size_t size() const noexcept { return functions_.size(); }
    NodeGene node(std::size_t i) const;
    std::span<const std::uint32_t> outputs() const noexcept { return outputs_; }

    std::span<const NodeFunction> functions() const noexcept { return functions_; }
    std::span<const std::uint32_t> connections() const noexcept { return connections_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Total number of mutable genes (functions, connections, weights, outputs).
    std::size_t gene_count() const noexcept;

    /// Number of nodes reachable from the output genes.
    std::size_t active_count() const;

    /// Node-wise equality (configs compared by value).
    bool operator==(const Genome& other) const;

private:
    friend class GenomeEditor;

    std::shared_ptr<const CgpConfig> config_;
    std::vector<NodeFunction> functions_;
    std::vector<std::uint32_t> connections_;  // n_nodes * arity
    std::vector<double> weights_;             // n_nodes * arity
    std::vector<std::uint32_t> outputs_;
};

/// A probability vector over discrete actions.
struct ActionDistribution {
    std::vector<double> probabilities;

    std::size_t size() const noexcept { return probabilities.size(); }
    double operator[](std::size_t i) const { return probabilities[i]; }
    /// Index of the largest probability; ties resolve to the lowest index.
    std::size_t argmax() const;
};

/// The evaluable network: active nodes in ascending (topological) order with
/// their connections resolved to slots of an evaluation buffer. Slots
/// [0, n_inputs) hold the state, slot n_inputs + k holds active node k.
class Phenotype {
public:
    std::size_t n_inputs() const noexcept { return n_inputs_; }
    std::size_t n_outputs() const noexcept { return readouts_.size(); }
    std::size_t active_count() const noexcept { return active_nodes_.size(); }
    std::size_t arity() const noexcept { return arity_; }

    /// Genome indices of the active nodes, ascending.
    std::span<const std::uint32_t> active_nodes() const noexcept { return active_nodes_; }
    std::span<const NodeFunction> functions() const noexcept { return functions_; }
    std::span<const std::uint32_t> sources() const noexcept { return sources_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const std::uint32_t> readouts() const noexcept { return readouts_; }

    ActionDistribution forward(std::span<const double> state) const;

    /// Evaluates every state of `states`; `probabilities` receives a row-major
    /// states.size() x n_outputs matrix. Bit-identical to calling forward() per state.
    void forward_batch(const StateBatch& states, std::span<double> probabilities) const;
    std::vector<double> forward_batch(const StateBatch& states) const;

    bool operator==(const Phenotype&) const = default;

private:
    friend Phenotype decode(const Genome& genome);

    std::size_t n_inputs_ = 0;
    std::size_t arity_ = 0;
    std::vector<std::uint32_t> active_nodes_;
    std::vector<NodeFunction> functions_;
    std::vector<std::uint32_t> sources_;
    std::vector<double> weights_;
    std::vector<std::uint32_t> readouts_;
};

Genome random_genome(const CgpConfig& config, Rng& rng);
Genome random_genome(std::shared_ptr<const CgpConfig> config, Rng& rng);

Phenotype decode(const Genome& genome);

/// Convenience: decode(genome).forward(state).
ActionDistribution forward(const Genome& genome, std::span<const double> state);

struct MutationStats {
    std::size_t genes_visited = 0;
    std::size_t genes_resampled = 0;   // per-gene resample events
    std::size_t cap_rejections = 0;    // resamples rejected for exceeding max_active
    std::size_t kept_parent = 0;       // genes that fell back to the parent value
};

/// Resamples every gene independently with probability `rate` from its legal
/// domain. Changes that would push the active node count above max_active are
/// redrawn (up to 50 times) before the parent gene is kept.
Genome mutate(const Genome& genome, double rate, Rng& rng, MutationStats* stats = nullptr);

/// Versioned text record ("bnet-genome 1"); weights use shortest round-trip form.
std::string serialize(const Genome& genome);
Genome deserialize_genome(std::string_view text);
void save_genome(const Genome& genome, const std::string& path);
Genome load_genome(const std::string& path);

} // namespace bnet
