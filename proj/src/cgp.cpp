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

#include "bnet/cgp.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bnet/error.hpp"

namespace bnet {

namespace {

constexpr int kCapRetries = 50;
constexpr std::size_t kBlock = 256;

void mark_active(std::size_t n_inputs, std::size_t n_nodes, std::size_t arity,
                 std::span<const std::uint32_t> connections,
                 std::span<const std::uint32_t> outputs, std::vector<char>& active) {
    active.assign(n_nodes, 0);
    for (std::uint32_t o : outputs)
        if (o >= n_inputs) active[o - n_inputs] = 1;
    for (std::size_t i = n_nodes; i-- > 0;) {
        if (!active[i]) continue;
        for (std::size_t c = 0; c < arity; ++c) {
            const std::uint32_t src = connections[i * arity + c];
            if (src >= n_inputs) active[src - n_inputs] = 1;
        }
    }
}

std::size_t count_marked(const std::vector<char>& active) {
    return static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
}

void softmax_inplace(std::span<double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - m);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

// exp() without branches or library calls, so the block loops below
// vectorise. Range reduction x = k ln2 + r with |r| <= ln2/2, a degree-12
// Taylor polynomial for e^r (relative error below 3e-16), and 2^k assembled in
// the exponent bits. Inputs are clamped to the finite range.
inline double exp_kernel(double x) {
    constexpr double kLog2e = 1.4426950408889634;
    constexpr double kLn2Hi = 0.6931471803691238;
    constexpr double kLn2Lo = 1.9082149292705877e-10;
    constexpr double kRound = 6755399441055744.0;  // 1.5 * 2^52
    const double c = std::min(std::max(x, -708.0), 709.0);  // NaN passes through
    const double shifted = c * kLog2e + kRound;
    const double k = shifted - kRound;
    const double r = (c - k * kLn2Hi) - k * kLn2Lo;
    double p = 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    // The low mantissa bits of `shifted` hold k as a two's complement integer.
    const auto kbits = std::bit_cast<std::uint64_t>(shifted) & 0xfffffULL;
    const std::int64_t ki = static_cast<std::int64_t>(kbits ^ 0x80000ULL) - 0x80000LL;
    const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(ki + 1023) << 52);
    return p * scale;
}

void apply_block(NodeFunction f, double* v, std::size_t n) {
    switch (f) {
    case NodeFunction::Tanh:
        for (std::size_t t = 0; t < n; ++t) v[t] = 1.0 - 2.0 / (exp_kernel(2.0 * v[t]) + 1.0);
        break;
    case NodeFunction::Sigmoid:
        for (std::size_t t = 0; t < n; ++t) v[t] = 1.0 / (1.0 + exp_kernel(-v[t]));
        break;
    case NodeFunction::Gaussian:
        for (std::size_t t = 0; t < n; ++t) v[t] = exp_kernel(-v[t] * v[t]);
        break;
    case NodeFunction::Step:
        for (std::size_t t = 0; t < n; ++t) v[t] = v[t] >= 0.0 ? 1.0 : 0.0;
        break;
    case NodeFunction::Relu:
        for (std::size_t t = 0; t < n; ++t) v[t] = v[t] > 0.0 ? v[t] : 0.0;
        break;
    }
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string_view to_string(NodeFunction f) {
    switch (f) {
    case NodeFunction::Tanh: return "tanh";
    case NodeFunction::Sigmoid: return "sigmoid";
    case NodeFunction::Gaussian: return "gaussian";
    case NodeFunction::Step: return "step";
    case NodeFunction::Relu: return "relu";
    }
    return "?";
}

NodeFunction parse_node_function(std::string_view name) {
    for (auto f : {NodeFunction::Tanh, NodeFunction::Sigmoid, NodeFunction::Gaussian,
                   NodeFunction::Step, NodeFunction::Relu})
        if (to_string(f) == name) return f;
    throw InvalidArgument("unknown node function '" + std::string(name) + "'");
}

double apply_node_function(NodeFunction f, double x) {
    apply_block(f, &x, 1);
    return x;
}

// ---------------------------------------------------------------------------
// CgpConfig

void CgpConfig::validate() const {
    if (n_inputs == 0) throw InvalidArgument("cgp config: n_inputs must be positive");
    if (n_outputs == 0) throw InvalidArgument("cgp config: n_outputs must be positive");
    if (n_nodes == 0) throw InvalidArgument("cgp config: n_nodes must be positive");
    if (arity == 0) throw InvalidArgument("cgp config: arity must be positive");
    if (max_active == 0) throw InvalidArgument("cgp config: max_active must be positive");
    if (function_set.empty()) throw InvalidArgument("cgp config: empty function set");
    if (!std::isfinite(weight_min) || !std::isfinite(weight_max) || weight_min > weight_max)
        throw InvalidArgument("cgp config: invalid weight range");
    if (levels_back && *levels_back == 0)
        throw InvalidArgument("cgp config: levels_back must be positive");
    if (n_inputs + n_nodes > std::numeric_limits<std::uint32_t>::max())
        throw InvalidArgument("cgp config: too many nodes");
}

std::size_t CgpConfig::connection_domain(std::size_t node) const {
    const std::size_t reach = levels_back ? std::min(node, *levels_back) : node;
    return n_inputs + reach;
}

std::uint32_t CgpConfig::connection_address(std::size_t node, std::size_t draw) const {
    if (draw < n_inputs) return static_cast<std::uint32_t>(draw);
    const std::size_t reach = levels_back ? std::min(node, *levels_back) : node;
    return static_cast<std::uint32_t>(n_inputs + (node - reach) + (draw - n_inputs));
}

// ---------------------------------------------------------------------------
// Genome

Genome::Genome(std::shared_ptr<const CgpConfig> config, std::vector<NodeFunction> functions,
               std::vector<std::uint32_t> connections, std::vector<double> weights,
               std::vector<std::uint32_t> outputs)
    : config_(std::move(config)),
      functions_(std::move(functions)),
      connections_(std::move(connections)),
      weights_(std::move(weights)),
      outputs_(std::move(outputs)) {
    if (!config_) throw InvalidArgument("genome: null config");
    const CgpConfig& c = *config_;
    c.validate();
    if (functions_.size() != c.n_nodes || connections_.size() != c.n_nodes * c.arity ||
        weights_.size() != c.n_nodes * c.arity || outputs_.size() != c.n_outputs)
        throw InvalidArgument("genome: gene counts do not match config");
    for (std::size_t i = 0; i < c.n_nodes; ++i) {
        const std::size_t first_node = i - (c.connection_domain(i) - c.n_inputs);
        for (std::size_t k = 0; k < c.arity; ++k) {
            const std::uint32_t src = connections_[i * c.arity + k];
            const bool legal = src < c.n_inputs ||
                               (src >= c.n_inputs + first_node && src < c.n_inputs + i);
            if (!legal)
                throw InvalidArgument("genome: node " + std::to_string(i) +
                                      " has an illegal connection to address " +
                                      std::to_string(src));
            const double w = weights_[i * c.arity + k];
            if (!(w >= c.weight_min && w <= c.weight_max))
                throw InvalidArgument("genome: weight outside weight range");
        }
    }
    for (std::uint32_t o : outputs_)
        if (o >= c.n_inputs + c.n_nodes) throw InvalidArgument("genome: output gene out of range");
}

NodeGene Genome::node(std::size_t i) const {
    const std::size_t a = config_->arity;
    return {functions_.at(i), std::span(connections_).subspan(i * a, a),
            std::span(weights_).subspan(i * a, a)};
}

std::size_t Genome::gene_count() const noexcept {
    return functions_.size() + connections_.size() + weights_.size() + outputs_.size();
}

std::size_t Genome::active_count() const {
    std::vector<char> active;
    mark_active(config_->n_inputs, config_->n_nodes, config_->arity, connections_, outputs_,
                active);
    return count_marked(active);
}

bool Genome::operator==(const Genome& other) const {
    return (config_ == other.config_ || *config_ == *other.config_) &&
           functions_ == other.functions_ && connections_ == other.connections_ &&
           weights_ == other.weights_ && outputs_ == other.outputs_;
}

// ---------------------------------------------------------------------------
// ActionDistribution / Phenotype

std::size_t ActionDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probabilities.size(); ++i)
        if (probabilities[i] > probabilities[best]) best = i;
    return best;
}

Phenotype decode(const Genome& genome) {
    const CgpConfig& c = genome.config();
    std::vector<char> active;
    mark_active(c.n_inputs, c.n_nodes, c.arity, genome.connections(), genome.outputs(), active);

    Phenotype p;
    p.n_inputs_ = c.n_inputs;
    p.arity_ = c.arity;
    std::vector<std::uint32_t> slot(c.n_nodes, 0);
    for (std::size_t i = 0; i < c.n_nodes; ++i) {
        if (!active[i]) continue;
        slot[i] = static_cast<std::uint32_t>(c.n_inputs + p.active_nodes_.size());
        p.active_nodes_.push_back(static_cast<std::uint32_t>(i));
    }
    const std::size_t n_active = p.active_nodes_.size();
    p.functions_.reserve(n_active);
    p.sources_.reserve(n_active * c.arity);
    p.weights_.reserve(n_active * c.arity);
    auto resolve = [&](std::uint32_t address) {
        return address < c.n_inputs ? address : slot[address - c.n_inputs];
    };
    for (std::uint32_t i : p.active_nodes_) {
        NodeGene g = genome.node(i);
        p.functions_.push_back(g.function);
        for (std::size_t k = 0; k < c.arity; ++k) {
            p.sources_.push_back(resolve(g.connections[k]));
            p.weights_.push_back(g.weights[k]);
        }
    }
    for (std::uint32_t o : genome.outputs()) p.readouts_.push_back(resolve(o));
    return p;
}

ActionDistribution Phenotype::forward(std::span<const double> state) const {
    if (state.size() != n_inputs_)
        throw InvalidArgument("forward: state has dimension " + std::to_string(state.size()) +
                              ", expected " + std::to_string(n_inputs_));
    for (double v : state)
        if (!std::isfinite(v)) throw InvalidArgument("forward: non-finite state value");

    std::vector<double> buf(n_inputs_ + active_nodes_.size());
    std::copy(state.begin(), state.end(), buf.begin());
    for (std::size_t k = 0; k < active_nodes_.size(); ++k) {
        double acc = 0.0;
        for (std::size_t c = 0; c < arity_; ++c)
            acc += weights_[k * arity_ + c] * buf[sources_[k * arity_ + c]];
        apply_block(functions_[k], &acc, 1);
        buf[n_inputs_ + k] = acc;
    }
    ActionDistribution out;
    out.probabilities.resize(readouts_.size());
    for (std::size_t i = 0; i < readouts_.size(); ++i) out.probabilities[i] = buf[readouts_[i]];
    softmax_inplace(out.probabilities);
    return out;
}

void Phenotype::forward_batch(const StateBatch& states, std::span<double> probabilities) const {
    if (states.dim() != n_inputs_ && !states.empty())
        throw InvalidArgument("forward_batch: state dimension mismatch");
    const std::size_t n_states = states.size();
    const std::size_t n_out = readouts_.size();
    if (probabilities.size() != n_states * n_out)
        throw InvalidArgument("forward_batch: output buffer has wrong size");

    const std::size_t n_active = active_nodes_.size();
    thread_local std::vector<double> scratch;
    scratch.resize(n_active * kBlock);
    std::vector<const double*> inputs(n_inputs_);
    std::vector<double> readout(n_out);

    for (std::size_t start = 0; start < n_states; start += kBlock) {
        const std::size_t len = std::min(kBlock, n_states - start);
        for (std::size_t j = 0; j < n_inputs_; ++j)
            inputs[j] = states.feature(j).data() + start;
        auto column = [&](std::uint32_t slot) -> const double* {
            return slot < n_inputs_ ? inputs[slot] : scratch.data() + (slot - n_inputs_) * kBlock;
        };
        for (std::size_t k = 0; k < n_active; ++k) {
            double* acc = scratch.data() + k * kBlock;
            const double* w = weights_.data() + k * arity_;
            const std::uint32_t* src = sources_.data() + k * arity_;
            std::fill_n(acc, len, 0.0);
            for (std::size_t c = 0; c < arity_; ++c) {
                const double wc = w[c];
                const double* x = column(src[c]);
                for (std::size_t t = 0; t < len; ++t) acc[t] += wc * x[t];
            }
            apply_block(functions_[k], acc, len);
        }
        for (std::size_t t = 0; t < len; ++t) {
            for (std::size_t i = 0; i < n_out; ++i) readout[i] = column(readouts_[i])[t];
            softmax_inplace(readout);
            std::copy(readout.begin(), readout.end(),
                      probabilities.begin() + static_cast<std::ptrdiff_t>((start + t) * n_out));
        }
    }
}

std::vector<double> Phenotype::forward_batch(const StateBatch& states) const {
    std::vector<double> out(states.size() * readouts_.size());
    forward_batch(states, out);
    return out;
}

ActionDistribution forward(const Genome& genome, std::span<const double> state) {
    return decode(genome).forward(state);
}

// ---------------------------------------------------------------------------
// Initialisation and mutation

namespace {

NodeFunction draw_function(const CgpConfig& c, Rng& rng) {
    return c.function_set[uniform_index(rng, c.function_set.size())];
}

std::uint32_t draw_connection(const CgpConfig& c, std::size_t node, Rng& rng) {
    return c.connection_address(node, uniform_index(rng, c.connection_domain(node)));
}

double draw_weight(const CgpConfig& c, Rng& rng) {
    return uniform(rng, c.weight_min, c.weight_max);
}

std::uint32_t draw_output(const CgpConfig& c, Rng& rng) {
    return static_cast<std::uint32_t>(uniform_index(rng, c.n_inputs + c.n_nodes));
}

} // namespace

Genome random_genome(std::shared_ptr<const CgpConfig> config, Rng& rng) {
    if (!config) throw InvalidArgument("random_genome: null config");
    const CgpConfig& c = *config;
    c.validate();
    std::vector<NodeFunction> functions(c.n_nodes);
    std::vector<std::uint32_t> connections(c.n_nodes * c.arity);
    std::vector<double> weights(c.n_nodes * c.arity);
    for (std::size_t i = 0; i < c.n_nodes; ++i) {
        functions[i] = draw_function(c, rng);
        for (std::size_t k = 0; k < c.arity; ++k) {
            connections[i * c.arity + k] = draw_connection(c, i, rng);
            weights[i * c.arity + k] = draw_weight(c, rng);
        }
    }
    // Output genes are drawn one at a time; draws that would exceed the active
    // cap are redrawn, falling back to an input terminal.
    std::vector<std::uint32_t> outputs;
    std::vector<char> active;
    for (std::size_t o = 0; o < c.n_outputs; ++o) {
        std::uint32_t chosen = static_cast<std::uint32_t>(uniform_index(rng, c.n_inputs));
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const std::uint32_t candidate = draw_output(c, rng);
            outputs.push_back(candidate);
            mark_active(c.n_inputs, c.n_nodes, c.arity, connections, outputs, active);
            outputs.pop_back();
            if (count_marked(active) <= c.max_active) {
                chosen = candidate;
                break;
            }
        }
        outputs.push_back(chosen);
    }
    return Genome(std::move(config), std::move(functions), std::move(connections),
                  std::move(weights), std::move(outputs));
}

Genome random_genome(const CgpConfig& config, Rng& rng) {
    return random_genome(std::make_shared<const CgpConfig>(config), rng);
}

Genome mutate(const Genome& genome, double rate, Rng& rng, MutationStats* stats) {
    if (!(rate >= 0.0 && rate <= 1.0))
        throw InvalidArgument("mutate: rate must lie in [0, 1]");
    const CgpConfig& c = genome.config();
    std::vector<NodeFunction> functions(genome.functions().begin(), genome.functions().end());
    std::vector<std::uint32_t> connections(genome.connections().begin(),
                                           genome.connections().end());
    std::vector<double> weights(genome.weights().begin(), genome.weights().end());
    std::vector<std::uint32_t> outputs(genome.outputs().begin(), genome.outputs().end());

    MutationStats local;
    MutationStats& st = stats ? *stats : local;
    std::vector<char> active;
    mark_active(c.n_inputs, c.n_nodes, c.arity, connections, outputs, active);
    std::vector<char> trial;

    // Tries to replace `gene` (a connection or output gene that can change the
    // active set) with draws from `draw`, honouring the active-node cap.
    auto constrained_resample = [&](std::uint32_t& gene, auto&& draw) {
        const std::uint32_t parent = gene;
        for (int attempt = 0; attempt < kCapRetries; ++attempt) {
            const std::uint32_t proposal = draw();
            gene = proposal;
            if (proposal == parent) return;
            mark_active(c.n_inputs, c.n_nodes, c.arity, connections, outputs, trial);
            if (count_marked(trial) <= c.max_active) {
                active.swap(trial);
                return;
            }
            ++st.cap_rejections;
        }
        gene = parent;
        ++st.kept_parent;
    };

    for (std::size_t i = 0; i < c.n_nodes; ++i) {
        ++st.genes_visited;
        if (bernoulli(rng, rate)) {
            ++st.genes_resampled;
            functions[i] = draw_function(c, rng);
        }
        for (std::size_t k = 0; k < c.arity; ++k) {
            const std::size_t idx = i * c.arity + k;
            st.genes_visited += 2;
            if (bernoulli(rng, rate)) {
                ++st.genes_resampled;
                if (active[i])
                    constrained_resample(connections[idx],
                                         [&] { return draw_connection(c, i, rng); });
                else
                    connections[idx] = draw_connection(c, i, rng);
            }
            if (bernoulli(rng, rate)) {
                ++st.genes_resampled;
                weights[idx] = draw_weight(c, rng);
            }
        }
    }
    for (auto& out : outputs) {
        ++st.genes_visited;
        if (bernoulli(rng, rate)) {
            ++st.genes_resampled;
            constrained_resample(out, [&] { return draw_output(c, rng); });
        }
    }
    return Genome(genome.shared_config(), std::move(functions), std::move(connections),
                  std::move(weights), std::move(outputs));
}

// ---------------------------------------------------------------------------
// Serialisation

std::string serialize(const Genome& genome) {
    const CgpConfig& c = genome.config();
    std::ostringstream os;
    os << "bnet-genome 1\n";
    os << "inputs " << c.n_inputs << "\n";
    os << "outputs " << c.n_outputs << "\n";
    os << "nodes " << c.n_nodes << "\n";
    os << "arity " << c.arity << "\n";
    os << "max_active " << c.max_active << "\n";
    os << "weight_range " << format_double(c.weight_min) << ' ' << format_double(c.weight_max)
       << "\n";
    os << "levels_back ";
    if (c.levels_back) os << *c.levels_back; else os << "unrestricted";
    os << "\nfunctions";
    for (NodeFunction f : c.function_set) os << ' ' << to_string(f);
    os << "\n";
    for (std::size_t i = 0; i < genome.size(); ++i) {
        NodeGene g = genome.node(i);
        os << "node " << i << ' ' << to_string(g.function);
        for (std::size_t k = 0; k < c.arity; ++k)
            os << ' ' << g.connections[k] << ' ' << format_double(g.weights[k]);
        os << "\n";
    }
    os << "output_genes";
    for (std::uint32_t o : genome.outputs()) os << ' ' << o;
    os << "\nend\n";
    return os.str();
}

namespace {

template <class T>
T parse_number(const std::string& token, const char* what) {
    T value{};
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw InvalidArgument(std::string("genome record: bad ") + what + " '" + token + "'");
    return value;
}

} // namespace

Genome deserialize_genome(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    auto next_line = [&](const char* expect) {
        if (!std::getline(is, line))
            throw InvalidArgument(std::string("genome record: missing '") + expect + "'");
        return std::istringstream(line);
    };
    auto keyed = [&](const char* key) {
        auto ls = next_line(key);
        std::string k;
        ls >> k;
        if (k != key)
            throw InvalidArgument(std::string("genome record: expected '") + key + "', got '" +
                                  k + "'");
        return ls;
    };
    auto size_field = [&](const char* key) {
        auto ls = keyed(key);
        std::string v;
        ls >> v;
        return parse_number<std::size_t>(v, key);
    };

    {
        auto ls = next_line("header");
        std::string magic, version;
        ls >> magic >> version;
        if (magic != "bnet-genome") throw InvalidArgument("genome record: bad magic");
        if (version != "1") throw InvalidArgument("genome record: unsupported version " + version);
    }
    auto config = std::make_shared<CgpConfig>();
    config->n_inputs = size_field("inputs");
    config->n_outputs = size_field("outputs");
    config->n_nodes = size_field("nodes");
    config->arity = size_field("arity");
    config->max_active = size_field("max_active");
    {
        auto ls = keyed("weight_range");
        std::string lo, hi;
        ls >> lo >> hi;
        config->weight_min = parse_number<double>(lo, "weight");
        config->weight_max = parse_number<double>(hi, "weight");
    }
    {
        auto ls = keyed("levels_back");
        std::string v;
        ls >> v;
        if (v != "unrestricted") config->levels_back = parse_number<std::size_t>(v, "levels_back");
    }
    {
        auto ls = keyed("functions");
        config->function_set.clear();
        std::string name;
        while (ls >> name) config->function_set.push_back(parse_node_function(name));
    }
    config->validate();

    std::vector<NodeFunction> functions(config->n_nodes);
    std::vector<std::uint32_t> connections(config->n_nodes * config->arity);
    std::vector<double> weights(config->n_nodes * config->arity);
    for (std::size_t i = 0; i < config->n_nodes; ++i) {
        auto ls = keyed("node");
        std::string idx, fn;
        ls >> idx >> fn;
        if (parse_number<std::size_t>(idx, "node index") != i)
            throw InvalidArgument("genome record: nodes out of order");
        functions[i] = parse_node_function(fn);
        for (std::size_t k = 0; k < config->arity; ++k) {
            std::string conn, w;
            if (!(ls >> conn >> w)) throw InvalidArgument("genome record: truncated node line");
            connections[i * config->arity + k] = parse_number<std::uint32_t>(conn, "connection");
            weights[i * config->arity + k] = parse_number<double>(w, "weight");
        }
    }
    std::vector<std::uint32_t> outputs;
    {
        auto ls = keyed("output_genes");
        std::string o;
        while (ls >> o) outputs.push_back(parse_number<std::uint32_t>(o, "output gene"));
    }
    keyed("end");
    return Genome(std::move(config), std::move(functions), std::move(connections),
                  std::move(weights), std::move(outputs));
}

void save_genome(const Genome& genome, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write genome to '" + path + "'");
    out << serialize(genome);
    if (!out) throw IoError("failed writing genome to '" + path + "'");
}

Genome load_genome(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read genome from '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_genome(ss.str());
}

} // namespace bnet
