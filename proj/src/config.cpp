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

#include "bnet/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "bnet/error.hpp"

namespace bnet {

namespace {

// Key order here is the order of serialize().
const std::vector<std::pair<std::string, std::string>>& defaults() {
    static const std::vector<std::pair<std::string, std::string>> d{
        {"run.env", "cartpole"},
        {"run.variant", "auto"},
        {"run.seed", "1"},
        {"run.max_env_steps", "auto"},
        {"run.max_iterations", "0"},
        {"run.initial_population", "5"},
        {"run.repeats", "auto"},
        {"run.weighting", "auto"},
        {"run.gamma", "0.99"},
        {"run.init_mode", "auto"},
        {"run.init_epsilon", "auto"},
        {"run.mutant_mode", "auto"},
        {"run.mutant_epsilon", "auto"},
        {"run.always_mutant", "auto"},
        {"run.solve_episodes", "auto"},
        {"run.solve_threshold", "auto"},
        {"run.offline_experience", ""},
        {"run.trajectory_log", "false"},
        {"env.max_episode_steps", "0"},
        {"env.maze_file", ""},
        {"env.maze_noise", "0"},
        {"cgp.nodes", "400"},
        {"cgp.arity", "10"},
        {"cgp.max_active", "200"},
        {"cgp.levels_back", "0"},
        {"cgp.weight_min", "-1"},
        {"cgp.weight_max", "1"},
        {"cgp.functions", "tanh,sigmoid,gaussian,step,relu"},
        {"mutation.mutant_rate", "0.01"},
        {"behavior_search.mu", "20"},
        {"behavior_search.lambda", "2"},
        {"behavior_search.iterations", "1000"},
        {"behavior_search.mutation_rate", "0.05"},
        {"surrogate_search.mu", "8"},
        {"surrogate_search.lambda", "2"},
        {"surrogate_search.iterations", "500"},
        {"surrogate_search.mutation_rate", "0.05"},
        {"surrogate_search.archive", "100"},
        {"surrogate_search.states_per_record", "0"},
        {"surrogate_search.theta_min", "0.001"},
        {"surrogate_search.theta_max", "1000"},
        {"surrogate_search.nugget_min", "1e-08"},
        {"surrogate_search.nugget_max", "0.1"},
        {"surrogate_search.grid", "32"},
        {"critic.hidden", "128,64"},
        {"critic.steps", "1000"},
        {"critic.batch_size", "64"},
        {"critic.learning_rate", "0.001"},
        {"critic.pool", "50000"},
        {"archive.size", "10"},
        {"archive.replacement_budget", "2"},
    };
    return d;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Typed reads with errors naming the key.
class Reader {
public:
    explicit Reader(const std::map<std::string, std::string>& v) : v_(v) {}

    const std::string& raw(const std::string& key) const { return v_.at(key); }
    bool is_auto(const std::string& key) const { return raw(key) == "auto"; }

    double real(const std::string& key) const {
        const std::string& s = raw(key);
        double x = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(x))
            throw ConfigError(key, "'" + s + "' is not a number");
        return x;
    }

    std::uint64_t count(const std::string& key) const {
        const std::string& s = raw(key);
        std::uint64_t x = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty())
            throw ConfigError(key, "'" + s + "' is not a non-negative integer");
        return x;
    }

    bool flag(const std::string& key) const {
        const std::string& s = raw(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ConfigError(key, "'" + s + "' is not a boolean");
    }

    EvalMode mode(const std::string& key) const {
        const std::string& s = raw(key);
        if (s == "deterministic") return EvalMode::Deterministic;
        if (s == "stochastic") return EvalMode::Stochastic;
        if (s == "epsilon") return EvalMode::StochasticEpsilon;
        throw ConfigError(key, "'" + s + "' is not one of deterministic, stochastic, epsilon");
    }

private:
    const std::map<std::string, std::string>& v_;
};

} // namespace

Config::Config() {
    for (const auto& [k, v] : defaults()) values_[k] = v;
}

const std::vector<std::string>& Config::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto& [key, v] : defaults()) out.push_back(key);
        return out;
    }();
    return k;
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "unknown configuration key");
    it->second = trim(value);
}

std::string Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "unknown configuration key");
    return it->second;
}

void Config::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError(std::string(assignment), "override must have the form section.key=value");
    set(trim(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

Config Config::parse(std::string_view ini) {
    boost::property_tree::ptree tree;
    std::istringstream in{std::string(ini)};
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("", std::string("malformed configuration: ") + e.message() + " (line " +
                                  std::to_string(e.line()) + ")");
    }
    Config c;
    for (const auto& [section, entries] : tree) {
        if (entries.empty() && !entries.data().empty())
            throw ConfigError(section, "key outside of any [section]");
        for (const auto& [key, value] : entries) c.set(section + "." + key, value.data());
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open configuration '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string Config::serialize() const {
    std::ostringstream out;
    std::string section;
    for (const auto& key : keys()) {
        const auto dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
            section = sec;
        }
        out << key.substr(dot + 1) << " = " << values_.at(key) << '\n';
    }
    return out.str();
}

std::string Config::hash() const { return git_blob_sha1(serialize()); }

TrainerConfig Config::resolve() const {
    const Reader r(values_);
    const std::string& env = r.raw("run.env");
    const auto& envs = environment_names();
    if (std::find(envs.begin(), envs.end(), env) == envs.end())
        throw ConfigError("run.env", "unknown environment '" + env + "'");
    TrainerConfig c = default_config(env);

    try {
        if (!r.is_auto("run.variant")) {
            c.variant = r.raw("run.variant");
            c.generators = variant_generators(c.variant);
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError("run.variant", e.what());
    }
    c.seed = r.count("run.seed");
    if (!r.is_auto("run.max_env_steps")) c.max_env_steps = r.count("run.max_env_steps");
    c.max_iterations = r.count("run.max_iterations");
    c.initial_population = r.count("run.initial_population");
    if (!r.is_auto("run.repeats")) c.repeats = r.count("run.repeats");
    if (!r.is_auto("run.weighting")) {
        const std::string& w = r.raw("run.weighting");
        if (w == "critic") c.weighting = WeightSource::Critic;
        else if (w == "reward") c.weighting = WeightSource::Reward;
        else throw ConfigError("run.weighting", "'" + w + "' is not one of critic, reward");
    }
    c.gamma = r.real("run.gamma");
    if (!r.is_auto("run.init_mode")) c.init_mode = r.mode("run.init_mode");
    if (!r.is_auto("run.init_epsilon")) c.init_epsilon = r.real("run.init_epsilon");
    if (!r.is_auto("run.mutant_mode")) c.mutant_mode = r.mode("run.mutant_mode");
    if (!r.is_auto("run.mutant_epsilon")) c.mutant_epsilon = r.real("run.mutant_epsilon");
    if (!r.is_auto("run.always_mutant")) c.always_mutant = r.flag("run.always_mutant");
    if (!r.is_auto("run.solve_episodes")) c.solve_episodes = r.count("run.solve_episodes");
    if (!r.is_auto("run.solve_threshold")) c.solve_threshold = r.real("run.solve_threshold");
    r.flag("run.trajectory_log");

    c.env.max_episode_steps = r.count("env.max_episode_steps");
    c.env.maze_file = r.raw("env.maze_file");
    c.env.maze_noise = r.real("env.maze_noise");

    c.cgp.n_nodes = r.count("cgp.nodes");
    c.cgp.arity = r.count("cgp.arity");
    c.cgp.max_active = r.count("cgp.max_active");
    if (const auto lb = r.count("cgp.levels_back"); lb > 0) c.cgp.levels_back = lb;
    c.cgp.weight_min = r.real("cgp.weight_min");
    c.cgp.weight_max = r.real("cgp.weight_max");
    c.cgp.function_set.clear();
    try {
        for (const auto& f : split(r.raw("cgp.functions"), ','))
            c.cgp.function_set.push_back(parse_node_function(f));
    } catch (const InvalidArgument& e) {
        throw ConfigError("cgp.functions", e.what());
    }

    c.mutant_rate = r.real("mutation.mutant_rate");
    c.behavior_search.mu = r.count("behavior_search.mu");
    c.behavior_search.lambda = r.count("behavior_search.lambda");
    c.behavior_search.iterations = r.count("behavior_search.iterations");
    c.behavior_search.mutation_rate = r.real("behavior_search.mutation_rate");
    c.surrogate_search.mu = r.count("surrogate_search.mu");
    c.surrogate_search.lambda = r.count("surrogate_search.lambda");
    c.surrogate_search.iterations = r.count("surrogate_search.iterations");
    c.surrogate_search.mutation_rate = r.real("surrogate_search.mutation_rate");
    c.surrogate_capacity = r.count("surrogate_search.archive");
    c.surrogate_states = r.count("surrogate_search.states_per_record");
    c.kriging.theta_min = r.real("surrogate_search.theta_min");
    c.kriging.theta_max = r.real("surrogate_search.theta_max");
    c.kriging.nugget_min = r.real("surrogate_search.nugget_min");
    c.kriging.nugget_max = r.real("surrogate_search.nugget_max");
    c.kriging.grid = r.count("surrogate_search.grid");

    c.critic_hidden.clear();
    for (const auto& h : split(r.raw("critic.hidden"), ',')) {
        std::size_t x = 0;
        const auto [p, ec] = std::from_chars(h.data(), h.data() + h.size(), x);
        if (ec != std::errc() || p != h.data() + h.size() || x == 0)
            throw ConfigError("critic.hidden", "'" + h + "' is not a positive layer width");
        c.critic_hidden.push_back(x);
    }
    c.critic.steps = r.count("critic.steps");
    c.critic.batch_size = r.count("critic.batch_size");
    c.critic.learning_rate = r.real("critic.learning_rate");
    c.pool_capacity = r.count("critic.pool");
    c.archive_size = r.count("archive.size");
    c.archive_budget = r.count("archive.replacement_budget");

    // Structural checks, reported against the section they belong to.
    const auto check = [](const char* key, auto&& fn) {
        try {
            fn();
        } catch (const InvalidArgument& e) {
            throw ConfigError(key, e.what());
        }
    };
    check("cgp", [&] {
        CgpConfig g = c.cgp;
        g.n_inputs = 1;
        g.n_outputs = 1;
        g.validate();
    });
    for (const char* section : {"behavior_search", "surrogate_search"}) {
        const EaConfig& ea = std::string_view(section) == "behavior_search" ? c.behavior_search : c.surrogate_search;
        const std::string prefix = std::string(section) + ".";
        if (ea.mu == 0) throw ConfigError(prefix + "mu", "must be at least 1");
        if (ea.lambda == 0) throw ConfigError(prefix + "lambda", "must be at least 1");
        if (ea.iterations == 0) throw ConfigError(prefix + "iterations", "must be at least 1");
        if (!(ea.mutation_rate > 0.0 && ea.mutation_rate <= 1.0))
            throw ConfigError(prefix + "mutation_rate", "must be in (0, 1]");
    }
    if (!(c.mutant_rate > 0.0 && c.mutant_rate <= 1.0))
        throw ConfigError("mutation.mutant_rate", "must be in (0, 1]");
    check("run", [&] { c.validate(); });
    return c;
}

std::string git_blob_sha1(std::string_view content) {
    std::string object = "blob " + std::to_string(content.size());
    object += '\0';
    object.append(content);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(object.data(), object.size(), digest, &len, EVP_sha1(), nullptr) != 1)
        throw Error("sha1: digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string output_root() {
    const char* v = std::getenv(kOutputRootVariable);
    return (v && *v) ? std::string(v) : std::string("runs");
}

std::string manifest_json(const Config& config, const ManifestPaths& paths) {
    const TrainerConfig t = config.resolve();
    nlohmann::ordered_json j;
    j["format"] = "bnet-manifest 1";
    j["config_hash"] = config.hash();
    j["seed"] = t.seed;
    j["env"] = t.env.name;
    j["variant"] = t.variant;
    nlohmann::ordered_json cfg;
    for (const auto& key : Config::keys()) cfg[key] = config.get(key);
    j["config"] = cfg;
    j["outputs"] = {{"trace", paths.trace},
                    {"selection", paths.selection},
                    {"checkpoint", paths.checkpoint},
                    {"trajectories", paths.trajectories}};
    return j.dump(2) + "\n";
}

} // namespace bnet
