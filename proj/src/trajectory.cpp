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

#include "bnet/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bnet/error.hpp"

namespace bnet {

std::string_view to_string(EvalMode mode) {
    switch (mode) {
    case EvalMode::Deterministic: return "deterministic";
    case EvalMode::Stochastic: return "stochastic";
    case EvalMode::StochasticEpsilon: return "stochastic-epsilon";
    }
    return "?";
}

StateBatch Trajectory::states() const {
    if (transitions.empty()) return {};
    std::vector<std::vector<double>> rows;
    rows.reserve(transitions.size());
    for (const auto& t : transitions) rows.push_back(t.state);
    return StateBatch::from_rows(rows.front().size(), rows);
}

std::vector<double> discounted_returns(const Trajectory& trajectory, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw InvalidArgument("discounted_returns: gamma must lie in [0, 1]");
    if (trajectory.empty()) throw InvalidArgument("discounted_returns: empty trajectory");
    std::vector<double> returns(trajectory.size());
    double acc = 0.0;
    for (std::size_t t = trajectory.size(); t-- > 0;) {
        acc = trajectory.transitions[t].reward + gamma * acc;
        returns[t] = acc;
    }
    return returns;
}

// ---------------------------------------------------------------------------
// EliteArchive

EliteArchive::EliteArchive(std::size_t capacity, std::size_t replacement_budget)
    : capacity_(capacity), budget_(replacement_budget) {
    if (capacity_ == 0) throw InvalidArgument("elite archive: capacity must be positive");
}

void EliteArchive::begin_iteration() { replaced_ = 0; }

double EliteArchive::min_fitness() const {
    if (entries_.empty()) throw InvalidArgument("elite archive: empty");
    return entries_.back().fitness;
}

void EliteArchive::insert_sorted(const Trajectory& trajectory) {
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), trajectory.fitness,
                                [](double f, const Trajectory& t) { return f > t.fitness; });
    entries_.insert(pos, trajectory);
}

bool EliteArchive::offer(const Trajectory& trajectory) {
    if (entries_.size() < capacity_) {
        insert_sorted(trajectory);
        return true;
    }
    if (replaced_ >= budget_ || !(trajectory.fitness > entries_.back().fitness)) return false;
    entries_.pop_back();
    insert_sorted(trajectory);
    ++replaced_;
    return true;
}

std::size_t EliteArchive::offer_batch(std::vector<Trajectory> batch) {
    std::stable_sort(batch.begin(), batch.end(),
                     [](const Trajectory& a, const Trajectory& b) { return a.fitness > b.fitness; });
    std::size_t accepted = 0;
    for (const auto& t : batch) accepted += offer(t) ? 1 : 0;
    return accepted;
}

ReferenceBehavior adapt_reference(const Trajectory& trajectory) {
    if (trajectory.empty()) throw InvalidArgument("reference: empty trajectory");
    ReferenceBehavior ref;
    ref.states = trajectory.states();
    ref.n_actions = trajectory.transitions.front().probabilities.size();
    ref.adapted_probabilities.assign(trajectory.size() * ref.n_actions, 0.0);
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        const std::size_t a = trajectory.transitions[t].action;
        if (a >= ref.n_actions) throw InvalidArgument("reference: action out of range");
        ref.actions.push_back(a);
        ref.adapted_probabilities[t * ref.n_actions + a] = 1.0;
    }
    return ref;
}

std::vector<ReferenceBehavior> reference_set(const EliteArchive& archive) {
    if (archive.empty()) throw InvalidArgument("reference_set: empty elite archive");
    std::vector<ReferenceBehavior> refs;
    refs.reserve(archive.size());
    for (const auto& t : archive.entries()) refs.push_back(adapt_reference(t));
    return refs;
}

// ---------------------------------------------------------------------------
// ExperiencePool

ExperiencePool::ExperiencePool(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw InvalidArgument("experience pool: capacity must be positive");
}

void ExperiencePool::append(const Trajectory& trajectory) {
    if (trajectory.returns.size() != trajectory.size())
        throw InvalidArgument("experience pool: trajectory returns not computed");
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        if (!std::isfinite(trajectory.returns[t]))
            throw InvalidArgument("experience pool: non-finite return");
        const auto& tr = trajectory.transitions[t];
        entries_.push_back({tr.state, tr.action, trajectory.returns[t]});
    }
    while (entries_.size() > capacity_) entries_.pop_front();
}

// ---------------------------------------------------------------------------
// Experience files
//
//   bnet-experience 1
//   env <name> obs <dim> actions <n> episodes <count>
//   episode <steps> <fitness> <total_reward>
//   <state...> <action> <reward> <p_0 ... p_{n-1}>      (one line per step)

namespace {

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw IoError("experience file: bad number '" + token + "'");
    return v;
}

} // namespace

void write_experience(std::ostream& out, const ExperienceSet& set) {
    out << "bnet-experience 1\n";
    out << "env " << set.env_name << " obs " << set.observation_dim << " actions " << set.n_actions
        << " episodes " << set.episodes.size() << "\n";
    for (const auto& ep : set.episodes) {
        out << "episode " << ep.size() << ' ' << fmt(ep.fitness) << ' ' << fmt(ep.total_reward)
            << "\n";
        for (const auto& tr : ep.transitions) {
            for (double s : tr.state) out << fmt(s) << ' ';
            out << tr.action << ' ' << fmt(tr.reward);
            for (double p : tr.probabilities.probabilities) out << ' ' << fmt(p);
            out << "\n";
        }
    }
}

ExperienceSet read_experience(std::istream& in) {
    ExperienceSet set;
    std::string line, word;
    if (!std::getline(in, line) || line != "bnet-experience 1")
        throw IoError("experience file: missing 'bnet-experience 1' header");
    std::size_t n_episodes = 0;
    {
        if (!std::getline(in, line)) throw IoError("experience file: missing env line");
        std::istringstream ls(line);
        std::string k1, k2, k3, k4;
        ls >> k1 >> set.env_name >> k2 >> set.observation_dim >> k3 >> set.n_actions >> k4 >>
            n_episodes;
        if (!ls || k1 != "env" || k2 != "obs" || k3 != "actions" || k4 != "episodes")
            throw IoError("experience file: malformed env line");
    }
    if (set.observation_dim == 0 || set.n_actions == 0)
        throw IoError("experience file: zero observation or action dimension");
    for (std::size_t e = 0; e < n_episodes; ++e) {
        if (!std::getline(in, line)) throw IoError("experience file: truncated");
        std::istringstream hs(line);
        std::string key, fit, total;
        std::size_t steps = 0;
        hs >> key >> steps >> fit >> total;
        if (!hs || key != "episode") throw IoError("experience file: malformed episode header");
        Trajectory ep;
        ep.fitness = parse_double(fit);
        ep.total_reward = parse_double(total);
        for (std::size_t t = 0; t < steps; ++t) {
            if (!std::getline(in, line)) throw IoError("experience file: truncated episode");
            std::istringstream ls(line);
            Transition tr;
            tr.state.resize(set.observation_dim);
            for (auto& s : tr.state) {
                if (!(ls >> word)) throw IoError("experience file: short step line");
                s = parse_double(word);
            }
            if (!(ls >> tr.action >> word)) throw IoError("experience file: short step line");
            if (tr.action >= set.n_actions) throw IoError("experience file: action out of range");
            tr.reward = parse_double(word);
            tr.probabilities.probabilities.resize(set.n_actions);
            for (auto& p : tr.probabilities.probabilities) {
                if (!(ls >> word)) throw IoError("experience file: short step line");
                p = parse_double(word);
            }
            ep.transitions.push_back(std::move(tr));
        }
        set.episodes.push_back(std::move(ep));
    }
    return set;
}

void save_experience(const std::string& path, const ExperienceSet& set) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write experience file '" + path + "'");
    write_experience(out, set);
}

ExperienceSet load_experience(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read experience file '" + path + "'");
    auto set = read_experience(in);
    if (set.episodes.empty()) throw IoError("experience file '" + path + "' has no episodes");
    return set;
}

// ---------------------------------------------------------------------------

TrajectoryLog::TrajectoryLog(std::ostream& out) : out_(out) { out_ << kHeader << "\n"; }

void TrajectoryLog::write(std::size_t iteration, std::string_view candidate_type,
                          const Trajectory& trajectory) {
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        const auto& tr = trajectory.transitions[t];
        out_ << iteration << ',' << candidate_type << ',' << t << ',' << tr.action << ','
             << fmt(tr.reward) << ',' << fmt(trajectory.fitness) << "\n";
    }
}

} // namespace bnet
