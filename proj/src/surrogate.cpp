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

#include "bnet/surrogate.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "bnet/behavior.hpp"
#include "bnet/error.hpp"

namespace bnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kGoldenIterations = 40;
constexpr int kRefineRounds = 2;

Eigen::MatrixXd correlation(const Eigen::MatrixXd& d, double theta, double nugget) {
    Eigen::MatrixXd r = (-theta * d.array()).exp().matrix();
    r.diagonal().array() += nugget;
    return r;
}

struct Solved {
    bool ok = false;
    double mean = 0.0;
    double variance = 0.0;
    double log_likelihood = kNegInf;
    Eigen::VectorXd alpha;
};

Solved solve(const Eigen::MatrixXd& d, const Eigen::VectorXd& y, double theta, double nugget) {
    Solved s;
    const Eigen::LLT<Eigen::MatrixXd> llt(correlation(d, theta, nugget));
    if (llt.info() != Eigen::Success) return s;
    const auto n = y.size();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd r_ones = llt.solve(ones);
    const Eigen::VectorXd r_y = llt.solve(y);
    const double denom = ones.dot(r_ones);
    if (!(denom > 0.0) || !std::isfinite(denom)) return s;
    s.mean = ones.dot(r_y) / denom;
    const Eigen::VectorXd resid = y - s.mean * ones;
    s.alpha = llt.solve(resid);
    s.variance = resid.dot(s.alpha) / static_cast<double>(n);
    double log_det = 0.0;
    const Eigen::MatrixXd& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
    if (!(s.variance > 0.0) || !std::isfinite(s.variance) || !std::isfinite(log_det)) return s;
    s.log_likelihood = -0.5 * static_cast<double>(n) * std::log(s.variance) - 0.5 * log_det;
    s.ok = std::isfinite(s.log_likelihood) && s.alpha.allFinite();
    if (!s.ok) s.log_likelihood = kNegInf;
    return s;
}

template <typename F>
double golden_maximise(F f, double lo, double hi, double& best_x, double& best_f) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < kGoldenIterations; ++i) {
        if (fc >= fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (fc > best_f) { best_f = fc; best_x = c; }
        if (fd > best_f) { best_f = fd; best_x = d; }
    }
    return best_x;
}

void check_inputs(const Eigen::MatrixXd& d, const Eigen::VectorXd& y) {
    const auto n = y.size();
    if (n < 3) throw InvalidArgument("kriging: at least three training points are required");
    if (d.rows() != n || d.cols() != n) throw InvalidArgument("kriging: distance matrix shape mismatch");
    if (!y.allFinite()) throw InvalidArgument("kriging: non-finite response");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) throw InvalidArgument("kriging: distance matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < i; ++j)
            if (d(i, j) != d(j, i) || !(d(i, j) >= 0.0) || !std::isfinite(d(i, j)))
                throw InvalidArgument("kriging: distances must be finite, non-negative and symmetric");
    }
}

} // namespace

double KrigingModel::log_likelihood(const Eigen::MatrixXd& distances, const Eigen::VectorXd& y,
                                    double theta, double nugget) {
    return solve(distances, y, theta, nugget).log_likelihood;
}

KrigingModel KrigingModel::fit(const Eigen::MatrixXd& distances, const Eigen::VectorXd& y,
                               const KrigingBounds& bounds) {
    check_inputs(distances, y);
    if (!(bounds.theta_min > 0.0 && bounds.theta_min <= bounds.theta_max &&
          bounds.nugget_min > 0.0 && bounds.nugget_min <= bounds.nugget_max && bounds.grid >= 2))
        throw InvalidArgument("kriging: invalid hyperparameter bounds");

    KrigingModel m;
    if (y.maxCoeff() == y.minCoeff()) {
        m.constant_ = true;
        m.mean_ = y(0);
        m.nugget_ = bounds.nugget_min;
        m.alpha_ = Eigen::VectorXd::Zero(y.size());
        return m;
    }

    const double u_lo = std::log(bounds.theta_min), u_hi = std::log(bounds.theta_max);
    const double v_lo = std::log(bounds.nugget_min), v_hi = std::log(bounds.nugget_max);
    const auto step = [&](double lo, double hi) { return (hi - lo) / static_cast<double>(bounds.grid - 1); };
    const double du = step(u_lo, u_hi), dv = step(v_lo, v_hi);
    const auto lnl = [&](double u, double v) {
        return solve(distances, y, std::exp(u), std::exp(v)).log_likelihood;
    };

    double best_u = 0.5 * (u_lo + u_hi), best_v = v_hi, best_f = kNegInf;
    for (std::size_t i = 0; i < bounds.grid; ++i)
        for (std::size_t j = 0; j < bounds.grid; ++j) {
            const double u = u_lo + du * static_cast<double>(i);
            const double v = v_lo + dv * static_cast<double>(j);
            const double f = lnl(u, v);
            if (f > best_f) { best_f = f; best_u = u; best_v = v; }
        }

    if (best_f > kNegInf) {
        for (int round = 0; round < kRefineRounds; ++round) {
            golden_maximise([&](double u) { return lnl(u, best_v); },
                            std::max(u_lo, best_u - du), std::min(u_hi, best_u + du), best_u, best_f);
            golden_maximise([&](double v) { return lnl(best_u, v); },
                            std::max(v_lo, best_v - dv), std::min(v_hi, best_v + dv), best_v, best_f);
        }
    }

    m.theta_ = std::exp(best_u);
    m.nugget_ = std::exp(best_v);
    Solved s = solve(distances, y, m.theta_, m.nugget_);
    while (!s.ok && m.escalations_ < bounds.max_escalations) {
        m.nugget_ *= 10.0;
        ++m.escalations_;
        s = solve(distances, y, m.theta_, m.nugget_);
    }
    if (!s.ok)
        throw NumericError("kriging: correlation matrix not factorisable up to nugget " +
                           std::to_string(m.nugget_));
    m.mean_ = s.mean;
    m.variance_ = s.variance;
    m.log_likelihood_ = s.log_likelihood;
    m.alpha_ = std::move(s.alpha);
    return m;
}

double KrigingModel::predict(const Eigen::VectorXd& distances) const {
    if (distances.size() != alpha_.size())
        throw InvalidArgument("kriging: expected " + std::to_string(alpha_.size()) + " distances");
    if (constant_) return mean_;
    double sum = mean_;
    for (Eigen::Index i = 0; i < alpha_.size(); ++i) sum += kernel(distances(i)) * alpha_(i);
    return sum;
}

CandidateRecord::CandidateRecord(std::uint64_t id_, Genome genome_, StateBatch states_,
                                 double mean_fitness_)
    : id(id_), genome(std::move(genome_)), phenotype(decode(genome)), states(std::move(states_)),
      mean_fitness(mean_fitness_) {
    if (states.empty()) throw InvalidArgument("candidate record: no stored states");
    if (states.dim() != phenotype.n_inputs())
        throw InvalidArgument("candidate record: state dimension mismatch");
    own_outputs = phenotype.forward_batch(states);
}

double pairwise_distance(const CandidateRecord& a, const CandidateRecord& b) {
    if (a.phenotype.n_outputs() != b.phenotype.n_outputs())
        throw InvalidArgument("pairwise distance: policies have different output sizes");
    const std::size_t n = a.phenotype.n_outputs();
    const std::vector<double> b_on_a = b.phenotype.forward_batch(a.states);
    const std::vector<double> a_on_b = a.phenotype.forward_batch(b.states);
    // Rows of S_a then rows of S_b: the same summation as on the concatenated set.
    double sum = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        double row = 0.0;
        for (std::size_t i = 0; i < n; ++i) row += std::abs(a.own_outputs[k * n + i] - b_on_a[k * n + i]);
        sum += row;
    }
    for (std::size_t k = 0; k < b.states.size(); ++k) {
        double row = 0.0;
        for (std::size_t i = 0; i < n; ++i) row += std::abs(a_on_b[k * n + i] - b.own_outputs[k * n + i]);
        sum += row;
    }
    return sum / static_cast<double>(a.states.size() + b.states.size());
}

SurrogateModel::SurrogateModel(std::vector<std::shared_ptr<const CandidateRecord>> records,
                               KrigingModel model)
    : records_(std::move(records)), model_(std::move(model)) {
    if (records_.size() != model_.size())
        throw InvalidArgument("surrogate model: record count does not match the fitted model");
    all_states_ = StateBatch(records_.front()->states.dim());
    for (const auto& r : records_) {
        offsets_.push_back(all_states_.size());
        all_states_.append(r->states);
    }
}

double SurrogateModel::predict_mean(const Phenotype& candidate) const {
    const std::size_t n = records_.front()->phenotype.n_outputs();
    if (candidate.n_outputs() != n || candidate.n_inputs() != all_states_.dim())
        throw InvalidArgument("surrogate: candidate shape does not match the archive");
    thread_local std::vector<double> probs;
    probs.resize(all_states_.size() * n);
    candidate.forward_batch(all_states_, probs);
    Eigen::VectorXd d(static_cast<Eigen::Index>(records_.size()));
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = *records_[i];
        d(static_cast<Eigen::Index>(i)) = behavior_distance(
            std::span<const double>(probs).subspan(offsets_[i] * n, r.own_outputs.size()),
            r.own_outputs, n);
    }
    return model_.predict(d);
}

SurrogateArchive::SurrogateArchive(std::size_t capacity, std::size_t states_per_record)
    : capacity_(capacity), states_per_record_(states_per_record) {
    if (capacity < 3) throw InvalidArgument("surrogate archive: capacity must be at least 3");
}

bool SurrogateArchive::contains(std::uint64_t id) const {
    return std::any_of(records_.begin(), records_.end(), [&](const auto& r) { return r->id == id; });
}

void SurrogateArchive::update(std::uint64_t id, const Genome& genome, const StateBatch& states,
                              double mean_fitness) {
    if (!std::isfinite(mean_fitness)) throw InvalidArgument("surrogate archive: non-finite fitness");
    auto it = std::find_if(records_.begin(), records_.end(), [&](const auto& r) { return r->id == id; });
    if (it != records_.end()) {
        auto updated = std::make_shared<CandidateRecord>(**it);
        updated->mean_fitness = mean_fitness;
        records_.erase(it);
        records_.push_back(std::move(updated));
        return;
    }
    StateBatch kept = states;
    if (states_per_record_ > 0 && states.size() > states_per_record_) {
        kept = StateBatch(states.dim());
        for (std::size_t i = 0; i < states_per_record_; ++i)
            kept.push_back(states.row(i * states.size() / states_per_record_));
    }
    records_.push_back(std::make_shared<CandidateRecord>(id, genome, std::move(kept), mean_fitness));
    while (records_.size() > capacity_) {
        const std::uint64_t gone = records_.front()->id;
        records_.pop_front();
        std::erase_if(cache_, [&](const auto& kv) { return kv.first.first == gone || kv.first.second == gone; });
    }
}

double SurrogateArchive::distance(const CandidateRecord& a, const CandidateRecord& b) {
    const std::pair<std::uint64_t, std::uint64_t> key = std::minmax(a.id, b.id);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    // Computed with the lower id first so the cached value does not depend on call order.
    const double d = a.id < b.id ? pairwise_distance(a, b) : pairwise_distance(b, a);
    cache_.emplace(key, d);
    return d;
}

SurrogateModel SurrogateArchive::fit(const KrigingBounds& bounds) {
    if (records_.size() < 3) throw InvalidArgument("surrogate archive: at least three records are required");
    const auto n = static_cast<Eigen::Index>(records_.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = records_[static_cast<std::size_t>(i)]->mean_fitness;
        for (Eigen::Index j = 0; j < i; ++j) {
            d(i, j) = d(j, i) = distance(*records_[static_cast<std::size_t>(i)],
                                         *records_[static_cast<std::size_t>(j)]);
        }
    }
    KrigingModel model = KrigingModel::fit(d, y, bounds);
    return SurrogateModel({records_.begin(), records_.end()}, std::move(model));
}

Genome surrogate_search(const SurrogateModel& model, const EaConfig& ea,
                        std::shared_ptr<const CgpConfig> config, Rng& rng) {
    EaResult result = run_ea(ea, std::move(config),
                             [&](const Genome& g) { return -model.predict_mean(g); }, rng);
    return result.best().genome;
}

} // namespace bnet
