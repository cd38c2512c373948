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

#include "bnet/state_batch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bnet/error.hpp"

namespace bnet {

StateBatch StateBatch::from_rows(std::size_t dim, const std::vector<std::vector<double>>& rows) {
    StateBatch batch(dim);
    batch.data_.resize(dim * rows.size());
    batch.count_ = rows.size();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != dim)
            throw InvalidArgument("state " + std::to_string(k) + " has dimension " +
                                  std::to_string(rows[k].size()) + ", expected " +
                                  std::to_string(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::isfinite(rows[k][j])) throw InvalidArgument("non-finite state value");
            batch.data_[j * rows.size() + k] = rows[k][j];
        }
    }
    return batch;
}

std::vector<double> StateBatch::row(std::size_t state) const {
    std::vector<double> out(dim_);
    for (std::size_t j = 0; j < dim_; ++j) out[j] = at(state, j);
    return out;
}

void StateBatch::push_back(std::span<const double> state) {
    if (state.size() != dim_) throw InvalidArgument("state dimension mismatch");
    for (double v : state)
        if (!std::isfinite(v)) throw InvalidArgument("non-finite state value");
    std::vector<double> next(dim_ * (count_ + 1));
    for (std::size_t j = 0; j < dim_; ++j) {
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(j * count_), count_,
                    next.begin() + static_cast<std::ptrdiff_t>(j * (count_ + 1)));
        next[j * (count_ + 1) + count_] = state[j];
    }
    data_ = std::move(next);
    ++count_;
}

void StateBatch::append(const StateBatch& other) {
    if (other.empty()) return;
    if (empty() && dim_ == 0) dim_ = other.dim_;
    if (other.dim_ != dim_) throw InvalidArgument("state dimension mismatch");
    const std::size_t total = count_ + other.count_;
    std::vector<double> next(dim_ * total);
    for (std::size_t j = 0; j < dim_; ++j) {
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(j * count_), count_,
                    next.begin() + static_cast<std::ptrdiff_t>(j * total));
        std::copy_n(other.data_.begin() + static_cast<std::ptrdiff_t>(j * other.count_),
                    other.count_,
                    next.begin() + static_cast<std::ptrdiff_t>(j * total + count_));
    }
    data_ = std::move(next);
    count_ = total;
}

StateBatch StateBatch::slice(std::size_t first, std::size_t count) const {
    if (first + count > count_) throw InvalidArgument("slice out of range");
    StateBatch out(dim_);
    out.count_ = count;
    out.data_.resize(dim_ * count);
    for (std::size_t j = 0; j < dim_; ++j)
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(j * count_ + first), count,
                    out.data_.begin() + static_cast<std::ptrdiff_t>(j * count));
    return out;
}

} // namespace bnet
