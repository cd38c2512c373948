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

#include <cstddef>
#include <span>
#include <vector>

namespace bnet {

/// A set of observations stored feature-major: all values of feature 0, then
/// all values of feature 1, and so on. Batched policy evaluation walks one
/// feature column at a time, so this layout keeps the inner loops contiguous.
class StateBatch {
public:
    StateBatch() = default;
    explicit StateBatch(std::size_t dim) : dim_(dim) {}

    /// Builds a batch from row-major states; every row must have length `dim`.
    static StateBatch from_rows(std::size_t dim, const std::vector<std::vector<double>>& rows);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

    /// Column of feature `j` across all states.
    std::span<const double> feature(std::size_t j) const {
        return {data_.data() + j * count_, count_};
    }

    double at(std::size_t state, std::size_t feature) const {
        return data_[feature * count_ + state];
    }

    std::vector<double> row(std::size_t state) const;

    /// Appends one state (throws on dimension mismatch or non-finite values).
    void push_back(std::span<const double> state);

    /// Appends all states of `other` (same dim).
    void append(const StateBatch& other);

    /// Copies states [first, first + count).
    StateBatch slice(std::size_t first, std::size_t count) const;

    bool operator==(const StateBatch&) const = default;

private:
    std::size_t dim_ = 0;
    std::size_t count_ = 0;
    std::vector<double> data_;
};

} // namespace bnet
