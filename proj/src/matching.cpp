// SPDX-License-Identifier: Apache-2.0
//
// This file is part of mdmp, a multi-dimensional matrix-pencil channel
// estimation and prediction library for wideband planar-array MIMO links.
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

#include "mdmp/matching.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "mdmp/errors.hpp"

namespace mdmp {

std::vector<int> min_cost_assignment(const Eigen::MatrixXd &cost) {
    if (cost.rows() != cost.cols())
        throw DimMismatchError("assignment cost matrix must be square");
    const int n = static_cast<int>(cost.rows());
    if (n == 0)
        return {};
    if (n > 20)
        throw DomainError("assignment supports at most 20 items");
    if (!cost.allFinite())
        throw NonFiniteError("assignment costs must be finite");

    // dp[mask]: minimal cost of matching rows 0..popcount(mask)-1 to the
    // column set encoded by mask.
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(full + 1u, inf);
    std::vector<std::int8_t> choice(full + 1u, -1);
    dp[0] = 0.0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const int row = std::popcount(mask) - 1;
        for (int col = 0; col < n; ++col) {
            if (!(mask & (1u << col)))
                continue;
            const double cand = dp[mask ^ (1u << col)] + cost(row, col);
            if (cand < dp[mask]) {
                dp[mask] = cand;
                choice[mask] = static_cast<std::int8_t>(col);
            }
        }
    }

    std::vector<int> sigma(static_cast<std::size_t>(n), -1);
    std::uint32_t mask = full;
    for (int row = n - 1; row >= 0; --row) {
        const int col = choice[mask];
        sigma[static_cast<std::size_t>(row)] = col;
        mask ^= (1u << col);
    }
    return sigma;
}

} // namespace mdmp
