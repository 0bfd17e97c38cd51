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

#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mdmp {

// Exact minimum-cost one-to-one assignment on a square cost matrix: returns
// sigma with row i matched to column sigma[i], minimizing the total cost.
// Subset-sum dynamic program, exact for n ≤ 20 (DomainError beyond; path
// counts in this library are far smaller). Costs must be finite.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd &cost);

} // namespace mdmp
