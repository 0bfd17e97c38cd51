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

#include <complex>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mdmp {

// splitmix64 finalizer; used to fold stream labels into seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a label path, e.g.
// derive_stream(seed, {axis_index, trial, purpose_tag}).
inline std::uint64_t derive_stream(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix_seed(base, 0x243F6A8885A308D3ull);
    for (std::uint64_t p : path)
        s = mix_seed(s, p);
    return s;
}

// Deterministic random source. std::mt19937_64 has a bit-exact specified
// output sequence; the uniform/normal mappings below are implemented by hand
// because the std::*_distribution adaptors are implementation-defined and
// would break byte-identical reruns across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0, 1]: 53-bit mantissa, never returns 0 (safe for log()).
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex normal with unit variance (E|z|^2 = 1).
    std::complex<double> normal_complex() {
        const double s = 1.0 / std::sqrt(2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mdmp
