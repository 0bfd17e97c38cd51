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
#include <cstdint>
#include <string>
#include <vector>

#include "mdmp/errors.hpp"

namespace mdmp {

// Semantic axis labels carried by every tensor. Channel snapshots are
// [ant_h, ant_v, freq]; trajectories append a trailing time axis.
enum class Axis : std::uint8_t {
    ant_v = 0, // vertical antenna index within one panel column
    ant_h = 1, // horizontal antenna index
    freq = 2,  // subcarrier index
    time = 3,  // sample index
};

const char *axis_name(Axis axis);

// Ordered axis labels plus their extents, outermost (slowest-varying) first.
struct AxisSpec {
    std::vector<Axis> labels;
    std::vector<std::size_t> sizes;

    std::size_t rank() const { return labels.size(); }
    std::size_t element_count() const;
    void validate() const; // throws DimMismatchError
};

// Dense complex tensor with row-major layout (first axis slowest). This is a
// deliberately small container: algorithms gather straight from the flat
// buffer, so no strided views or broadcasting are provided.
class ComplexTensor {
  public:
    using value_type = std::complex<double>;

    ComplexTensor() = default;

    // Zero-filled tensor with the given axes.
    explicit ComplexTensor(AxisSpec axes);

    // Adopts an existing buffer; every element must be finite.
    ComplexTensor(AxisSpec axes, std::vector<value_type> data);

    const AxisSpec &axes() const { return axes_; }
    std::size_t rank() const { return axes_.rank(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t axis) const { return axes_.sizes.at(axis); }

    const std::vector<value_type> &data() const { return data_; }
    std::vector<value_type> &data() { return data_; }

    // Flat offset of a multi-index (bounds-checked).
    std::size_t offset(const std::vector<std::size_t> &index) const;

    value_type at(const std::vector<std::size_t> &index) const {
        return data_[offset(index)];
    }
    value_type &at(const std::vector<std::size_t> &index) {
        return data_[offset(index)];
    }

    double squared_norm() const;

  private:
    AxisSpec axes_;
    std::vector<value_type> data_;
};

// Spec-level constructors (validating wrappers around the class above).
ComplexTensor tensor_new(const std::vector<std::size_t> &dims,
                         const std::vector<Axis> &axes);
ComplexTensor tensor_new(const std::vector<std::size_t> &dims,
                         const std::vector<Axis> &axes,
                         std::vector<std::complex<double>> data);

// Binary container: ASCII magic "CCT1", little-endian u32 axis count, u32
// sizes, u8 axis-label codes, then float64 (re, im) pairs in row-major order
// with the first listed axis varying slowest. Round trips are bit-exact.
void write_cct(const ComplexTensor &tensor, const std::string &path);
ComplexTensor read_cct(const std::string &path);

} // namespace mdmp
