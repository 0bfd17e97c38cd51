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

#include "mdmp/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace mdmp {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'T', '1'};
constexpr std::size_t kMaxRank = 8;

void put_u32_le(std::string &out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_f64_le(std::string &out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32_le(const unsigned char *p) {
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

double get_f64_le(const unsigned char *p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

bool valid_axis_code(std::uint8_t code) { return code <= 3; }

} // namespace

const char *axis_name(Axis axis) {
    switch (axis) {
    case Axis::ant_v: return "ant_v";
    case Axis::ant_h: return "ant_h";
    case Axis::freq: return "freq";
    case Axis::time: return "time";
    }
    return "unknown";
}

std::size_t AxisSpec::element_count() const {
    std::size_t n = 1;
    for (std::size_t s : sizes)
        n *= s;
    return sizes.empty() ? 0 : n;
}

void AxisSpec::validate() const {
    if (labels.size() != sizes.size())
        throw DimMismatchError("axis label count (" +
                               std::to_string(labels.size()) +
                               ") does not match size count (" +
                               std::to_string(sizes.size()) + ")");
    if (labels.empty())
        throw DimMismatchError("tensor must have at least one axis");
    if (labels.size() > kMaxRank)
        throw DimMismatchError("tensor rank " + std::to_string(labels.size()) +
                               " exceeds supported maximum " +
                               std::to_string(kMaxRank));
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] == 0)
            throw DimMismatchError("axis " + std::string(axis_name(labels[i])) +
                                   " has zero extent");
}

ComplexTensor::ComplexTensor(AxisSpec axes) : axes_(std::move(axes)) {
    axes_.validate();
    data_.assign(axes_.element_count(), value_type(0.0, 0.0));
}

ComplexTensor::ComplexTensor(AxisSpec axes, std::vector<value_type> data)
    : axes_(std::move(axes)), data_(std::move(data)) {
    axes_.validate();
    if (data_.size() != axes_.element_count())
        throw DimMismatchError("buffer holds " + std::to_string(data_.size()) +
                               " elements but axes describe " +
                               std::to_string(axes_.element_count()));
    for (const value_type &v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteError("tensor buffer contains a non-finite value");
}

std::size_t ComplexTensor::offset(const std::vector<std::size_t> &index) const {
    if (index.size() != axes_.rank())
        throw DimMismatchError("index rank " + std::to_string(index.size()) +
                               " does not match tensor rank " +
                               std::to_string(axes_.rank()));
    std::size_t off = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= axes_.sizes[i])
            throw DimMismatchError("index out of range on axis " +
                                   std::string(axis_name(axes_.labels[i])));
        off = off * axes_.sizes[i] + index[i];
    }
    return off;
}

double ComplexTensor::squared_norm() const {
    double acc = 0.0;
    for (const value_type &v : data_)
        acc += std::norm(v);
    return acc;
}

ComplexTensor tensor_new(const std::vector<std::size_t> &dims,
                         const std::vector<Axis> &axes) {
    return ComplexTensor(AxisSpec{axes, dims});
}

ComplexTensor tensor_new(const std::vector<std::size_t> &dims,
                         const std::vector<Axis> &axes,
                         std::vector<std::complex<double>> data) {
    return ComplexTensor(AxisSpec{axes, dims}, std::move(data));
}

void write_cct(const ComplexTensor &tensor, const std::string &path) {
    std::string bytes;
    bytes.reserve(4 + 4 + tensor.rank() * 5 + tensor.size() * 16);
    bytes.append(kMagic, 4);
    put_u32_le(bytes, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t s : tensor.axes().sizes)
        put_u32_le(bytes, static_cast<std::uint32_t>(s));
    for (Axis a : tensor.axes().labels)
        bytes.push_back(static_cast<char>(static_cast<std::uint8_t>(a)));
    for (const auto &v : tensor.data()) {
        put_f64_le(bytes, v.real());
        put_f64_le(bytes, v.imag());
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("short write to '" + path + "'");
}

ComplexTensor read_cct(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failure on '" + path + "'");

    const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
    const std::size_t n = bytes.size();
    if (n < 8 || std::memcmp(p, kMagic, 4) != 0)
        throw FormatError("'" + path + "' is not a CCT1 container");

    const std::uint32_t rank = get_u32_le(p + 4);
    if (rank == 0 || rank > kMaxRank)
        throw FormatError("unsupported axis count " + std::to_string(rank));

    std::size_t off = 8;
    if (n < off + rank * 4ull + rank)
        throw FormatError("truncated CCT1 header");

    AxisSpec axes;
    std::size_t elements = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint32_t s = get_u32_le(p + off);
        off += 4;
        if (s == 0)
            throw FormatError("axis " + std::to_string(i) + " has zero extent");
        if (elements > std::numeric_limits<std::size_t>::max() / s / 16)
            throw FormatError("element count overflow in CCT1 header");
        elements *= s;
        axes.sizes.push_back(s);
    }
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint8_t code = p[off++];
        if (!valid_axis_code(code))
            throw FormatError("unknown axis label code " + std::to_string(code));
        axes.labels.push_back(static_cast<Axis>(code));
    }

    const std::size_t payload = elements * 16;
    if (n - off != payload)
        throw FormatError("payload is " + std::to_string(n - off) +
                          " bytes, expected " + std::to_string(payload));

    std::vector<std::complex<double>> data;
    data.reserve(elements);
    for (std::size_t i = 0; i < elements; ++i) {
        const double re = get_f64_le(p + off);
        const double im = get_f64_le(p + off + 8);
        off += 16;
        data.emplace_back(re, im);
    }
    return ComplexTensor(std::move(axes), std::move(data));
}

} // namespace mdmp
