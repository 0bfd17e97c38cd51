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

#include <stdexcept>
#include <string>

namespace mdmp {

// Stable short codes for per-trial failure reporting in the metrics CSV.
enum class ErrorCode {
    none,
    dim_mismatch,
    non_finite,
    io_error,
    format_error,
    empty_paths,
    zero_signal,
    infeasible_pencil,
    all_zero,
    rank_deficient,
    complex_eigenvalues,
    path_count_mismatch,
    domain_error,
    window_violation,
    ambiguous_pairing,
    constraint_violation,
    zero_truth,
    config_error,
};

const char *error_code_name(ErrorCode code);

// Base class for all library errors. Carries a machine-readable code so the
// Monte-Carlo harness can log failures as data instead of aborting a sweep.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

#define MDMP_DEFINE_ERROR(NAME, CODE)                                          \
    class NAME : public Error {                                                \
      public:                                                                  \
        explicit NAME(const std::string &message)                              \
            : Error(ErrorCode::CODE, message) {}                               \
    }

MDMP_DEFINE_ERROR(DimMismatchError, dim_mismatch);       // shape/axis disagreement
MDMP_DEFINE_ERROR(NonFiniteError, non_finite);           // NaN/Inf in numeric input
MDMP_DEFINE_ERROR(IoError, io_error);                    // file open/read/write failure
MDMP_DEFINE_ERROR(FormatError, format_error);            // malformed container bytes
MDMP_DEFINE_ERROR(EmptyPathsError, empty_paths);         // generator given zero paths
MDMP_DEFINE_ERROR(ZeroSignalError, zero_signal);         // SNR undefined for zero input
MDMP_DEFINE_ERROR(InfeasiblePencilError, infeasible_pencil); // window/rank system violated
MDMP_DEFINE_ERROR(AllZeroError, all_zero);               // spectrum has no energy at all
MDMP_DEFINE_ERROR(RankDeficientError, rank_deficient);   // LS/eigen system lost rank
MDMP_DEFINE_ERROR(ComplexEigenvaluesError, complex_eigenvalues); // non-real shift spectrum
MDMP_DEFINE_ERROR(PathCountMismatchError, path_count_mismatch); // two runs disagree on P
MDMP_DEFINE_ERROR(DomainError, domain_error);            // decoder outside identifiable window
MDMP_DEFINE_ERROR(WindowViolationError, window_violation); // prediction target out of window
MDMP_DEFINE_ERROR(AmbiguousPairingError, ambiguous_pairing); // path matching unresolvable
MDMP_DEFINE_ERROR(ConstraintViolationError, constraint_violation); // bound domain breach
MDMP_DEFINE_ERROR(ZeroTruthError, zero_truth);           // NMSE denominator is zero
MDMP_DEFINE_ERROR(ConfigError, config_error);            // scenario configuration invalid

#undef MDMP_DEFINE_ERROR

inline const char *error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::none: return "";
    case ErrorCode::dim_mismatch: return "dim_mismatch";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::format_error: return "format_error";
    case ErrorCode::empty_paths: return "empty_paths";
    case ErrorCode::zero_signal: return "zero_signal";
    case ErrorCode::infeasible_pencil: return "infeasible_pencil";
    case ErrorCode::all_zero: return "all_zero";
    case ErrorCode::rank_deficient: return "rank_deficient";
    case ErrorCode::complex_eigenvalues: return "complex_eigenvalues";
    case ErrorCode::path_count_mismatch: return "path_count_mismatch";
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::window_violation: return "window_violation";
    case ErrorCode::ambiguous_pairing: return "ambiguous_pairing";
    case ErrorCode::constraint_violation: return "constraint_violation";
    case ErrorCode::zero_truth: return "zero_truth";
    case ErrorCode::config_error: return "config_error";
    }
    return "unknown";
}

} // namespace mdmp
