// Copyright 2026 The iotrans Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace iotrans {

/// Tolerance used for every zero / normalization test on probabilities.
inline constexpr double kProbEps = 1e-9;

/// Maximum horizon for exact enumeration over output words.
inline constexpr int kHorizonCap = 12;

/// Largest tensor (in number of amplitudes) materialized by the full-space
/// cross checks in circuit_sim.
inline constexpr std::size_t kAmplitudeGuard = 1000000;

enum class ErrorCode {
  RowNotNormalized,
  NegativeProbability,
  NonUnifilar,
  UnknownSymbol,
  InvalidAlphabet,
  DistributionNotNormalized,
  ImpossibleEmission,
  ParameterOutOfRange,
  ReducibleChain,
  InconsistentPartition,
  HorizonTooLarge,
  HorizonMismatch,
  DimensionMismatch,
  NotPSD,
  NumericalRankFailure,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RowNotNormalized: return "RowNotNormalized";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::NonUnifilar: return "NonUnifilar";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::InvalidAlphabet: return "InvalidAlphabet";
    case ErrorCode::DistributionNotNormalized: return "DistributionNotNormalized";
    case ErrorCode::ImpossibleEmission: return "ImpossibleEmission";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::ReducibleChain: return "ReducibleChain";
    case ErrorCode::InconsistentPartition: return "InconsistentPartition";
    case ErrorCode::HorizonTooLarge: return "HorizonTooLarge";
    case ErrorCode::HorizonMismatch: return "HorizonMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NumericalRankFailure: return "NumericalRankFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

/// Domain error carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Shannon entropy in bits; 0 log 0 := 0, negative noise is ignored.
inline double entropy_bits(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace iotrans
