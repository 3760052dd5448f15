#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace stinespring {

using Complex = std::complex<double>;

/// Dense complex matrix, the carrier type for every operator in the library.
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Thresholds for the floating-point shadows of exact statements.
///
/// atol bounds absolute residuals of operator identities, rank_rtol is the
/// relative singular-value cutoff for rank decisions, psd_rtol the relative
/// eigenvalue slack for positivity verdicts.
struct TolerancePolicy {
  double atol = 1e-9;
  double rank_rtol = 1e-10;
  double psd_rtol = 1e-10;
};

enum class ErrorCode {
  NonSquare,
  NotHermitian,
  ShapeMismatch,
  ModuleMismatch,
  NotCompletelyPositive,
  InvalidRank,
  DimensionTooSmall,
  NotMinimal,
  NotAPhiMap,
  NotEquivalent,
  IllConditioned,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ModuleMismatch: return "ModuleMismatch";
    case ErrorCode::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::NotMinimal: return "NotMinimal";
    case ErrorCode::NotAPhiMap: return "NotAPhiMap";
    case ErrorCode::NotEquivalent: return "NotEquivalent";
    case ErrorCode::IllConditioned: return "IllConditioned";
  }
  return "Unknown";
}

/// Mathematical failure (shape violations, failed certificates, ...).
/// Input/parsing problems use io::ParseError instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

}  // namespace stinespring
