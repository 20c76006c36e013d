#include "qgca/error.hpp"

namespace qgca {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::BicUndefined: return "BicUndefined";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::ReferenceUndefined: return "ReferenceUndefined";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace qgca
