#include "dek/error.hpp"

namespace dek {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return "E_USAGE";
    case ErrorCode::config: return "E_CONFIG";
    case ErrorCode::io: return "E_IO";
    case ErrorCode::data: return "E_DATA";
    case ErrorCode::shape: return "E_SHAPE";
    case ErrorCode::domain: return "E_DOMAIN";
    case ErrorCode::numeric: return "E_NUMERIC";
    case ErrorCode::diverged: return "E_DIVERGED";
    case ErrorCode::no_variance: return "E_NO_VARIANCE";
  }
  return "E_UNKNOWN";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return 2;
    case ErrorCode::config: return 3;
    case ErrorCode::io: return 4;
    case ErrorCode::data: return 5;
    case ErrorCode::shape: return 6;
    case ErrorCode::domain: return 7;
    case ErrorCode::numeric: return 8;
    case ErrorCode::diverged: return 9;
    case ErrorCode::no_variance: return 10;
  }
  return 1;
}

}  // namespace dek
