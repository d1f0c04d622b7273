#include "common/error.h"

#include <sstream>

namespace vizcot {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kExec: return "ExecError";
    case ErrorCode::kSpec: return "SpecError";
    case ErrorCode::kExtraction: return "ExtractionError";
    case ErrorCode::kPipeline: return "PipelineError";
    case ErrorCode::kBackend: return "BackendError";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kPrecondition: return "PreconditionError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kUnknownDatabase: return "UnknownDatabase";
    case ErrorCode::kBusy: return "Busy";
    case ErrorCode::kNoTrace: return "NoTrace";
    case ErrorCode::kUnknownSession: return "UnknownSession";
  }
  return "Error";
}

std::string ParseError::format(const std::string& message, std::size_t offset,
                               const std::vector<std::string>& expected) {
  std::ostringstream out;
  out << message << " at offset " << offset;
  if (!expected.empty()) {
    out << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) out << (i + 1 == expected.size() ? " or " : ", ");
      out << expected[i];
    }
    out << ")";
  }
  return out.str();
}

}  // namespace vizcot
