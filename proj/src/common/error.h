#ifndef VIZCOT_COMMON_ERROR_H_
#define VIZCOT_COMMON_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vizcot {

/// Error categories shared by every module. The C API maps these 1:1 onto
/// its status codes, so the numbering is part of the ABI.
enum class ErrorCode {
  kParse = 1,
  kIo,
  kFormat,
  kExec,
  kSpec,
  kExtraction,
  kPipeline,
  kBackend,
  kUnknownNode,
  kPrecondition,
  kConfig,
  kUnknownDatabase,
  kBusy,
  kNoTrace,
  kUnknownSession,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed VQL. `offset` is a byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset,
             std::vector<std::string> expected = {})
      : Error(ErrorCode::kParse, format(message, offset, expected)),
        detail_(message),
        offset_(offset),
        expected_(std::move(expected)) {}

  const std::string& detail() const { return detail_; }
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string format(const std::string& message, std::size_t offset,
                            const std::vector<std::string>& expected);

  std::string detail_;
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorCode::kIo, message) {}
};

/// A cell that cannot be stored under its column type. Rows are 1-based data
/// rows (the header is not counted).
class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t row, std::string column)
      : Error(ErrorCode::kFormat, message), row_(row), column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

enum class ExecErrorKind {
  kAggregateWithoutGrouping,
  kUnknownTable,
  kUnknownColumn,
  kAmbiguousColumn,
  kTypeMismatch,
  kUnparseableDate,
};

class ExecError : public Error {
 public:
  ExecError(ExecErrorKind kind, const std::string& message)
      : Error(ErrorCode::kExec, message), kind_(kind) {}

  ExecErrorKind kind() const { return kind_; }

 private:
  ExecErrorKind kind_;
};

class SpecError : public Error {
 public:
  explicit SpecError(const std::string& message) : Error(ErrorCode::kSpec, message) {}
};

/// Model output that does not follow the mandated format. The raw text is
/// kept so the caller can retry or show it.
class ExtractionError : public Error {
 public:
  ExtractionError(const std::string& message, std::string raw)
      : Error(ErrorCode::kExtraction, message), raw_(std::move(raw)) {}

  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& cause)
      : Error(ErrorCode::kPipeline, stage + ": " + cause), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

  /// Serialized partial trace, when one was assembled before the failure.
  const std::string& trace_json() const { return trace_json_; }
  void set_trace_json(std::string json) { trace_json_ = std::move(json); }

 private:
  std::string stage_;
  std::string trace_json_;
};

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& message) : Error(ErrorCode::kBackend, message) {}
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(const std::string& node_id)
      : Error(ErrorCode::kUnknownNode, "unknown node: " + node_id) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message)
      : Error(ErrorCode::kPrecondition, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorCode::kConfig, message) {}
};

class UnknownDatabase : public Error {
 public:
  explicit UnknownDatabase(const std::string& selector)
      : Error(ErrorCode::kUnknownDatabase, "unknown database: " + selector) {}
};

class Busy : public Error {
 public:
  Busy() : Error(ErrorCode::kBusy, "session has a request in flight") {}
};

class NoTrace : public Error {
 public:
  NoTrace() : Error(ErrorCode::kNoTrace, "session has no trace yet") {}
};

class UnknownSession : public Error {
 public:
  explicit UnknownSession(const std::string& id)
      : Error(ErrorCode::kUnknownSession, "unknown session: " + id) {}
};

}  // namespace vizcot

#endif  // VIZCOT_COMMON_ERROR_H_
