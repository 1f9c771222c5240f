#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topoveil {

enum class ErrorCode {
  // topology_model
  InvalidTopology,
  NodeSetMismatch,
  // obnocs_transform
  RouterNotFound,
  DegreeTooSmall,
  BadStages,
  KeyLengthMismatch,
  KeyspaceTooLarge,
  BadExtension,
  // ap_loader
  ZeroWidth,
  WidthMismatch,
  // netlist_ir
  SchemaError,
  MultiDriverError,
  CombLoopError,
  UnknownSignal,
  RouterMismatch,
  // potent_switch
  KeyWidthTooSmall,
  TooFewSignals,
  KeyOutOfRange,
  // attack_harness
  SequentialNetlist,
  BudgetExhausted,
  UnsatFromStart,
  OracleMismatch,
  // workload_sim
  NonFunctionalTopology,
  WorkloadMismatch,
  WorkloadCoverage,
  // cli_reports
  LevelExceedsRouters,
  // formats
  ParseError,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Domain error carrying a machine-checkable code. All library failures are
/// reported with this type; std::invalid_argument is reserved for programmer
/// errors such as out-of-range indices.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace topoveil
