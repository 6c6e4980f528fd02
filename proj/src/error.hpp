// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_ERROR_HPP
#define QRELAX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qrelax {

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidMatrix,
  NotPsd,
  ParseError,
  DimError,
  InvalidConstraint,
  RangeConditionViolated,
  EmptyInterior,
  SettingViolated,
  AlphaInvalid,
  SizeCapExceeded,
  NoFeasiblePointFound,
  FixtureNotFound,
  UnknownRelaxation,
  SolverFailed,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qrelax

#endif
