/* Copyright 2026 The Bias Audit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BIAS_AUDIT_ERROR_H_
#define BIAS_AUDIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace bias_audit {

enum class ErrorKind {
  kValidation,         // malformed input, violated invariant
  kMissingPrediction,  // a scored unit has no prediction
};

// Base error for everything the toolkit reports. The kind selects the
// process exit code at the CLI boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::kValidation, message) {}
};

class MissingPredictionError : public Error {
 public:
  explicit MissingPredictionError(const std::string& message)
      : Error(ErrorKind::kMissingPrediction, message) {}
};

// 1 for validation errors, 2 for missing predictions.
int ExitCodeFor(ErrorKind kind);

}  // namespace bias_audit

#endif  // BIAS_AUDIT_ERROR_H_
