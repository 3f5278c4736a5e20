/*
 * Copyright 2026 The mmshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MMSHAP_ERROR_H_
#define MMSHAP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmshap {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyMaskableSet,
  kIndexOutOfRange,
  kExactTooLarge,
  kModelUnavailable,
  kConnectFailed,
  kTimeout,
  kProtocolViolation,
  kModelError,
  kEmptyGeneration,
  kSchemaError,
  kMissingExample,
  kMissingAttribution,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);
// Inverse of ErrorCodeName; false for unknown names.
bool ParseErrorCode(std::string_view name, ErrorCode* out);

// All library failures are reported as mmshap::Error. The code is stable and
// used by the CLI to pick an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// True for failures that mean "the model endpoint could not be reached".
inline bool IsUnreachable(ErrorCode code) {
  return code == ErrorCode::kConnectFailed || code == ErrorCode::kTimeout ||
         code == ErrorCode::kModelUnavailable;
}

}  // namespace mmshap

#endif  // MMSHAP_ERROR_H_
