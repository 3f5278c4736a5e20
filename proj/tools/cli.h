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

// The mmshap command-line tool.

#ifndef MMSHAP_TOOLS_CLI_H_
#define MMSHAP_TOOLS_CLI_H_

#include <iosfwd>

namespace mmshap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUnreachable = 3;
inline constexpr int kExitPartial = 4;

int Main(int argc, char** argv);

// Synthetic-oracle checks; prints one PASS/FAIL line per check.
int RunSelftest(std::ostream& out);

}  // namespace mmshap::cli

#endif  // MMSHAP_TOOLS_CLI_H_
