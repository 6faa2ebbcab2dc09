// Copyright 2026 The jumpscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef JUMPSCOPE_CLI_HPP
#define JUMPSCOPE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace jumpscope {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // bad flags or config
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumerical = 3;  // numerical or statistics failure

/// Runs the command line `args` (program name excluded) and returns the exit code.
///
/// Commands: simulate, filter, sweep, analyze, efficiency, replay, default-config.
/// Every command that writes files also writes manifest.json to its output
/// directory; `replay --manifest` reruns it and compares output digests.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace jumpscope

#endif  // JUMPSCOPE_CLI_HPP
