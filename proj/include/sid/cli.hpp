// include/sid/cli.hpp

// Copyright 2026 The sid-harness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace sid {

// Exit codes of the sid-harness executable.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitProtocol = 4,
  kExitPartial = 5,
};

// Applies SID_HARNESS_LOG (trace|debug|info|warn|error|off) to the default
// logger; warn when unset.
void init_logging();

int run_cli(int argc, char** argv);

}  // namespace sid
