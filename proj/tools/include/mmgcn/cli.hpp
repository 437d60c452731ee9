// Copyright 2026 The MMGCN Authors. All Rights Reserved.
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

#include <iosfwd>
#include <string>
#include <vector>

namespace mmgcn::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,    // bad arguments, invalid config or parameter values
  kIo = 3,       // unreadable or unwritable files
  kData = 4,     // data contradicting its metadata, shape mismatches
  kNumeric = 5,  // non-finite loss or gradients
};

/// Runs one subcommand. `args` excludes the program name. Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv entry point writing to stdout/stderr.
int run(int argc, char** argv);

}  // namespace mmgcn::cli
