// Copyright 2026 The aadocre Authors.
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

// Command-line front end. Exit codes: 0 success, 1 validation or
// configuration error, 2 runtime failure. Errors end with a one-line JSON
// trailer on the error stream.

#ifndef AADOCRE_TOOLS_CLI_HPP_
#define AADOCRE_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace aadocre::cli {

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aadocre::cli

#endif  // AADOCRE_TOOLS_CLI_HPP_
