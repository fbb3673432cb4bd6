/* Copyright 2026 The XSepConv Authors. All Rights Reserved.

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

#ifndef XSEPCONV_CLI_HPP_
#define XSEPCONV_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace xsepconv {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;
}  // namespace exit_code

// Entry point of the `xsepconv` tool. `args` excludes the program name.
// Results go to `out`, diagnostics and warnings to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace xsepconv

#endif  // XSEPCONV_CLI_HPP_
