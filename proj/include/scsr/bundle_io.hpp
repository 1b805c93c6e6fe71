// Copyright 2026 The SCSR Authors
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

#ifndef SCSR_BUNDLE_IO_HPP_
#define SCSR_BUNDLE_IO_HPP_

#include <string>

#include "scsr/grid.hpp"
#include "scsr/scsr_model.hpp"

namespace scsr {

/// Solution document with stable key order; identical bundles serialize to
/// byte-identical text.
std::string bundle_to_json(const Network& net, const SolutionBundle& bundle);

/// Parses a solution document against its network; throws std::runtime_error
/// on identifier mismatches (wrong case for this solution).
SolutionBundle bundle_from_json(const Network& net, const std::string& text);

}  // namespace scsr

#endif  // SCSR_BUNDLE_IO_HPP_
