/*
 Copyright 2026 The dsopf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef DSOPF_RANDOM_HPP
#define DSOPF_RANDOM_HPP

#include <cstdint>
#include <string_view>

namespace dsopf {

std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for a labeled stage, e.g. derive_seed(root, "scenarios/sunny", 0).
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0);

}  // namespace dsopf

#endif  // DSOPF_RANDOM_HPP
