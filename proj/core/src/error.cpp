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

#include "dsopf/error.hpp"

namespace dsopf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadParameter: return "BadParameter";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kDisconnectedNode: return "DisconnectedNode";
    case ErrorCode::kMissingLine: return "MissingLine";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kEmptyKeptSet: return "EmptyKeptSet";
    case ErrorCode::kBadCardinality: return "BadCardinality";
    case ErrorCode::kScenarioNetworkMismatch: return "ScenarioNetworkMismatch";
    case ErrorCode::kInjectionExceedsNameplate: return "InjectionExceedsNameplate";
    case ErrorCode::kSingularSchur: return "SingularSchur";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kNoKktCase: return "NoKktCase";
    case ErrorCode::kBadBounds: return "BadBounds";
    case ErrorCode::kZeroResistance: return "ZeroResistance";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace dsopf
