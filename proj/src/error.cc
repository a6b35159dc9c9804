// Copyright 2026 The trmeval Authors.
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

#include "trmeval/error.h"

namespace trmeval {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kInsufficientSamples:
      return "insufficient-samples";
    case ErrorCode::kMissingEmbedding:
      return "missing-embedding";
    case ErrorCode::kMustUseMonteCarlo:
      return "must-use-montecarlo";
    case ErrorCode::kValidation:
      return "validation";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

}  // namespace trmeval
