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

#ifndef TRMEVAL_PORTER_STEMMER_H_
#define TRMEVAL_PORTER_STEMMER_H_

#include <string>
#include <string_view>

namespace trmeval {

// Classic Porter (1980) suffix-stripping stemmer for lowercase English
// words. Words of two characters or fewer are returned unchanged; bytes
// outside a-z are treated as consonants.
std::string PorterStem(std::string_view word);

}  // namespace trmeval

#endif  // TRMEVAL_PORTER_STEMMER_H_
