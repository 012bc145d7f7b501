// Copyright 2026 The shuffledp Authors
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

#ifndef SHUFFLEDP_ERRORS_H_
#define SHUFFLEDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace shuffledp {

// A user-facing parameter is outside its documented range.
class InvalidParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter set is individually valid but not usable with the requested
// protocol (for example FE0 with rho > 1).
class ConfigurationError : public InvalidParameterError {
 public:
  using InvalidParameterError::InvalidParameterError;
};

// Structural problems with an input value: wrong set size, element out of
// range, mixed message types, malformed encodings.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request is valid but too large for the chosen evaluation mode.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_ERRORS_H_
