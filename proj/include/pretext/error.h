// Copyright 2026 The pretext Authors
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

#ifndef PRETEXT_ERROR_H_
#define PRETEXT_ERROR_H_

#include <stdexcept>
#include <string>

namespace pretext {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied arguments does not hold.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A run configuration failed to parse or validate.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (JSONL corpus, report).
class ParseError : public Error {
 public:
  using Error::Error;
};

// The model sidecar could not be reached.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The model sidecar answered with a body that violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace pretext

#endif  // PRETEXT_ERROR_H_
