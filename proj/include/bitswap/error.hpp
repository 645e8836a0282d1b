// Copyright 2026 The Bitswap Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bitswap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A decode needed a word but the stack was empty: the stream did not
/// carry enough initial bits, or it is corrupted.
class StreamExhausted : public Error {
 public:
  StreamExhausted() : Error("stream exhausted: not enough initial bits") {}
  explicit StreamExhausted(const std::string& what) : Error(what) {}
};

/// Malformed model file, container, or experiment config.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A decoded payload failed an integrity check.
class CorruptStream : public Error {
 public:
  using Error::Error;
};

}  // namespace bitswap
