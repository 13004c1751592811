// Copyright 2026 The Recompose Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace recompose {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SingularTransform : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// OBJ syntax error. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DegenerateFaceError : public Error {
 public:
  explicit DegenerateFaceError(std::vector<std::size_t> faces);
  const std::vector<std::size_t>& faces() const { return faces_; }

 private:
  std::vector<std::size_t> faces_;
};

// An operation produced nothing where something was required (empty
// selection, empty volume, zero-area mesh).
class EmptyResult : public Error {
 public:
  using Error::Error;
};

// Scene JSON does not match the schema. path() is a JSON pointer-like
// location such as "/instances/2/transform".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& msg)
      : Error(path + ": " + msg), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace recompose
