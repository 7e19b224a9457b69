// Copyright 2026 The linvar Authors
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

#include <sstream>
#include <stdexcept>
#include <string>

namespace linvar {

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InvalidPosition : public Error {
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            std::size_t column) {
    std::ostringstream out;
    out << "parse error at " << line << ":" << column << ": " << message;
    return out.str();
  }

  std::size_t line_;
  std::size_t column_;
};

class UnknownSymbol : public Error {
  using Error::Error;
};

class ArityMismatch : public Error {
  using Error::Error;
};

class SignatureMismatch : public Error {
  using Error::Error;
};

class BudgetTooSmall : public Error {
  using Error::Error;
};

class NotLinearIdempotent : public Error {
  using Error::Error;
};

class EvaluationError : public Error {
  using Error::Error;
};

class OwnerAmbiguous : public Error {
  using Error::Error;
};

class NotAProjectionInstance : public Error {
  using Error::Error;
};

}  // namespace linvar
