/*
   Copyright 2026 The jdsde Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace jdsde {

enum class ErrorCategory { domain, configuration, coupling, numeric, parse, io };

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::configuration: return "configuration";
    case ErrorCategory::coupling: return "coupling";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

/// Base of every error raised by the library. The category is what the CLI
/// reports on stderr and maps to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCategory::domain, w) {}
};
struct ConfigurationError : Error {
  explicit ConfigurationError(const std::string& w) : Error(ErrorCategory::configuration, w) {}
};
struct CouplingError : Error {
  explicit CouplingError(const std::string& w) : Error(ErrorCategory::coupling, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorCategory::numeric, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCategory::io, w) {}
};

/// Config parse failure; line is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(ErrorCategory::parse,
              line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace jdsde
