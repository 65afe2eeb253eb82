// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace yoho {

// All recoverable failures carry a stable machine-readable code
// ("missing-file", "bad-magic", ...) plus a human-readable message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, const std::string& code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace yoho
