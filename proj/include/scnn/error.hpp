/*
 * SPDX-FileCopyrightText: Copyright 2026 The scnn-lab authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace scnn {

/// Value outside the representable/accepted domain (NaN, Inf, exponent 255).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Caller violated an API precondition (bad dimensions, empty inputs, ...).
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Pearson correlation with a zero-variance operand.
class UndefinedCorrelation : public std::runtime_error {
  public:
    UndefinedCorrelation() : std::runtime_error("correlation undefined: zero variance operand") {}
};

class IoError : public std::runtime_error {
  public:
    IoError(const std::string &path, const std::string &what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string &path() const noexcept { return path_; }

  private:
    std::string path_;
};

/// File was readable but its content is malformed or truncated.
class CorruptFileError : public IoError {
  public:
    using IoError::IoError;
};

/// Schema violation in a JSON document. `field` names the offending field.
class ValidationError : public UsageError {
  public:
    ValidationError(const std::string &field, const std::string &what)
        : UsageError(field + ": " + what), field_(field) {}
    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

} // namespace scnn
