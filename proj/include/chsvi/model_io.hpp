// Copyright 2026 The CHSVI Authors
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

#include <filesystem>
#include <string>
#include <vector>

#include "chsvi/model.hpp"

namespace chsvi {

/// Malformed model file: bad JSON or a record referring to unknown ids.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed file describing an invalid model.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::vector<Violation> report)
      : std::runtime_error("model validation failed:\n" + format_report(report)),
        report_(std::move(report)) {}
  const std::vector<Violation>& report() const { return report_; }

 private:
  std::vector<Violation> report_;
};

DecModel parse_model(const std::string& text);
std::string serialize_model(const DecModel& model);

DecModel load_model(const std::filesystem::path& path);
void save_model(const DecModel& model, const std::filesystem::path& path);

}  // namespace chsvi
