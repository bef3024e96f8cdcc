/*
 * Copyright 2026 The rbpdip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <CLI11.hpp>

#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace rbpdip::cli {

// Reads `key = value` lines (`#` or `;` starts a comment) and applies every
// key to the subcommand selected on the command line, so a file holds the
// same names as that subcommand's long flags. Flags given on the command line
// take precedence. Section headers are rejected.
class FlatConfig : public CLI::ConfigINI {
public:
    explicit FlatConfig(const CLI::App* app) : app_(app) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        const std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
        std::istringstream lines(text);
        std::string line;
        int number = 0;
        while (std::getline(lines, line)) {
            ++number;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#' || line[first] == ';')
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos || eq == first)
                throw CLI::ParseError("config line " + std::to_string(number) + ": expected 'key = value'",
                                      CLI::ExitCodes::ConfigError);
        }
        std::istringstream again(text);
        auto items = CLI::ConfigINI::from_config(again);
        const auto subs = app_->get_subcommands();
        if (!subs.empty()) {
            for (auto& item : items)
                if (item.parents.empty())
                    item.parents = {subs.front()->get_name()};
        }
        return items;
    }

private:
    const CLI::App* app_;
};

} // namespace rbpdip::cli
