// SPDX-License-Identifier: Apache-2.0
// Fixture loading helpers shared by the test binaries.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace remodel::testing {

inline std::string fixturePath(const std::string& name) {
    return std::string(REMODEL_FIXTURES) + "/" + name;
}

inline std::string readFixture(const std::string& name) {
    std::ifstream in(fixturePath(name));
    if (!in) throw std::runtime_error("cannot open fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace remodel::testing
